"""Input templates and benchmark sweeps."""

from __future__ import annotations

import csv
import io
import statistics
import time
from dataclasses import dataclass

from .automaton import Nfa
from .errors import BudgetExceeded
from .matcher import match

# bytes charged per memo entry in memoBytesEstimate: an 8-byte packed key
# plus an 8-byte value slot, the footprint of one open-addressing hash cell
MEMO_ENTRY_BYTES = 16

CSV_HEADER = ("n", "engine", "mean_us", "calls", "memo_entries", "memo_bytes")

_ESCAPES = {"n": b"\n", "t": b"\t", "r": b"\r", "0": b"\x00", "\\": b"\\",
            "(": b"(", ")": b")", "^": b"^", "{": b"{", "}": b"}"}
_MARKER = "^{n}"


def _unescape(text: str) -> bytes:
    out = bytearray()
    k = 0
    while k < len(text):
        c = text[k]
        if c != "\\":
            out += c.encode("utf-8")
            k += 1
            continue
        if k + 1 >= len(text):
            raise ValueError("template ends with a backslash")
        e = text[k + 1]
        if e == "x":
            digits = text[k + 2:k + 4]
            try:
                out.append(int(digits, 16))
            except ValueError:
                raise ValueError(f"bad \\x escape in template: {text[k:k + 4]!r}") from None
            k += 4
        elif e in _ESCAPES:
            out += _ESCAPES[e]
            k += 2
        else:
            raise ValueError(f"unknown escape \\{e} in template")
    return bytes(out)


@dataclass(frozen=True)
class InputTemplate:
    """``prefix unit^n suffix``.

    Written as text with one ``^{n}`` marker.  The repeated unit is the
    parenthesised group right before the marker, or the single character
    before it when there are no parentheses: ``"<(aaa)^{n}>"``,
    ``"x^{n}'"``, ``"0.(0.0a.)^{n}\\x00"``.  Backslash escapes (``\\xHH``,
    ``\\0``, ``\\n``, ``\\(``, ...) are resolved after splitting.
    """

    prefix: bytes
    unit: bytes
    suffix: bytes

    @classmethod
    def parse(cls, text: str) -> "InputTemplate":
        if text.count(_MARKER) != 1:
            raise ValueError("template needs exactly one ^{n} marker")
        head, tail = text.split(_MARKER)
        if head.endswith(")") and not head.endswith("\\)"):
            depth = 0
            for k in range(len(head) - 1, -1, -1):
                if head[k] == ")" and (k == 0 or head[k - 1] != "\\"):
                    depth += 1
                elif head[k] == "(" and (k == 0 or head[k - 1] != "\\"):
                    depth -= 1
                    if depth == 0:
                        return cls(_unescape(head[:k]), _unescape(head[k + 1:-1]), _unescape(tail))
            raise ValueError("unbalanced parentheses in template")
        if not head:
            raise ValueError("nothing to repeat before ^{n}")
        # a single (possibly escaped) character
        cut = len(head) - 1
        if cut >= 1 and head[cut - 1] == "\\":
            cut -= 1
        elif cut >= 3 and head[cut - 3:cut - 1] == "\\x":
            cut -= 3
        return cls(_unescape(head[:cut]), _unescape(head[cut:]), _unescape(tail))

    def expand(self, n: int) -> bytes:
        return self.prefix + self.unit * n + self.suffix


@dataclass
class BenchRow:
    n: int
    engine: str
    mean_us: float | None
    calls: int | None
    memo_entries: int | None

    @property
    def memo_bytes(self) -> int | None:
        return None if self.memo_entries is None else self.memo_entries * MEMO_ENTRY_BYTES

    @property
    def over_budget(self) -> bool:
        return self.calls is None

    def cells(self) -> list:
        if self.over_budget:
            return [self.n, self.engine, "", "budget_exceeded", "", ""]
        return [self.n, self.engine, f"{self.mean_us:.1f}", self.calls,
                self.memo_entries, self.memo_bytes]


def sweep(nfa: Nfa, template: InputTemplate, n_values, engines, repetitions: int = 10,
          budget: int | None = None, start: int = 0, backend: str | None = None) -> list:
    """One row per (n, engine): a discarded warm-up, then ``repetitions`` timed runs."""
    n_values = list(n_values)
    if any(b <= a for a, b in zip(n_values, n_values[1:])):
        raise ValueError("n values must be strictly increasing")
    rows = []
    for n in n_values:
        w = template.expand(n)
        for engine in engines:
            try:
                outcome = match(nfa, w, engine, start, budget=budget, backend=backend)
            except BudgetExceeded:
                rows.append(BenchRow(n, engine, None, None, None))
                continue
            total = 0
            for _ in range(repetitions):
                t0 = time.perf_counter_ns()
                match(nfa, w, engine, start, budget=budget, backend=backend)
                total += time.perf_counter_ns() - t0
            mean_us = total / max(repetitions, 1) / 1000.0
            rows.append(BenchRow(n, engine, mean_us, outcome.stats.recursive_calls,
                                 outcome.stats.memo_entries))
    return rows


def rows_to_csv(rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for row in rows:
        writer.writerow(row.cells())
    return buf.getvalue()


def r_squared(xs, ys) -> float:
    """Coefficient of determination of the least-squares line through the points."""
    if len(set(ys)) == 1:
        return 1.0
    return statistics.correlation(xs, ys) ** 2


# Real-world patterns prone to catastrophic backtracking, each paired with
# the input family that triggers it.  The ``s`` flag of the first pattern
# (dot matches newline) is spelled out as ``[\x00-\xff]``.
REDOS_CASES = {
    "r1": (
        r"^(?=^[\x00-\xff]{1,254}$)(^(?:(?!\.|-)([a-z0-9\-\*]{1,63}|([a-z0-9\-]{1,62}[a-z0-9]))\.)+"
        r"(?:[a-z]{2,})$)$",
        r"0.(0.0a.)^{n}\x00",
    ),
    "r2": (r"(?=(?:[^\']*\'[^\']*\')*(?![^\']*\'))", "x^{n}'"),
    "r3": (
        r"(?<=[\w\s](?:[\.\!\? ]+[\x20]*[\x22\xBB]*))(?:\s+(?![\x22\xBB](?!\w)))",
        '"^{n} ',
    ),
    "r4": (
        r"(?:(<)\s*?(\w+)(\s*?(?>(?!=[\/\?]?>)(\w+)(?:\s*(=)\s*)((?:\'[^\']*\'|\"[^\"]*\"|[^ >]+))))"
        r"\s*?([\/\?]?>))",
        "<(aaa)^{n}>",
    ),
}
