"""Public matching API: engine dispatch and backend selection.

The compiled kernel is used when it imports and the memo table fits the
dense-array limit; otherwise the pure-Python kernels run.  Set
``REGMEMO_BACKEND=python`` to force the fallback.
"""

from __future__ import annotations

import os

from . import engines as py
from .automaton import LOOKAROUND_KINDS, Nfa
from .errors import BudgetExceeded, UnsupportedAutomaton
from .results import (
    Failure,
    FailureAt,
    MatchOutcome,
    RunStats,
    Success,
    SuccessAt,
    SuccessAtWithKeys,
)

try:
    from . import _kernel as _native
except ImportError:  # no compiler at install time
    _native = None

AVAILABLE_BACKENDS = ("python",) + (("cython",) if _native is not None else ())
DEFAULT_BACKEND = (
    "python" if _native is None or os.environ.get("REGMEMO_BACKEND") == "python" else "cython"
)
# largest |P| * (|w| + 1) the compiled kernel allocates densely
DENSE_LIMIT = 1 << 26

ENGINES = ("backtrack", "memo", "memo-la", "memo-at", "memo-la-at",
           "enter-la", "enter-at", "exit-la")
# engines that evaluate each (state, position) at most once
LINEAR_ENGINES = frozenset(("memo", "memo-la", "memo-at", "memo-la-at", "enter-la", "enter-at"))
CORRECT_ENGINES = frozenset(("backtrack", "memo", "memo-la", "memo-at", "memo-la-at", "exit-la"))

_ALLOWED_KINDS = {
    "backtrack": None,
    "memo": frozenset(),
    "memo-la": LOOKAROUND_KINDS,
    "memo-at": frozenset(("at",)),
    "memo-la-at": None,
    "enter-la": LOOKAROUND_KINDS,
    "enter-at": frozenset(("at",)),
    "exit-la": LOOKAROUND_KINDS,
}

SHADOW_BUDGET = 1_000_000


def supports(engine: str, nfa: Nfa) -> bool:
    allowed = _ALLOWED_KINDS[engine]
    return allowed is None or nfa.sub_kinds <= allowed


def _choose_backend(backend: str | None, nfa: Nfa, w: bytes) -> str:
    chosen = backend or DEFAULT_BACKEND
    if chosen == "cython":
        if _native is None:
            raise ValueError("compiled backend is not available")
        if nfa.size * (len(w) + 1) > DENSE_LIMIT and backend is None:
            return "python"
    elif chosen != "python":
        raise ValueError(f"unknown backend {chosen!r}")
    return chosen


def _unpack_keys(raw_keys, width: int) -> tuple:
    return tuple(divmod(k, width) for k in raw_keys)


class _Shadow:
    """Recompute every memo hit from scratch and compare with the stored entry.

    A stored Success, or a failure recorded below the state's own depth,
    must correspond to a local success from that state; a plain failure, or
    one recorded at the state's own depth, to a local failure.
    """

    def __init__(self, prog, w: bytes, stats: RunStats):
        self.prog = prog
        self.w = w
        self.stats = stats

    def __call__(self, q: int, i: int, kind: int, val: int) -> None:
        if kind == py.SUCC:
            expect_success = True
        else:
            expect_success = val < self.prog.depth[q]
        try:
            got = py.run_plain(self.prog, self.w, i, budget=SHADOW_BUDGET, initial=q)
        except BudgetExceeded:
            return
        self.stats.shadow_checks += 1
        if (got[0] == py.SAT) != expect_success:
            stored = "Success" if kind == py.SUCC else f"Failure({val})"
            self.stats.shadow_mismatches.append((q, i, stored, got[0] == py.SAT))


def match(nfa: Nfa, w, engine: str = "memo-la-at", start: int = 0,
          budget: int | None = None, backend: str | None = None,
          shadow: bool = False) -> MatchOutcome:
    """Run ``engine`` on ``w`` from position ``start``.

    ``shadow`` forces the Python backend and re-derives every memo hit.
    """
    if engine not in ENGINES:
        raise ValueError(f"unknown engine {engine!r}")
    if isinstance(w, str):
        w = w.encode("utf-8")
    w = bytes(w)
    if not 0 <= start <= len(w):
        raise ValueError(f"start position {start} outside 0..{len(w)}")
    if not supports(engine, nfa):
        raise UnsupportedAutomaton(
            f"{engine} does not support sub-automata of kind "
            f"{', '.join(sorted(nfa.sub_kinds - (_ALLOWED_KINDS[engine] or frozenset())))}")
    prog = nfa.program()
    chosen = "python" if shadow else _choose_backend(backend, nfa, w)
    stats = RunStats(backend=chosen)
    on_hit = _Shadow(prog, w, stats) if shadow else None
    width = len(w) + 1

    if engine in ("backtrack", "memo", "exit-la", "enter-la", "enter-at"):
        record = {"backtrack": py.RECORD_NONE, "memo": py.RECORD_EXIT,
                  "exit-la": py.RECORD_EXIT}.get(engine, py.RECORD_ENTER)
        if chosen == "python":
            raw = py.run_plain(prog, w, start, record, budget, on_hit=on_hit)
        else:
            raw = _native.run_plain(prog, w, start, record, budget)
        kind, val, *counters = raw
        result = SuccessAt(val) if kind == py.SAT else Failure()
    elif engine == "memo-la":
        if chosen == "python":
            raw = py.run_la(prog, w, start, budget, on_hit=on_hit)
        else:
            raw = _native.run_la(prog, w, start, budget)
        kind, val, *counters = raw
        result = {py.SAT: SuccessAt(val), py.SUCC: Success(), py.FAIL: Failure()}[kind]
    else:
        if chosen == "python":
            raw = py.run_la_at(prog, w, start, budget, on_hit=on_hit)
        else:
            raw = _native.run_la_at(prog, w, start, budget)
        kind, val, keys, *counters = raw
        if kind == py.SAT:
            result = SuccessAtWithKeys(val, _unpack_keys(keys, width))
        elif kind == py.SUCC:
            result = Success()
        else:
            result = FailureAt(val)
    (stats.recursive_calls, stats.memo_hits, stats.memo_writes,
     stats.memo_entries, stats.peak_stack_depth) = counters
    return MatchOutcome(result, stats)


def _engine_function(engine: str):
    def run(nfa: Nfa, w, start: int = 0, budget: int | None = None,
            backend: str | None = None, shadow: bool = False) -> MatchOutcome:
        return match(nfa, w, engine, start, budget, backend, shadow)
    run.__name__ = "match_" + engine.replace("-", "_")
    run.__doc__ = f"Run the {engine} engine; see :func:`match`."
    return run


match_backtrack = _engine_function("backtrack")
memo_match = _engine_function("memo")
memo_match_la = _engine_function("memo-la")
memo_match_at = _engine_function("memo-at")
memo_match_la_at = _engine_function("memo-la-at")
memo_match_enter_la = _engine_function("enter-la")
memo_match_enter_at = _engine_function("enter-at")
memo_match_exit_la = _engine_function("exit-la")


def call_bound(nfa: Nfa, w) -> int:
    """Upper bound on recursive calls of a linear engine: #in * |P| * (|w| + 1)."""
    return nfa.in_degree.maximum * nfa.size * (len(w) + 1)
