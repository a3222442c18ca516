"""Time the pure-Python kernels against the compiled kernel.

    python benchmarks/compare_backends.py [--repetitions 5] [--csv out.csv]

Each workload runs once to warm up, then ``repetitions`` times per backend;
the table reports mean wall time and the speed-up of the compiled kernel.
Call counts are compared too, since both backends must do identical work.
"""

import argparse
import csv
import sys
import time

from regmemo import compile_pattern, match
from regmemo.bench import REDOS_CASES, InputTemplate
from regmemo.matcher import AVAILABLE_BACKENDS

WORKLOADS = [
    ("(a|a)*b", "a^{n}c", 20_000, "memo"),
    ("(a|a)*b", "a^{n}c", 16, "backtrack"),
    ("((?=a*)a)*", "a^{n}", 5_000, "memo-la"),
    ("((?=a*)a)*", "a^{n}", 5_000, "memo-la-at"),
    ("a*(?>a*)ab", "a^{n}b", 20_000, "memo-at"),
    (REDOS_CASES["r1"][0], REDOS_CASES["r1"][1], 50, "memo-la-at"),
    (REDOS_CASES["r2"][0], REDOS_CASES["r2"][1], 8_000, "memo-la-at"),
    (REDOS_CASES["r4"][0], REDOS_CASES["r4"][1], 8_000, "memo-la-at"),
]


def timed(nfa, w, engine, backend, repetitions):
    out = match(nfa, w, engine, backend=backend)
    t0 = time.perf_counter_ns()
    for _ in range(repetitions):
        match(nfa, w, engine, backend=backend)
    return (time.perf_counter_ns() - t0) / repetitions / 1e6, out.stats.recursive_calls


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repetitions", type=int, default=5)
    parser.add_argument("--csv", metavar="PATH")
    args = parser.parse_args(argv)
    if "cython" not in AVAILABLE_BACKENDS:
        print("compiled kernel not built; nothing to compare", file=sys.stderr)
        return 1
    rows = []
    header = f"{'pattern':<28} {'n':>6} {'engine':<11} {'calls':>9} {'python ms':>10} {'cython ms':>10} {'speed-up':>8}"
    print(header)
    print("-" * len(header))
    for pattern, template, n, engine in WORKLOADS:
        nfa = compile_pattern(pattern)
        w = InputTemplate.parse(template).expand(n)
        py_ms, py_calls = timed(nfa, w, engine, "python", args.repetitions)
        cy_ms, cy_calls = timed(nfa, w, engine, "cython", args.repetitions)
        if py_calls != cy_calls:
            print(f"call counts differ on {pattern!r}: {py_calls} vs {cy_calls}", file=sys.stderr)
            return 1
        label = pattern if len(pattern) <= 28 else pattern[:25] + "..."
        print(f"{label:<28} {n:>6} {engine:<11} {py_calls:>9} {py_ms:>10.2f} {cy_ms:>10.2f} "
              f"{py_ms / cy_ms:>7.1f}x")
        rows.append((pattern, n, engine, py_calls, f"{py_ms:.3f}", f"{cy_ms:.3f}"))
    if args.csv:
        with open(args.csv, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(("pattern", "n", "engine", "calls", "python_ms", "cython_ms"))
            writer.writerows(rows)
    return 0


if __name__ == "__main__":
    sys.exit(main())
