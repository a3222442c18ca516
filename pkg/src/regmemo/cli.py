"""Command-line front end: ``regmemo match|bench|inspect|fuzz``.

Exit codes: 0 match (or clean fuzz run), 1 no match (or findings), 2 usage
or compile error, 3 call budget exhausted.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time

from . import matcher
from .automaton import compile_pattern, dump_dot, dump_text
from .bench import MEMO_ENTRY_BYTES, InputTemplate, rows_to_csv, sweep
from .errors import BudgetExceeded, PatternSyntaxError, UnsupportedAutomaton
from .harness import DEFAULT_ENGINES, FuzzConfig, run_differential
from .results import SuccessAt

EXIT_MATCH, EXIT_NO_MATCH, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3

DEFAULT_ORACLE_BUDGET = 100_000_000
DEFAULT_FUZZ_ORACLE_BUDGET = 1_000_000
BUDGET_ENV = "REGEX_MEMO_BUDGET"


def _env_budget(default: int) -> int:
    raw = os.environ.get(BUDGET_ENV)
    if not raw:
        return default
    try:
        return int(raw)
    except ValueError:
        raise SystemExit(f"regmemo: {BUDGET_ENV} must be an integer, got {raw!r}") from None


def _engine_budget(engine: str, explicit: int | None) -> int | None:
    """Memoized engines are linear and run unbounded unless asked otherwise."""
    if explicit is not None:
        return explicit
    return _env_budget(DEFAULT_ORACLE_BUDGET) if engine == "backtrack" else None


def _fail(message: str) -> int:
    print(f"regmemo: {message}", file=sys.stderr)
    return EXIT_USAGE


def _compile(pattern: str):
    try:
        return compile_pattern(pattern), None
    except PatternSyntaxError as exc:
        caret = " " * exc.offset + "^"
        return None, f"{exc}\n  {pattern}\n  {caret}"


def _engine_list(text: str) -> tuple:
    names = tuple(e.strip() for e in text.split(",") if e.strip())
    bad = [e for e in names if e not in matcher.ENGINES]
    if bad:
        raise argparse.ArgumentTypeError(f"unknown engine(s): {', '.join(bad)}")
    return names


def _n_list(text: str) -> list:
    """``1000,2000`` or ``10..20`` (inclusive) or a mix of both."""
    out = []
    for part in (p.strip() for p in text.split(",")):
        if not part:
            continue
        if ".." in part:
            lo, hi = part.split("..", 1)
            out.extend(range(int(lo), int(hi) + 1))
        else:
            out.append(int(part))
    return out


# ---------------------------------------------------------------------------
# match

def cmd_match(args) -> int:
    if args.input_file is not None:
        with open(args.input_file, "rb") as fh:
            w = fh.read()
    elif args.input is not None:
        w = args.input.encode("utf-8")
    else:
        return _fail("match needs an INPUT argument or --input-file")
    nfa, err = _compile(args.pattern)
    if err:
        return _fail(err)
    budget = _engine_budget(args.engine, args.budget)
    t0 = time.perf_counter_ns()
    try:
        outcome = matcher.match(nfa, w, args.engine, args.pos, budget=budget,
                                backend=args.backend)
    except BudgetExceeded as exc:
        print(f"regmemo: call budget of {exc.budget} exhausted", file=sys.stderr)
        return EXIT_BUDGET
    except (UnsupportedAutomaton, ValueError) as exc:
        return _fail(str(exc))
    elapsed_us = (time.perf_counter_ns() - t0) // 1000
    result = outcome.public
    ok = isinstance(result, SuccessAt)
    stats = outcome.stats
    record = {
        "result": "success" if ok else "failure",
        "position": result.position if ok else None,
        "calls": stats.recursive_calls,
        "memoEntries": stats.memo_entries,
        "memoBytesEstimate": stats.memo_entries * MEMO_ENTRY_BYTES,
        "wallTimeMicros": elapsed_us,
    }
    if args.json:
        print(json.dumps(record))
    else:
        print(f"success at {result.position}" if ok else "failure")
        if args.stats:
            print(f"engine {args.engine} backend {stats.backend}")
            print(f"calls {stats.recursive_calls}")
            print(f"memo_hits {stats.memo_hits}")
            print(f"memo_writes {stats.memo_writes}")
            print(f"memo_entries {stats.memo_entries}")
            print(f"memo_bytes {record['memoBytesEstimate']}")
            print(f"peak_stack {stats.peak_stack_depth}")
            print(f"wall_us {elapsed_us}")
    return EXIT_MATCH if ok else EXIT_NO_MATCH


# ---------------------------------------------------------------------------
# bench

def cmd_bench(args) -> int:
    nfa, err = _compile(args.pattern)
    if err:
        return _fail(err)
    try:
        template = InputTemplate.parse(args.template)
        n_values = _n_list(args.n)
    except ValueError as exc:
        return _fail(str(exc))
    engines = args.engine
    for e in engines:
        if not matcher.supports(e, nfa):
            return _fail(f"{e} does not support this pattern")
    # budgets differ per engine, so sweep one engine at a time and interleave
    per_engine = {}
    try:
        for e in engines:
            per_engine[e] = sweep(nfa, template, n_values, (e,), args.repetitions,
                                  budget=_engine_budget(e, args.budget), start=args.pos,
                                  backend=args.backend)
    except ValueError as exc:
        return _fail(str(exc))
    rows = [per_engine[e][k] for k in range(len(n_values)) for e in engines]
    text = rows_to_csv(rows)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_BUDGET if any(r.over_budget for r in rows) else EXIT_MATCH


# ---------------------------------------------------------------------------
# inspect

def cmd_inspect(args) -> int:
    nfa, err = _compile(args.pattern)
    if err:
        return _fail(err)
    if args.format == "text":
        sys.stdout.write(dump_text(nfa))
    else:
        sys.stdout.write(f"// states {nfa.size}\n// depth {nfa.depth.maximum}\n"
                         f"// indegree {nfa.in_degree.maximum}\n"
                         f"// eps_loop {'yes' if nfa.has_eps_loop else 'no'}\n")
        sys.stdout.write(dump_dot(nfa))
    return EXIT_MATCH


# ---------------------------------------------------------------------------
# fuzz

def cmd_fuzz(args) -> int:
    corpus = tuple(args.pattern or ())
    for p in corpus:
        _, err = _compile(p)
        if err:
            return _fail(err)
    oracle_budget = args.oracle_budget
    if oracle_budget is None:
        oracle_budget = _env_budget(DEFAULT_FUZZ_ORACLE_BUDGET)
    config = FuzzConfig(
        seed=args.seed, cases=args.cases, max_ast_depth=args.max_depth,
        max_star_nesting=args.max_star_nesting, alphabet=args.alphabet,
        max_input_len=args.max_input_len, oracle_budget=oracle_budget,
        engines=args.engines, corpus=corpus, shrink=not args.no_shrink,
        workers=args.workers,
    )
    report = run_differential(config)
    text = report.to_json()
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    print(text)
    return EXIT_MATCH if report.clean else EXIT_NO_MATCH


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="regmemo",
        description="Memoized backtracking regex matching with look-around and atomic groups.")
    verbs = parser.add_subparsers(dest="verb", required=True)
    backends = ("python", "cython")

    m = verbs.add_parser("match", help="match a pattern against one input")
    m.add_argument("pattern")
    m.add_argument("input", nargs="?")
    m.add_argument("--input-file", metavar="PATH")
    m.add_argument("--engine", choices=matcher.ENGINES, default="memo-la-at")
    m.add_argument("--pos", type=int, default=0, help="start position (byte offset)")
    m.add_argument("--json", action="store_true", help="print one JSON object")
    m.add_argument("--stats", action="store_true", help="print run counters")
    m.add_argument("--budget", type=int, help="maximum number of recursive calls")
    m.add_argument("--backend", choices=backends)
    m.set_defaults(run=cmd_match)

    b = verbs.add_parser("bench", help="sweep an input family and write CSV")
    b.add_argument("pattern")
    b.add_argument("template", help="input family such as \"a^{n}c\" or \"<(aaa)^{n}>\"")
    b.add_argument("--n", required=True, help="n values: 1000,2000 or 10..20")
    b.add_argument("--engine", type=_engine_list, default=("memo-la-at",),
                   help="comma-separated engines")
    b.add_argument("--repetitions", type=int, default=10)
    b.add_argument("--pos", type=int, default=0)
    b.add_argument("--budget", type=int)
    b.add_argument("--backend", choices=backends)
    b.add_argument("--out", metavar="CSV")
    b.set_defaults(run=cmd_bench)

    i = verbs.add_parser("inspect", help="dump the compiled automaton")
    i.add_argument("pattern")
    i.add_argument("--format", choices=("text", "dot"), default="text")
    i.set_defaults(run=cmd_inspect)

    f = verbs.add_parser("fuzz", help="differential fuzzing against backtracking")
    f.add_argument("--seed", type=int, default=0)
    f.add_argument("--cases", type=int, default=1000)
    f.add_argument("--engines", type=_engine_list, default=DEFAULT_ENGINES)
    f.add_argument("--max-depth", type=int, default=4)
    f.add_argument("--max-star-nesting", type=int, default=2)
    f.add_argument("--alphabet", default="ab")
    f.add_argument("--max-input-len", type=int, default=12)
    f.add_argument("--oracle-budget", type=int)
    f.add_argument("--workers", type=int, default=1)
    f.add_argument("--pattern", action="append", metavar="PATTERN",
                   help="fuzz this pattern instead of random ones (repeatable)")
    f.add_argument("--no-shrink", action="store_true")
    f.add_argument("--out", metavar="JSON")
    f.set_defaults(run=cmd_fuzz)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.verb == "match" and args.input is not None and args.input_file is not None:
        return _fail("give either INPUT or --input-file, not both")
    try:
        return args.run(args)
    except OSError as exc:
        return _fail(str(exc))


if __name__ == "__main__":
    sys.exit(main())
