"""Acceptance criteria, each checked at its stated tolerance.

Every test records one PASS/FAIL line; the lines are printed in the
terminal summary (see conftest.py) and on stdout when this file is run
as a script.
"""

import time

import pytest

from regmemo import BudgetExceeded, Failure, SuccessAt, compile_pattern, match
from regmemo.bench import REDOS_CASES, InputTemplate, r_squared, sweep
from regmemo.harness import FuzzConfig, generate_case, run_differential
from regmemo import compile_ast
from regmemo.matcher import supports

RESULTS = []


def record(name, ok, detail):
    RESULTS.append(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
    assert ok, detail


@pytest.fixture(scope="module")
def consistency_report():
    config = FuzzConfig(seed=42, cases=20_000, engines=("memo", "memo-la", "memo-at", "memo-la-at"),
                        alphabet="ab", max_ast_depth=4, max_input_len=12)
    t0 = time.perf_counter()
    report = run_differential(config)
    return report, time.perf_counter() - t0


def test_1_consistency(consistency_report):
    report, seconds = consistency_report
    ok = (report.casesRun == 20_000 and not report.disagreements
          and not report.boundViolations and seconds < 300)
    record("1 consistency", ok,
           f"{report.casesRun} cases, {report.agreements} agree, {report.budgetSkips} skipped, "
           f"{len(report.disagreements)} disagreements, {len(report.boundViolations)} bound "
           f"violations, {seconds:.1f}s")


def test_2_linearity_bound(consistency_report):
    report, _ = consistency_report
    runs = sum(report.engineRuns.values())
    ok = not report.boundViolations and runs > 0
    record("2 linearity bound", ok,
           f"{runs} engine runs checked against #in*|P|*(|w|+1), "
           f"{len(report.boundViolations)} violations")


def test_3_catastrophic_backtracking():
    nfa = compile_pattern("(a|a)*b")
    bt = {n: match(nfa, "a" * n + "c", "backtrack").stats.recursive_calls for n in range(10, 21)}
    ratios = [bt[n + 1] / bt[n] for n in range(10, 20)]
    memo = {n: match(nfa, "a" * n + "c", "memo").stats.recursive_calls for n in (2000, 4000)}
    t0 = time.perf_counter()
    big = match(nfa, "a" * 100_000 + "c", "memo")
    seconds = time.perf_counter() - t0
    ok = (min(ratios) >= 1.8 and memo[4000] <= 2.5 * memo[2000] and seconds < 1.0
          and big.public == Failure())
    record("3 catastrophic backtracking", ok,
           f"backtrack min ratio {min(ratios):.3f}, memo calls(4000)/calls(2000) "
           f"{memo[4000] / memo[2000]:.3f}, memo at n=1e5 {seconds:.3f}s")


def test_4_lookahead_counterexample():
    nfa = compile_pattern("((?=a*)a)*")
    w = "a" * 100
    la = match(nfa, w, "memo-la").public
    la_at = match(nfa, w, "memo-la-at").public
    enter = match(nfa, w, "enter-la").public
    exit_ = match(nfa, w, "exit-la").public
    exit_calls = {n: match(nfa, "a" * n, "exit-la").stats.recursive_calls for n in (200, 400)}
    la_calls = {n: match(nfa, "a" * n, "memo-la").stats.recursive_calls for n in (200, 400)}
    exit_ratio = exit_calls[400] / exit_calls[200]
    la_ratio = la_calls[400] / la_calls[200]
    ok = (la == SuccessAt(100) and la_at == SuccessAt(100) and enter == SuccessAt(1)
          and exit_ == SuccessAt(100) and exit_ratio >= 3.5 and la_ratio <= 2.5)
    record("4 look-ahead counterexample", ok,
           f"memo-la {la}, memo-la-at {la_at}, enter-la {enter}, exit-la {exit_}, "
           f"exit-la ratio {exit_ratio:.3f}, memo-la ratio {la_ratio:.3f}")


def test_5_atomic_counterexamples():
    nfa = compile_pattern("a*(?>a*)ab")
    ns = list(range(21)) + [1000, 10_000]
    wrong = []
    at_calls = {}
    for n in ns:
        w = "a" * n + "b"
        for engine in ("backtrack", "memo-at", "memo-la-at"):
            out = match(nfa, w, engine)
            if out.public != Failure():
                wrong.append((engine, n))
            if engine == "memo-at":
                at_calls[n] = out.stats.recursive_calls
    fit = r_squared(ns, [at_calls[n] for n in ns])
    enter = match(nfa, "a" * 10 + "b", "enter-at").public
    group = match(compile_pattern("(?>(a|ab))c"), "abc", "memo-la-at").public
    plain = match(compile_pattern("(a|ab)c"), "abc", "memo").public
    group_bt = match(compile_pattern("(?>(a|ab))c"), "abc", "backtrack").public
    ok = (not wrong and fit >= 0.99 and enter == SuccessAt(11) and group == Failure()
          and group_bt == Failure() and plain == SuccessAt(3))
    record("5 atomic counterexamples", ok,
           f"non-failures {wrong}, memo-at calls R^2 {fit:.5f} "
           f"(calls(1e4)={at_calls[10_000]}), enter-at {enter}, (?>(a|ab))c {group}, (a|ab)c {plain}")


def _linear_fit(name, ns):
    pattern, template = REDOS_CASES[name]
    nfa = compile_pattern(pattern)
    t = InputTemplate.parse(template)
    rows = sweep(nfa, t, ns, ["memo-la-at"], repetitions=1)
    fit = r_squared(ns, [r.calls for r in rows])
    sized = all(r.memo_entries <= nfa.size * (len(t.expand(r.n)) + 1) for r in rows)
    return fit, sized


def test_6_real_world_growth_shape():
    t0 = time.perf_counter()
    ns = [1000, 2000, 4000, 8000]
    fits = {name: _linear_fit(name, ns) for name in ("r2", "r4")}

    pattern, template = REDOS_CASES["r1"]
    nfa = compile_pattern(pattern)
    t = InputTemplate.parse(template)
    r1_calls = {n: match(nfa, t.expand(n), "memo-la-at").stats.recursive_calls for n in range(5, 51)}
    r1_ratio = r1_calls[50] / r1_calls[5]
    exceeded_at = None
    for n in range(5, 41):
        try:
            match(nfa, t.expand(n), "backtrack", budget=10**7)
        except BudgetExceeded:
            exceeded_at = n
            break
    seconds = time.perf_counter() - t0
    ok = (all(f >= 0.99 and s for f, s in fits.values()) and r1_ratio <= 12
          and exceeded_at is not None and seconds < 120)
    record("6 real-world pattern growth", ok,
           f"R^2 r2 {fits['r2'][0]:.5f}, r4 {fits['r4'][0]:.5f}, memo bounds "
           f"{[s for _, s in fits.values()]}, r1 calls(50)/calls(5) {r1_ratio:.2f}, "
           f"r1 backtrack over 1e7 calls at n={exceeded_at}, {seconds:.1f}s")


def test_7_structural_invariants(consistency_report):
    report, _ = consistency_report
    kinds = sorted({v["check"] for v in report.invariantViolations})
    # every case compiled within the size bound and no run tripped the
    # write-once or depth checks (both raise inside the engines)
    ok = not report.invariantViolations
    record("7 structural invariants", ok,
           f"{report.casesRun} cases, {len(report.invariantViolations)} violations {kinds}")


def test_8_shadow_mode():
    config = FuzzConfig(seed=8, cases=1000, engines=("memo", "memo-la", "memo-at", "memo-la-at"))
    checks = mismatches = 0
    for k in range(config.cases):
        tree, w, start = generate_case(config, k)
        nfa = compile_ast(tree)
        for engine in config.engines:
            if not supports(engine, nfa):
                continue
            stats = match(nfa, w, engine, start, shadow=True).stats
            checks += stats.shadow_checks
            mismatches += len(stats.shadow_mismatches)
    ok = checks > 0 and mismatches == 0
    record("8 shadow-mode memo soundness", ok,
           f"{checks} memo hits re-derived, {mismatches} mismatches")


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-q"]))
