"""The compiled kernel and the pure-Python kernel must be indistinguishable."""

import pytest

from regmemo import compile_ast, compile_pattern, match
from regmemo import matcher
from regmemo.harness import FuzzConfig, generate_case
from regmemo.matcher import ENGINES, supports

pytestmark = pytest.mark.skipif("cython" not in matcher.AVAILABLE_BACKENDS,
                                reason="compiled kernel not built")


def _same(nfa, w, engine, start=0):
    try:
        py = match(nfa, w, engine, start, backend="python", budget=10**5)
    except matcher.BudgetExceeded:
        with pytest.raises(matcher.BudgetExceeded):
            match(nfa, w, engine, start, backend="cython", budget=10**5)
        return
    cy = match(nfa, w, engine, start, backend="cython", budget=10**5)
    assert py.result == cy.result
    assert py.stats.counters() == cy.stats.counters()


def test_parity_on_generated_cases():
    config = FuzzConfig(seed=3, cases=1500, engines=tuple(ENGINES), max_ast_depth=5)
    for k in range(config.cases):
        tree, w, start = generate_case(config, k)
        nfa = compile_ast(tree)
        for engine in ENGINES:
            if supports(engine, nfa):
                _same(nfa, w, engine, start)


@pytest.mark.parametrize("pattern, w", [
    ("(a|a)*b", "a" * 200 + "c"),
    ("((?=a*)a)*", "a" * 150),
    ("a*(?>a*)ab", "a" * 150 + "b"),
    ("()*a", "aaa"),
    ("(?<=(?>a|ab))c", "abc"),
    ("((?!b)(?>a|ab)*)*c", "abababc"),
])
def test_parity_on_fixed_patterns(pattern, w):
    nfa = compile_pattern(pattern)
    for engine in ENGINES:
        if supports(engine, nfa):
            _same(nfa, w, engine)


def test_budget_raises_on_both():
    nfa = compile_pattern("(a|a)*b")
    for backend in ("python", "cython"):
        with pytest.raises(matcher.BudgetExceeded):
            match(nfa, "a" * 40 + "c", "backtrack", budget=5000, backend=backend)


def test_large_tables_fall_back_to_python(monkeypatch):
    monkeypatch.setattr(matcher, "DENSE_LIMIT", 10)
    nfa = compile_pattern("a*")
    assert match(nfa, "aaaa").stats.backend == "python"
    assert match(nfa, "aaaa", backend="cython").stats.backend == "cython"


def test_default_backend_is_compiled():
    assert matcher.DEFAULT_BACKEND in ("cython", "python")
    assert match(compile_pattern("a"), "a").stats.backend == matcher.DEFAULT_BACKEND


def test_backend_benchmark_script_runs(tmp_path):
    import importlib.util
    import pathlib

    path = pathlib.Path(__file__).parent.parent / "benchmarks" / "compare_backends.py"
    spec = importlib.util.spec_from_file_location("compare_backends", path)
    module = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(module)
    out = tmp_path / "cmp.csv"
    assert module.main(["--repetitions", "1", "--csv", str(out)]) == 0
    assert out.read_text().startswith("pattern,n,engine,calls,python_ms,cython_ms")
