"""Engines against the tree-walking oracle, plus the structural invariants."""

from hypothesis import assume, given, settings, strategies as st

from regmemo import Success, SuccessAt, call_bound, compile_ast, match
from regmemo import syntax as ast
from regmemo.matcher import CORRECT_ENGINES, LINEAR_ENGINES, supports

from reference import reference_match

_lit = st.sampled_from([ast.Literal.of("a"), ast.Literal.of("b"), ast.Literal.of("ab")])
_leaf = st.one_of(_lit, _lit, st.just(ast.Empty()))


def _extend(inner):
    return st.one_of(
        st.tuples(inner, inner).map(lambda p: ast.Alt(*p)),
        st.tuples(inner, inner).map(lambda p: ast.Concat(*p)),
        st.tuples(inner, st.booleans()).map(lambda p: ast.Star(*p)),
        *[inner.map(t) for t in ast.EXTENSION_TYPES],
    )


small_trees = st.recursive(_leaf, _extend, max_leaves=8)
inputs = st.binary(max_size=8).map(lambda b: bytes(b"ab"[x & 1] for x in b))


@settings(max_examples=600, deadline=None)
@given(small_trees, inputs, st.data())
def test_correct_engines_agree_with_oracle(tree, w, data):
    nfa = compile_ast(tree)
    assume(not nfa.has_eps_loop)
    start = data.draw(st.integers(0, len(w)))
    end = reference_match(tree, w, start)
    expected = SuccessAt(end) if end is not None else None
    for engine in sorted(CORRECT_ENGINES):
        if not supports(engine, nfa):
            continue
        out = match(nfa, w, engine, start, budget=10**6)
        got = out.public if isinstance(out.public, SuccessAt) else None
        assert got == expected, engine
        assert not isinstance(out.result, Success)


@settings(max_examples=400, deadline=None)
@given(small_trees, inputs)
def test_linear_engines_respect_bounds(tree, w):
    nfa = compile_ast(tree)
    bound = call_bound(nfa, w)
    for engine in sorted(LINEAR_ENGINES):
        if not supports(engine, nfa):
            continue
        stats = match(nfa, w, engine).stats
        assert stats.recursive_calls <= bound
        assert stats.memo_entries <= nfa.size * (len(w) + 1)


@settings(max_examples=300, deadline=None)
@given(small_trees, inputs)
def test_shadow_mode_finds_no_mismatch(tree, w):
    nfa = compile_ast(tree)
    assume(not nfa.has_eps_loop)
    for engine in ("memo-la", "memo-at", "memo-la-at"):
        if supports(engine, nfa):
            stats = match(nfa, w, engine, shadow=True).stats
            assert stats.shadow_mismatches == []


@settings(max_examples=200, deadline=None)
@given(small_trees, inputs)
def test_matching_is_deterministic(tree, w):
    nfa = compile_ast(tree)
    first = match(nfa, w, "memo-la-at")
    again = match(compile_ast(tree), w, "memo-la-at")
    assert first.result == again.result
    assert first.stats.counters() == again.stats.counters()
