import pytest
from hypothesis import given, settings, strategies as st

from regmemo import syntax as ast
from regmemo.errors import LimitExceeded, PatternSyntaxError, UnsupportedFeature
from regmemo.syntax import (
    ALL_BYTES, Alt, AtomicGroup, Concat, Empty, Literal, NegLookahead, NegLookbehind,
    PosLookahead, PosLookbehind, Star, ast_size, parse, to_pattern,
)

a, b, c = Literal.of("a"), Literal.of("b"), Literal.of("c")


@pytest.mark.parametrize("pattern, tree", [
    ("(a|a)*b", Concat(Star(Alt(a, a)), b)),
    ("", Empty()),
    ("(?>(a|ab))c", Concat(AtomicGroup(Alt(a, Concat(a, b))), c)),
    ("a*+", AtomicGroup(Star(a))),
    ("a?", Alt(a, Empty())),
    ("a??", Alt(Empty(), a)),
    ("a+", Concat(a, Star(a))),
    ("a*?", Star(a, greedy=False)),
    ("a{2}", Concat(a, a)),
    ("a{1,2}", Concat(a, Alt(a, Empty()))),
    ("a{2,}", ast.concat_all([a, a, Star(a)])),
    ("(?=a)", PosLookahead(a)),
    ("(?!a)", NegLookahead(a)),
    ("(?<=a)", PosLookbehind(a)),
    ("(?<!a)", NegLookbehind(a)),
    ("^", NegLookbehind(Literal(ALL_BYTES))),
    ("$", NegLookahead(Literal(ALL_BYTES))),
    ("(?:a)", a),
    ("(?P<x>a)", a),
    ("(?<x>a)", a),
    ("[ab]", Literal.of("ab")),
    ("[^a]", Literal(ALL_BYTES - {ord("a")})),
    ("[a-c]", Literal.of("abc")),
    ("[]", Literal(frozenset())),
    (r"\x41", Literal.of("A")),
    (r"\.", Literal.of(".")),
    (".", Literal(ALL_BYTES - {0x0A})),
    ("a|b|c", Alt(a, Alt(b, c))),
])
def test_parse_examples(pattern, tree):
    assert parse(pattern) == tree


def test_shorthand_classes():
    assert parse(r"\d") == Literal.of("0123456789")
    assert ord("_") in parse(r"\w").symbols
    assert parse(r"\S").symbols == ALL_BYTES - parse(r"\s").symbols
    assert parse(r"[\d_]").symbols == frozenset(b"0123456789_")


def test_non_ascii_outside_class_is_byte_sequence():
    assert parse("é") == Concat(Literal.of(0xC3), Literal.of(0xA9))


@pytest.mark.parametrize("tree, size", [
    (a, 1),
    (Alt(a, a), 3),
    (AtomicGroup(Star(a)), 3),
    (Empty(), 1),
    (Concat(Star(Alt(a, a)), b), 6),
])
def test_ast_size(tree, size):
    assert ast_size(tree) == size


@pytest.mark.parametrize("pattern, offset, cls", [
    ("(a", 0, PatternSyntaxError),
    ("a)", 1, PatternSyntaxError),
    ("*a", 0, PatternSyntaxError),
    ("a**", 2, PatternSyntaxError),
    ("[ab", 0, PatternSyntaxError),
    ("a{3,1}", 1, PatternSyntaxError),
    ("[z-a]", 1, PatternSyntaxError),
    ("ab\\", 2, PatternSyntaxError),
    (r"(a)\1", 3, UnsupportedFeature),
    (r"\bfoo", 0, UnsupportedFeature),
    (r"\p{L}", 0, UnsupportedFeature),
    ("(?i)a", 0, UnsupportedFeature),
    ("(?P=x)", 0, UnsupportedFeature),
    ("[é]", 1, UnsupportedFeature),
    ("(?Xa)", 0, PatternSyntaxError),
    (r"\q", 0, PatternSyntaxError),
])
def test_parse_errors_report_offsets(pattern, offset, cls):
    with pytest.raises(cls) as info:
        parse(pattern)
    assert info.value.offset == offset


def test_counted_repetition_budget():
    parse("a{1000}")
    with pytest.raises(LimitExceeded):
        parse("a{20000}")
    with pytest.raises(LimitExceeded):
        parse("(abc){10}", node_budget=20)


def test_reverse_swaps_concatenation_but_not_nested_lookaround():
    tree = Concat(a, Concat(b, PosLookahead(Concat(a, b))))
    assert ast.reverse(tree) == Concat(Concat(PosLookahead(Concat(a, b)), b), a)


def test_walk_is_preorder():
    tree = Concat(Alt(a, b), c)
    assert list(ast.walk(tree)) == [tree, Alt(a, b), a, b, c]


# -- round trip through the printer

_leaf = st.one_of(
    st.just(Empty()),
    st.frozensets(st.integers(0, 255), max_size=4).map(Literal),
    st.sampled_from([Literal(ALL_BYTES), Literal(ALL_BYTES - {10})]),
)


def _extend(inner):
    return st.one_of(
        st.tuples(inner, inner).map(lambda p: Alt(*p)),
        st.tuples(inner, inner).map(lambda p: Concat(*p)),
        st.tuples(inner, st.booleans()).map(lambda p: Star(*p)),
        *[inner.map(t) for t in ast.EXTENSION_TYPES],
    )


trees = st.recursive(_leaf, _extend, max_leaves=12)


@settings(max_examples=300, deadline=None)
@given(trees)
def test_printer_round_trip(tree):
    assert parse(to_pattern(tree)) == tree


@settings(max_examples=200, deadline=None)
@given(st.text(alphabet="ab()|*+?{}[]^$.\\=!<>:,0123", max_size=12))
def test_parser_total(pattern):
    """Any text either parses or raises a syntax error with an in-range offset."""
    try:
        tree = parse(pattern)
    except PatternSyntaxError as exc:
        assert 0 <= exc.offset <= len(pattern.encode())
    else:
        assert ast_size(tree) >= 1
