"""Regex syntax tree, parser, size function and printer.

The core tree has ten node kinds.  Everything else the surface syntax
offers (``+``, ``?``, counted repetition, possessive quantifiers, anchors,
shorthand classes) is rewritten into those ten by the parser.

Patterns are parsed over their UTF-8 bytes, so offsets in error messages
are byte offsets and a non-ASCII character outside a class becomes a
sequence of single-byte literals.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Union

from .errors import LimitExceeded, PatternSyntaxError, UnsupportedFeature

ALL_BYTES = frozenset(range(256))
DEFAULT_NODE_BUDGET = 10_000


@dataclass(frozen=True)
class Literal:
    symbols: frozenset

    @classmethod
    def of(cls, chars: Union[str, bytes, int]) -> "Literal":
        if isinstance(chars, int):
            return cls(frozenset([chars]))
        if isinstance(chars, str):
            chars = chars.encode("latin-1")
        return cls(frozenset(chars))

    def __repr__(self) -> str:
        if len(self.symbols) == 1:
            (b,) = self.symbols
            return f"Literal({chr(b)!r})" if 0x20 < b < 0x7F else f"Literal(0x{b:02x})"
        return f"Literal(<{len(self.symbols)} bytes>)"


@dataclass(frozen=True)
class Empty:
    pass


@dataclass(frozen=True)
class Alt:
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Concat:
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Star:
    inner: "Node"
    # A lazy star prefers leaving the loop; the core grammar only has greedy.
    greedy: bool = True


@dataclass(frozen=True)
class PosLookahead:
    inner: "Node"


@dataclass(frozen=True)
class NegLookahead:
    inner: "Node"


@dataclass(frozen=True)
class PosLookbehind:
    inner: "Node"


@dataclass(frozen=True)
class NegLookbehind:
    inner: "Node"


@dataclass(frozen=True)
class AtomicGroup:
    inner: "Node"


Node = Union[Literal, Empty, Alt, Concat, Star, PosLookahead, NegLookahead,
             PosLookbehind, NegLookbehind, AtomicGroup]

LOOKAROUND_TYPES = (PosLookahead, NegLookahead, PosLookbehind, NegLookbehind)
EXTENSION_TYPES = LOOKAROUND_TYPES + (AtomicGroup,)

# kind labels carried by Sub transitions
KIND_OF = {
    PosLookahead: "pla",
    NegLookahead: "nla",
    PosLookbehind: "plb",
    NegLookbehind: "nlb",
    AtomicGroup: "at",
}


def children(node: Node) -> tuple:
    if isinstance(node, (Alt, Concat)):
        return (node.left, node.right)
    if isinstance(node, (Star,) + EXTENSION_TYPES):
        return (node.inner,)
    return ()


def ast_size(node: Node) -> int:
    """Size of a tree: leaves count 1 and every operator adds 1."""
    total = 0
    stack = [node]
    while stack:
        n = stack.pop()
        total += 1
        stack.extend(children(n))
    return total


def walk(node: Node):
    """Yield every node of the tree in pre-order."""
    stack = [node]
    while stack:
        n = stack.pop()
        yield n
        stack.extend(reversed(children(n)))


def reverse(node: Node) -> Node:
    """Mirror a tree so it matches the reversed string.

    Concatenations swap their operands.  Nested look-around nodes are kept
    untouched since each look-around fixes its own scan direction.
    """
    if isinstance(node, Concat):
        return Concat(reverse(node.right), reverse(node.left))
    if isinstance(node, Alt):
        return Alt(reverse(node.left), reverse(node.right))
    if isinstance(node, Star):
        return Star(reverse(node.inner), node.greedy)
    if isinstance(node, AtomicGroup):
        return AtomicGroup(reverse(node.inner))
    return node


def concat_all(items: list) -> Node:
    """Concatenate a sequence as a balanced tree (keeps recursion shallow)."""
    if not items:
        return Empty()
    if len(items) == 1:
        return items[0]
    mid = len(items) // 2
    return Concat(concat_all(items[:mid]), concat_all(items[mid:]))


# ---------------------------------------------------------------------------
# parser

_DIGITS = frozenset(b"0123456789")
_WORD = frozenset(b"abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_")
_SPACE = frozenset(b" \t\n\r\f\v")
_SHORTHAND = {
    ord("d"): _DIGITS,
    ord("D"): ALL_BYTES - _DIGITS,
    ord("w"): _WORD,
    ord("W"): ALL_BYTES - _WORD,
    ord("s"): _SPACE,
    ord("S"): ALL_BYTES - _SPACE,
}
_CONTROL = {
    ord("n"): 0x0A,
    ord("t"): 0x09,
    ord("r"): 0x0D,
    ord("f"): 0x0C,
    ord("v"): 0x0B,
    ord("0"): 0x00,
}
_DOT = ALL_BYTES - {0x0A}
_QUANT_RE = re.compile(rb"\{(\d+)(,(\d*))?\}")
_NAME_RE = re.compile(rb"[A-Za-z_][A-Za-z0-9_]*")


def _begin_anchor() -> Node:
    return NegLookbehind(Literal(ALL_BYTES))


def _end_anchor() -> Node:
    return NegLookahead(Literal(ALL_BYTES))


class _Parser:
    def __init__(self, src: bytes, node_budget: int):
        self.src = src
        self.pos = 0
        self.budget = node_budget

    # -- helpers
    def error(self, msg: str, offset: int | None = None, cls=PatternSyntaxError):
        raise cls(msg, self.pos if offset is None else offset)

    def peek(self, k: int = 0) -> int | None:
        j = self.pos + k
        return self.src[j] if j < len(self.src) else None

    def startswith(self, s: bytes) -> bool:
        return self.src.startswith(s, self.pos)

    # -- grammar
    def parse(self) -> Node:
        node = self.alternation()
        if self.pos < len(self.src):
            # only a stray ')' can stop the top-level alternation early
            self.error("unbalanced parenthesis")
        return node

    def alternation(self) -> Node:
        branches = [self.sequence()]
        while self.peek() == ord("|"):
            self.pos += 1
            branches.append(self.sequence())
        node = branches[-1]
        for b in reversed(branches[:-1]):
            node = Alt(b, node)
        return node

    def sequence(self) -> Node:
        items = []
        while True:
            c = self.peek()
            if c is None or c in b"|)":
                break
            start = self.pos
            atom = self.atom()
            items.append(self.quantified(atom, start))
        return concat_all(items)

    def quantified(self, atom: Node, start: int) -> Node:
        c = self.peek()
        if c is None:
            return atom
        lo: int
        hi: int | None
        qstart = self.pos
        if c == ord("*"):
            lo, hi = 0, None
            self.pos += 1
        elif c == ord("+"):
            lo, hi = 1, None
            self.pos += 1
        elif c == ord("?"):
            lo, hi = 0, 1
            self.pos += 1
        elif c == ord("{"):
            m = _QUANT_RE.match(self.src, self.pos)
            if not m:
                return atom
            lo = int(m.group(1))
            if m.group(2) is None:
                hi = lo
            elif m.group(3):
                hi = int(m.group(3))
            else:
                hi = None
            if hi is not None and hi < lo:
                self.error("numbers out of order in {} quantifier", qstart)
            self.pos = m.end()
        else:
            return atom
        mode = "greedy"
        if self.peek() == ord("?"):
            mode = "lazy"
            self.pos += 1
        elif self.peek() == ord("+"):
            mode = "possessive"
            self.pos += 1
        nxt = self.peek()
        if nxt is not None and (nxt in b"*+?" or (nxt == ord("{") and _QUANT_RE.match(self.src, self.pos))):
            self.error("multiple repeat", self.pos)
        node = self.repeat(atom, lo, hi, mode == "lazy", qstart)
        if mode == "possessive":
            node = AtomicGroup(node)
        return node

    def repeat(self, atom: Node, lo: int, hi: int | None, lazy: bool, offset: int) -> Node:
        greedy = not lazy
        if (lo, hi) == (0, None):
            return Star(atom, greedy)
        if (lo, hi) == (0, 1):
            return Alt(Empty(), atom) if lazy else Alt(atom, Empty())
        if (lo, hi) == (1, None):
            return Concat(atom, Star(atom, greedy))
        size = ast_size(atom)
        optional = 0 if hi is None else hi - lo
        projected = lo * size + optional * (size + 2) + (size + 1 if hi is None else 0)
        projected += lo + optional
        if projected > self.budget:
            self.error(f"counted repetition expands to more than {self.budget} nodes",
                       offset, LimitExceeded)
        items = [atom] * lo
        if hi is None:
            items.append(Star(atom, greedy))
        else:
            opt = Alt(Empty(), atom) if lazy else Alt(atom, Empty())
            items.extend([opt] * optional)
        return concat_all(items)

    def atom(self) -> Node:
        c = self.src[self.pos]
        start = self.pos
        if c in b"*+?":
            self.error("nothing to repeat")
        if c == ord("{") and _QUANT_RE.match(self.src, self.pos):
            self.error("nothing to repeat")
        if c == ord("("):
            return self.group()
        if c == ord("["):
            return Literal(self.char_class())
        self.pos += 1
        if c == ord("."):
            return Literal(_DOT)
        if c == ord("^"):
            return _begin_anchor()
        if c == ord("$"):
            return _end_anchor()
        if c == ord("\\"):
            return self.escape(start)
        return Literal(frozenset([c]))

    def escape(self, start: int) -> Node:
        c = self.peek()
        if c is None:
            self.error("trailing backslash", start)
        self.pos += 1
        if c == ord("A"):
            return _begin_anchor()
        if c == ord("z"):
            return _end_anchor()
        if c in b"bB":
            self.error("word boundaries are not supported", start, UnsupportedFeature)
        if c in b"123456789" or c == ord("k"):
            self.error("back-references are not supported", start, UnsupportedFeature)
        if c in b"pP":
            self.error("Unicode property classes are not supported", start, UnsupportedFeature)
        if c in _SHORTHAND:
            return Literal(_SHORTHAND[c])
        return Literal(frozenset([self.single_escape(c, start)]))

    def single_escape(self, c: int, start: int) -> int:
        """Resolve a one-byte escape whose letter ``c`` was just consumed."""
        if c in _CONTROL:
            return _CONTROL[c]
        if c == ord("x"):
            digits = self.src[self.pos:self.pos + 2]
            if len(digits) != 2 or not all(d in b"0123456789abcdefABCDEF" for d in digits):
                self.error("bad \\x escape", start)
            self.pos += 2
            return int(digits, 16)
        if c < 0x80 and not chr(c).isalnum():
            return c
        self.error(f"bad escape \\{chr(c)}", start)

    def group(self) -> Node:
        start = self.pos
        self.pos += 1
        wrap = None
        if self.startswith(b"?"):
            if self.startswith(b"?:"):
                self.pos += 2
            elif self.startswith(b"?="):
                self.pos += 2
                wrap = PosLookahead
            elif self.startswith(b"?!"):
                self.pos += 2
                wrap = NegLookahead
            elif self.startswith(b"?<="):
                self.pos += 3
                wrap = PosLookbehind
            elif self.startswith(b"?<!"):
                self.pos += 3
                wrap = NegLookbehind
            elif self.startswith(b"?>"):
                self.pos += 2
                wrap = AtomicGroup
            elif self.startswith(b"?P="):
                self.error("named back-references are not supported", start, UnsupportedFeature)
            elif self.startswith(b"?<") or self.startswith(b"?P<"):
                self.pos += 2 if self.startswith(b"?<") else 3
                m = _NAME_RE.match(self.src, self.pos)
                if not m or self.src[m.end():m.end() + 1] != b">":
                    self.error("bad group name", self.pos)
                self.pos = m.end() + 1
            elif self.peek(1) is not None and chr(self.peek(1)) in "imsxauLJ-":
                self.error("inline flags are not supported", start, UnsupportedFeature)
            else:
                self.error("unknown group extension", start)
        inner = self.alternation()
        if self.peek() != ord(")"):
            self.error("missing ), unterminated group", start)
        self.pos += 1
        return wrap(inner) if wrap else inner

    def char_class(self) -> frozenset:
        start = self.pos
        self.pos += 1
        negate = False
        if self.peek() == ord("^"):
            negate = True
            self.pos += 1
        members: set = set()
        while True:
            c = self.peek()
            if c is None:
                self.error("unterminated character class", start)
            if c == ord("]"):
                self.pos += 1
                break
            item_start = self.pos
            lo = self.class_atom()
            if self.peek() == ord("-") and self.peek(1) not in (None, ord("]")):
                self.pos += 1
                hi = self.class_atom()
                if isinstance(lo, frozenset) or isinstance(hi, frozenset):
                    self.error("bad character range", item_start)
                if hi < lo:
                    self.error("bad character range", item_start)
                members.update(range(lo, hi + 1))
            elif isinstance(lo, frozenset):
                members.update(lo)
            else:
                members.add(lo)
        result = frozenset(members)
        return ALL_BYTES - result if negate else result

    def class_atom(self):
        """One class member: a byte, or a frozenset for a shorthand escape."""
        start = self.pos
        c = self.src[self.pos]
        self.pos += 1
        if c >= 0x80:
            self.error("non-ASCII character in class", start, UnsupportedFeature)
        if c != ord("\\"):
            return c
        e = self.peek()
        if e is None:
            self.error("trailing backslash", start)
        self.pos += 1
        if e in _SHORTHAND:
            return _SHORTHAND[e]
        if e == ord("b"):
            return 0x08
        if e in b"123456789":
            self.error("back-references are not supported", start, UnsupportedFeature)
        if e in b"pP":
            self.error("Unicode property classes are not supported", start, UnsupportedFeature)
        return self.single_escape(e, start)


def parse(pattern: Union[str, bytes], node_budget: int = DEFAULT_NODE_BUDGET) -> Node:
    """Parse ``pattern`` into a core tree.

    Raises PatternSyntaxError, UnsupportedFeature or LimitExceeded.
    """
    src = pattern.encode("utf-8") if isinstance(pattern, str) else bytes(pattern)
    return _Parser(src, node_budget).parse()


# ---------------------------------------------------------------------------
# printer (used by the fuzzer to report witnesses)

_PLAIN = frozenset(b"abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_ '\"<>=,;:/@#%&~`")


def _print_bytes(symbols: frozenset) -> str:
    if len(symbols) == 1:
        (b,) = symbols
        return chr(b) if b in _PLAIN else f"\\x{b:02x}"
    if not symbols:
        return "[]"
    parts = []
    ordered = sorted(symbols)
    run_start = prev = ordered[0]
    for b in ordered[1:] + [None]:
        if b is not None and b == prev + 1:
            prev = b
            continue
        parts.append(f"\\x{run_start:02x}" if run_start == prev
                     else f"\\x{run_start:02x}-\\x{prev:02x}")
        if b is not None:
            run_start = prev = b
    return "[" + "".join(parts) + "]"


_GROUP_OPEN = {
    PosLookahead: "(?=",
    NegLookahead: "(?!",
    PosLookbehind: "(?<=",
    NegLookbehind: "(?<!",
    AtomicGroup: "(?>",
}


def to_pattern(node: Node) -> str:
    """Render a tree as pattern text that parses back to the same tree."""
    if isinstance(node, Literal):
        return _print_bytes(node.symbols)
    if isinstance(node, Empty):
        return "(?:)"
    if isinstance(node, Alt):
        return f"(?:{to_pattern(node.left)}|{to_pattern(node.right)})"
    if isinstance(node, Concat):
        return f"(?:{to_pattern(node.left)})(?:{to_pattern(node.right)})"
    if isinstance(node, Star):
        return f"(?:{to_pattern(node.inner)})*" + ("" if node.greedy else "?")
    return _GROUP_OPEN[type(node)] + to_pattern(node.inner) + ")"
