"""Compile syntax trees into NFAs with sub-automata.

Every state of the top-level automaton and of all nested sub-automata
lives in one dense table, so a memo key is just ``(state, position)``.
Sub-automata are compiled breadth-first after their parent, which keeps
each automaton's states contiguous.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Optional, Union

from . import syntax as ast

# op codes of the flat program consumed by the engines
OP_ACCEPT, OP_EPS, OP_BRANCH, OP_CHAR, OP_SUB = range(5)
SUB_KINDS = ("pla", "nla", "plb", "nlb", "at")
KIND_CODE = {k: n for n, k in enumerate(SUB_KINDS)}
LOOKAROUND_KINDS = frozenset(("pla", "nla", "plb", "nlb"))


@dataclass(frozen=True)
class Accept:
    pass


@dataclass(frozen=True)
class Eps:
    next: int


@dataclass(frozen=True)
class Branch:
    first: int
    second: int


@dataclass(frozen=True)
class Char:
    guard: frozenset
    next: int


@dataclass(frozen=True)
class Sub:
    kind: str
    sub: int  # index into Nfa.components
    next: int


Transition = Union[Accept, Eps, Branch, Char, Sub]


@dataclass(frozen=True)
class Component:
    """The top-level automaton (index 0) or one sub-automaton."""

    index: int
    kind: Optional[str]
    initial: int
    accept: int
    first: int
    last: int
    parent: Optional[int]
    owner: Optional[int]  # the Sub state that calls this automaton
    direction: int

    @property
    def members(self) -> range:
        return range(self.first, self.last + 1)


@dataclass(frozen=True)
class DepthTable:
    per_state: tuple
    maximum: int


@dataclass(frozen=True)
class InDegreeTable:
    per_state: tuple
    maximum: int


@dataclass
class Nfa:
    transitions: tuple
    components: tuple
    depth: DepthTable = field(init=False)
    plain_depth: DepthTable = field(init=False)
    in_degree: InDegreeTable = field(init=False)
    eps_loop_states: frozenset = field(init=False)
    has_eps_loop: bool = field(init=False)

    def __post_init__(self):
        self.depth = nesting_depth(self)
        self.plain_depth = nesting_depth(self, reset_under_lookaround=False)
        self.in_degree = in_degree(self)
        self.eps_loop_states = check_eps_loops(self)
        self.has_eps_loop = bool(self.eps_loop_states)
        self._program = None

    @property
    def size(self) -> int:
        return len(self.transitions)

    @property
    def top(self) -> Component:
        return self.components[0]

    @property
    def sub_kinds(self) -> frozenset:
        return frozenset(c.kind for c in self.components[1:])

    def component_of(self, q: int) -> Component:
        for c in self.components:
            if c.first <= q <= c.last:
                return c
        raise IndexError(q)

    def program(self) -> "Program":
        if self._program is None:
            self._program = Program.build(self)
        return self._program


@dataclass(frozen=True)
class Program:
    """Flat integer arrays describing an automaton, shared by both backends.

    ``op[q]`` selects the meaning of ``x[q]``/``y[q]``: Eps(x), Branch(x, y),
    Char(class y, x), Sub(sub y, x).  ``classes`` is one 256-byte
    membership row per distinct Char guard.
    """

    op: tuple
    x: tuple
    y: tuple
    depth: tuple
    direction: tuple
    sub_initial: tuple
    sub_kind: tuple
    classes: bytes
    initial: int
    has_eps_loop: bool

    @classmethod
    def build(cls, nfa: Nfa) -> "Program":
        n = nfa.size
        op, x, y = [0] * n, [0] * n, [0] * n
        class_ids: dict = {}
        rows = []
        for q, t in enumerate(nfa.transitions):
            if isinstance(t, Eps):
                op[q], x[q] = OP_EPS, t.next
            elif isinstance(t, Branch):
                op[q], x[q], y[q] = OP_BRANCH, t.first, t.second
            elif isinstance(t, Char):
                if t.guard not in class_ids:
                    class_ids[t.guard] = len(rows)
                    rows.append(bytes(1 if b in t.guard else 0 for b in range(256)))
                op[q], x[q], y[q] = OP_CHAR, t.next, class_ids[t.guard]
            elif isinstance(t, Sub):
                op[q], x[q], y[q] = OP_SUB, t.next, t.sub
        direction = [1] * n
        for c in nfa.components:
            for q in c.members:
                direction[q] = c.direction
        return cls(
            op=tuple(op), x=tuple(x), y=tuple(y),
            depth=nfa.depth.per_state,
            direction=tuple(direction),
            sub_initial=tuple(c.initial for c in nfa.components),
            sub_kind=tuple(-1 if c.kind is None else KIND_CODE[c.kind] for c in nfa.components),
            classes=b"".join(rows),
            initial=nfa.top.initial,
            has_eps_loop=nfa.has_eps_loop,
        )


# ---------------------------------------------------------------------------
# construction

class _Builder:
    def __init__(self):
        self.trans: list = []
        self.pending: deque = deque()
        self.components: list = []
        self.next_index = 1

    def new(self) -> int:
        self.trans.append(None)
        return len(self.trans) - 1

    def build(self, node, entry: int) -> int:
        """Fill ``entry``'s transition with ``node``; return the accept state."""
        if isinstance(node, ast.Literal):
            acc = self.new()
            self.trans[entry] = Char(node.symbols, acc)
            return acc
        if isinstance(node, ast.Empty):
            acc = self.new()
            self.trans[entry] = Eps(acc)
            return acc
        if isinstance(node, ast.Concat):
            return self.build(node.right, self.build(node.left, entry))
        if isinstance(node, ast.Alt):
            e1 = self.new()
            a1 = self.build(node.left, e1)
            e2 = self.new()
            a2 = self.build(node.right, e2)
            acc = self.new()
            self.trans[a1] = Eps(acc)
            self.trans[a2] = Eps(acc)
            self.trans[entry] = Branch(e1, e2)
            return acc
        if isinstance(node, ast.Star):
            body = self.new()
            end = self.build(node.inner, body)
            self.trans[end] = Eps(entry)
            acc = self.new()
            self.trans[entry] = Branch(body, acc) if node.greedy else Branch(acc, body)
            return acc
        kind = ast.KIND_OF[type(node)]
        acc = self.new()
        # breadth-first: the sub-automaton is compiled after the current level
        sub_index = self.next_index
        self.next_index += 1
        inner = ast.reverse(node.inner) if kind in ("plb", "nlb") else node.inner
        self.pending.append((sub_index, kind, inner, entry))
        self.trans[entry] = Sub(kind, sub_index, acc)
        return acc

    def component(self, index, kind, node, parent, owner, direction):
        entry = self.new()
        first = entry
        acc = self.build(node, entry)
        self.components.append(Component(
            index=index, kind=kind, initial=entry, accept=acc, first=first,
            last=len(self.trans) - 1, parent=parent, owner=owner, direction=direction,
        ))

    def run(self, root) -> Nfa:
        self.pending.append((0, None, root, None))
        while self.pending:
            index, kind, node, owner = self.pending.popleft()
            assert index == len(self.components)
            if owner is None:
                parent, direction = None, 1
            else:
                parent = next(c.index for c in self.components if c.first <= owner <= c.last)
                if kind in ("pla", "nla"):
                    direction = 1
                elif kind in ("plb", "nlb"):
                    direction = -1
                else:
                    direction = self.components[parent].direction
            self.component(index, kind, node, parent, owner, direction)
        trans = tuple(Accept() if t is None else t for t in self.trans)
        return Nfa(transitions=trans, components=tuple(self.components))


def compile_ast(node) -> Nfa:
    """Compile a core syntax tree into an NFA with sub-automata."""
    return _Builder().run(node)


def compile_pattern(pattern, node_budget: int = ast.DEFAULT_NODE_BUDGET) -> Nfa:
    return compile_ast(ast.parse(pattern, node_budget))


# ---------------------------------------------------------------------------
# static metadata

def nesting_depth(nfa: Nfa, reset_under_lookaround: bool = True) -> DepthTable:
    """Atomic-group nesting depth of every state.

    With ``reset_under_lookaround`` the states of a look-around
    sub-automaton restart at depth 0 (the combined engine treats each
    look-around as a fresh root); otherwise they inherit their caller's depth.
    """
    depth = [0] * nfa.size
    for c in nfa.components:  # parents precede children
        if c.owner is None:
            base = 0
        elif c.kind == "at":
            base = depth[c.owner] + 1
        elif reset_under_lookaround:
            base = 0
        else:
            base = depth[c.owner]
        for q in c.members:
            depth[q] = base
    return DepthTable(tuple(depth), max(depth, default=0))


def successors(t: Transition) -> tuple:
    if isinstance(t, Eps):
        return (t.next,)
    if isinstance(t, Branch):
        return (t.first, t.second)
    if isinstance(t, (Char, Sub)):
        return (t.next,)
    return ()


def in_degree(nfa: Nfa) -> InDegreeTable:
    """Incoming edges per state, plus one for every initial state."""
    deg = [0] * nfa.size
    for t in nfa.transitions:
        for s in successors(t):
            deg[s] += 1
    for c in nfa.components:
        deg[c.initial] += 1
    return InDegreeTable(tuple(deg), max(deg, default=1))


def _nullable_components(nfa: Nfa) -> list:
    """Whether each automaton can reach its accept state without consuming."""
    nullable = [False] * len(nfa.components)
    for c in reversed(nfa.components):  # children were compiled after parents
        seen = {c.initial}
        todo = [c.initial]
        while todo:
            q = todo.pop()
            if q == c.accept:
                nullable[c.index] = True
                break
            for s in _eps_successors(nfa, q, nullable):
                if s not in seen:
                    seen.add(s)
                    todo.append(s)
    return nullable


def _eps_successors(nfa: Nfa, q: int, nullable: list) -> tuple:
    t = nfa.transitions[q]
    if isinstance(t, (Eps, Branch)):
        return successors(t)
    if isinstance(t, Sub) and (t.kind in LOOKAROUND_KINDS or nullable[t.sub]):
        return (t.next,)
    return ()


def check_eps_loops(nfa: Nfa) -> frozenset:
    """States lying on a cycle that consumes no input.

    Look-around Subs are always zero-width edges.  An atomic Sub counts as
    one when its sub-automaton can accept the empty string.
    """
    nullable = _nullable_components(nfa)
    graph = [_eps_successors(nfa, q, nullable) for q in range(nfa.size)]
    return frozenset(q for scc in _strongly_connected(graph)
                     for q in scc if len(scc) > 1 or q in graph[q])


def _strongly_connected(graph: list) -> list:
    """Iterative Tarjan."""
    index = [-1] * len(graph)
    low = [0] * len(graph)
    on_stack = [False] * len(graph)
    stack: list = []
    out: list = []
    counter = 0
    for root in range(len(graph)):
        if index[root] != -1:
            continue
        work = [(root, 0)]
        while work:
            v, k = work.pop()
            if k == 0:
                index[v] = low[v] = counter
                counter += 1
                stack.append(v)
                on_stack[v] = True
            if k < len(graph[v]):
                work.append((v, k + 1))
                w = graph[v][k]
                if index[w] == -1:
                    work.append((w, 0))
                elif on_stack[w]:
                    low[v] = min(low[v], index[w])
                continue
            for w in graph[v]:
                if on_stack[w] and index[w] > index[v]:
                    low[v] = min(low[v], low[w])
            if low[v] == index[v]:
                scc = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    scc.append(w)
                    if w == v:
                        break
                out.append(scc)
    return out


# ---------------------------------------------------------------------------
# dumps

def _describe(t: Transition) -> str:
    if isinstance(t, Accept):
        return "accept"
    if isinstance(t, Eps):
        return f"eps q{t.next}"
    if isinstance(t, Branch):
        return f"branch q{t.first} q{t.second}"
    if isinstance(t, Char):
        return f"char {ast._print_bytes(t.guard)} q{t.next}"
    return f"sub {t.kind} A{t.sub} q{t.next}"


def dump_text(nfa: Nfa) -> str:
    """Stable listing: a summary, one line per automaton, one line per state."""
    lines = [
        f"states {nfa.size}",
        f"depth {nfa.depth.maximum}",
        f"indegree {nfa.in_degree.maximum}",
        f"eps_loop {'yes' if nfa.has_eps_loop else 'no'}",
    ]
    for c in nfa.components:
        label = "top" if c.kind is None else c.kind
        lines.append(f"A{c.index} {label} initial=q{c.initial} accept=q{c.accept} "
                     f"states=q{c.first}..q{c.last} dir={'+1' if c.direction > 0 else '-1'}")
    for q, t in enumerate(nfa.transitions):
        lines.append(f"q{q} {_describe(t)} depth={nfa.depth.per_state[q]} "
                     f"in={nfa.in_degree.per_state[q]}")
    return "\n".join(lines) + "\n"


def dump_dot(nfa: Nfa) -> str:
    out = ["digraph nfa {", "  rankdir=LR;", "  node [shape=circle];"]
    for c in nfa.components:
        label = "top" if c.kind is None else f"{c.kind} A{c.index}"
        out.append(f"  subgraph cluster_{c.index} {{")
        out.append(f'    label="{label}";')
        for q in c.members:
            shape = "doublecircle" if q == c.accept else "circle"
            out.append(f'    q{q} [shape={shape}, label="q{q}"];')
        out.append("  }")
    for q, t in enumerate(nfa.transitions):
        if isinstance(t, Eps):
            out.append(f'  q{q} -> q{t.next} [label="eps"];')
        elif isinstance(t, Branch):
            out.append(f'  q{q} -> q{t.first} [label="1"];')
            out.append(f'  q{q} -> q{t.second} [label="2"];')
        elif isinstance(t, Char):
            text = ast._print_bytes(t.guard).replace("\\", "\\\\").replace('"', '\\"')
            out.append(f'  q{q} -> q{t.next} [label="{text}"];')
        elif isinstance(t, Sub):
            init = nfa.components[t.sub].initial
            out.append(f'  q{q} -> q{t.next} [label="{t.kind}"];')
            out.append(f"  q{q} -> q{init} [style=dashed];")
    out.append("}")
    return "\n".join(out) + "\n"
