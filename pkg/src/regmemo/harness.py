"""Differential fuzzing of the memoized engines against plain backtracking.

Each case is a random tree, a random input and a start position, all
derived from ``(seed, index)`` alone, so a report can be regenerated case by
case.  Beyond result agreement every engine run is checked for the call
bound, the memo-size bound and the absence of a bare Success at the top.
"""

from __future__ import annotations

import json
import random
from dataclasses import asdict, dataclass, field

from . import syntax as ast
from .automaton import Nfa, compile_ast
from .errors import BudgetExceeded, InvariantViolation
from .matcher import LINEAR_ENGINES, call_bound, match, supports
from .results import MatchResult, Success, SuccessAt, project_result

DEFAULT_ENGINES = ("memo", "memo-la", "memo-at", "memo-la-at")

# which extension nodes a generated tree may use, by target class
_CLASS_OF_ENGINE = {
    "backtrack": "mixed",
    "memo": "plain",
    "memo-la": "la",
    "enter-la": "la",
    "exit-la": "la",
    "memo-at": "at",
    "enter-at": "at",
    "memo-la-at": "mixed",
}
_CLASS_ORDER = ("plain", "la", "at", "mixed")
_EXTENSIONS = {
    "plain": (),
    "la": (ast.PosLookahead, ast.NegLookahead, ast.PosLookbehind, ast.NegLookbehind),
    "at": (ast.AtomicGroup,),
    "mixed": ast.EXTENSION_TYPES,
}


@dataclass(frozen=True)
class FuzzConfig:
    seed: int = 0
    cases: int = 1000
    max_ast_depth: int = 4
    max_star_nesting: int = 2
    alphabet: str = "ab"
    max_input_len: int = 12
    oracle_budget: int = 1_000_000
    engines: tuple = DEFAULT_ENGINES
    # patterns to use instead of random trees (cycled by case index)
    corpus: tuple = ()
    shrink: bool = True
    workers: int = 1


@dataclass
class FuzzReport:
    casesRun: int = 0
    agreements: int = 0
    disagreements: list = field(default_factory=list)
    budgetSkips: int = 0
    boundViolations: list = field(default_factory=list)
    invariantViolations: list = field(default_factory=list)
    engineRuns: dict = field(default_factory=dict)
    casesWithExtensions: int = 0

    @property
    def clean(self) -> bool:
        return not (self.disagreements or self.boundViolations or self.invariantViolations)

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True)


def describe(r: MatchResult) -> str:
    r = project_result(r)
    if isinstance(r, SuccessAt):
        return f"SuccessAt({r.position})"
    return type(r).__name__


def _input_text(w: bytes) -> str:
    return w.decode("latin-1")


# ---------------------------------------------------------------------------
# generation

def target_class(config: FuzzConfig, index: int) -> str:
    wanted = sorted({_CLASS_OF_ENGINE[e] for e in config.engines}, key=_CLASS_ORDER.index)
    return wanted[index % len(wanted)] if wanted else "mixed"


def _literal(rng: random.Random, alphabet: bytes) -> ast.Node:
    roll = rng.random()
    if roll < 0.8 or len(alphabet) == 1:
        return ast.Literal(frozenset([rng.choice(alphabet)]))
    if roll < 0.95:
        return ast.Literal(frozenset(alphabet))
    return ast.Literal(frozenset(ast.ALL_BYTES))


def _random_tree(rng: random.Random, depth: int, stars: int, config: FuzzConfig,
                 extensions: tuple, alphabet: bytes) -> ast.Node:
    if depth <= 0:
        return ast.Empty() if rng.random() < 0.1 else _literal(rng, alphabet)
    options = [("lit", 2.0), ("empty", 0.3), ("alt", 2.0), ("concat", 3.0)]
    if stars < config.max_star_nesting:
        options.append(("star", 1.5))
    for ext in extensions:
        options.append((ext, 4.0 / len(extensions)))
    pick = rng.choices([o for o, _ in options], weights=[wt for _, wt in options])[0]
    sub = lambda s=stars: _random_tree(rng, depth - 1, s, config, extensions, alphabet)
    if pick == "lit":
        return _literal(rng, alphabet)
    if pick == "empty":
        return ast.Empty()
    if pick == "alt":
        return ast.Alt(sub(), sub())
    if pick == "concat":
        return ast.Concat(sub(), sub())
    if pick == "star":
        return ast.Star(sub(stars + 1))
    return pick(sub())


def _has_extension(node: ast.Node) -> bool:
    return any(isinstance(n, ast.EXTENSION_TYPES) for n in ast.walk(node))


def generate_case(config: FuzzConfig, index: int) -> tuple:
    """Deterministic ``(tree, input, start)`` for case ``index``."""
    rng = random.Random(f"{config.seed}:{index}")
    alphabet = config.alphabet.encode("latin-1")
    if config.corpus:
        tree = ast.parse(config.corpus[index % len(config.corpus)])
    else:
        cls = target_class(config, index)
        extensions = _EXTENSIONS[cls]
        while True:
            tree = _random_tree(rng, config.max_ast_depth, 0, config, extensions, alphabet)
            if extensions and not _has_extension(tree):
                continue
            if compile_ast(tree).has_eps_loop:
                continue
            break
    n = rng.randint(0, config.max_input_len)
    w = bytes(rng.choice(alphabet) for _ in range(n))
    start = rng.randint(0, n)
    return tree, w, start


# ---------------------------------------------------------------------------
# execution

def _oracle(nfa: Nfa, w: bytes, start: int, budget: int):
    try:
        return match(nfa, w, "backtrack", start, budget=budget).public
    except BudgetExceeded:
        return None


def _disagrees(tree: ast.Node, w: bytes, start: int, engine: str, budget: int) -> bool:
    nfa = compile_ast(tree)
    if nfa.has_eps_loop or not supports(engine, nfa):
        return False
    expected = _oracle(nfa, w, start, budget)
    if expected is None:
        return False
    try:
        got = match(nfa, w, engine, start).public
    except InvariantViolation:
        return False
    return got != expected


def _paths(node: ast.Node, prefix: tuple = ()):
    yield prefix, node
    for k, child in enumerate(ast.children(node)):
        yield from _paths(child, prefix + (k,))


def _replace(node: ast.Node, path: tuple, new: ast.Node) -> ast.Node:
    if not path:
        return new
    kids = list(ast.children(node))
    kids[path[0]] = _replace(kids[path[0]], path[1:], new)
    if isinstance(node, (ast.Alt, ast.Concat)):
        return type(node)(*kids)
    if isinstance(node, ast.Star):
        return ast.Star(kids[0], node.greedy)
    return type(node)(kids[0])


def _smaller_trees(tree: ast.Node):
    for path, node in _paths(tree):
        for child in ast.children(node):
            yield _replace(tree, path, child)
        if not isinstance(node, (ast.Empty, ast.Literal)):
            yield _replace(tree, path, ast.Empty())


def _simpler_literals(tree: ast.Node, alphabet: bytes):
    for path, node in _paths(tree):
        if isinstance(node, ast.Literal) and len(node.symbols) > 1:
            for b in alphabet:
                if b in node.symbols:
                    yield _replace(tree, path, ast.Literal(frozenset([b])))


def shrink(tree: ast.Node, w: bytes, start: int, engine: str, config: FuzzConfig) -> tuple:
    """Greedy reduction keeping the disagreement: input, then tree, then literals."""
    budget = config.oracle_budget
    still = lambda t, s, p: _disagrees(t, s, p, engine, budget)
    alphabet = config.alphabet.encode("latin-1")
    changed = True
    while changed:
        changed = False
        for k in range(len(w)):
            cand = w[:k] + w[k + 1:]
            cstart = start - 1 if k < start else start
            if cstart <= len(cand) and still(tree, cand, cstart):
                w, start, changed = cand, cstart, True
                break
        if changed:
            continue
        if start > 0 and still(tree, w[start:], 0):
            w, start, changed = w[start:], 0, True
            continue
        size = ast.ast_size(tree)
        for cand in _smaller_trees(tree):
            if ast.ast_size(cand) < size and still(cand, w, start):
                tree, changed = cand, True
                break
        if changed:
            continue
        for cand in _simpler_literals(tree, alphabet):
            if still(cand, w, start):
                tree, changed = cand, True
                break
    return tree, w, start


def run_case(config: FuzzConfig, index: int) -> dict:
    """Run every configured engine on one case; return a plain record."""
    tree, w, start = generate_case(config, index)
    nfa = compile_ast(tree)
    pattern = ast.to_pattern(tree)
    record = {
        "index": index, "pattern": pattern, "input": _input_text(w), "start": start,
        "extension": _has_extension(tree), "skipped": False, "engines": [],
        "disagreement": None, "bounds": [], "invariants": [],
    }
    if nfa.size > 2 * ast.ast_size(tree) + 2:
        record["invariants"].append({"check": "state-count", "states": nfa.size,
                                     "size": ast.ast_size(tree)})
    expected = _oracle(nfa, w, start, config.oracle_budget)
    record["skipped"] = expected is None
    results = {}
    mismatched = []
    for engine in config.engines:
        if not supports(engine, nfa):
            continue
        record["engines"].append(engine)
        try:
            outcome = match(nfa, w, engine, start)
        except InvariantViolation as exc:
            record["invariants"].append({"check": "engine", "engine": engine, "message": str(exc)})
            continue
        results[engine] = describe(outcome.result)
        stats = outcome.stats
        if engine in LINEAR_ENGINES and stats.recursive_calls > call_bound(nfa, w):
            record["bounds"].append({"engine": engine, "calls": stats.recursive_calls,
                                     "bound": call_bound(nfa, w)})
        if stats.memo_entries > nfa.size * (len(w) + 1):
            record["invariants"].append({"check": "memo-size", "engine": engine,
                                         "entries": stats.memo_entries})
        if isinstance(outcome.result, Success):
            record["invariants"].append({"check": "top-level-success", "engine": engine})
        if expected is not None and outcome.public != expected:
            mismatched.append(engine)
    if mismatched:
        entry = {
            "index": index, "pattern": pattern, "input": _input_text(w), "start": start,
            "oracle": describe(expected), "results": results, "engines": mismatched,
        }
        if config.shrink:
            s_tree, s_w, s_start = shrink(tree, w, start, mismatched[0], config)
            s_nfa = compile_ast(s_tree)
            entry["witness"] = {
                "engine": mismatched[0],
                "pattern": ast.to_pattern(s_tree),
                "input": _input_text(s_w),
                "start": s_start,
                "oracle": describe(match(s_nfa, s_w, "backtrack", s_start).result),
                "result": describe(match(s_nfa, s_w, mismatched[0], s_start).result),
            }
        record["disagreement"] = entry
    return record


def _run_range(args) -> list:
    config, lo, hi = args
    return [run_case(config, k) for k in range(lo, hi)]


def run_differential(config: FuzzConfig) -> FuzzReport:
    """Fuzz ``config.cases`` cases and collect every finding."""
    if config.workers > 1 and config.cases > 1:
        import multiprocessing

        step = -(-config.cases // (config.workers * 4))
        chunks = [(config, lo, min(lo + step, config.cases))
                  for lo in range(0, config.cases, step)]
        with multiprocessing.get_context("spawn").Pool(config.workers) as pool:
            records = [r for part in pool.map(_run_range, chunks) for r in part]
    else:
        records = _run_range((config, 0, config.cases))
    records.sort(key=lambda r: r["index"])

    report = FuzzReport()
    for engine in config.engines:
        report.engineRuns[engine] = 0
    for r in records:
        report.casesRun += 1
        report.casesWithExtensions += r["extension"]
        for engine in r["engines"]:
            report.engineRuns[engine] += 1
        for b in r["bounds"]:
            report.boundViolations.append({"index": r["index"], "pattern": r["pattern"],
                                           "input": r["input"], "start": r["start"], **b})
        for v in r["invariants"]:
            report.invariantViolations.append({"index": r["index"], "pattern": r["pattern"], **v})
        if r["skipped"]:
            report.budgetSkips += 1
        elif r["disagreement"] is not None:
            report.disagreements.append(r["disagreement"])
        else:
            report.agreements += 1
    return report
