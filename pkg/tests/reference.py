"""Independent oracle: priority-ordered backtracking straight over the tree.

No automaton, no explicit stack, no memo table.  Each node is a generator
of end positions in the order a backtracking matcher would try them, so
the first position produced is the match.  Only meaningful on trees whose
compiled automaton has no epsilon loop (star bodies never match empty).
"""

from regmemo import syntax as ast


def ends(node, w: bytes, i: int, d: int):
    """Yield end positions of ``node`` from ``i`` scanning in direction ``d``."""
    if isinstance(node, ast.Literal):
        if d > 0:
            if i < len(w) and w[i] in node.symbols:
                yield i + 1
        elif i > 0 and w[i - 1] in node.symbols:
            yield i - 1
    elif isinstance(node, ast.Empty):
        yield i
    elif isinstance(node, ast.Alt):
        yield from ends(node.left, w, i, d)
        yield from ends(node.right, w, i, d)
    elif isinstance(node, ast.Concat):
        first, second = (node.left, node.right) if d > 0 else (node.right, node.left)
        for j in ends(first, w, i, d):
            yield from ends(second, w, j, d)
    elif isinstance(node, ast.Star):
        if not node.greedy:
            yield i
        for j in ends(node.inner, w, i, d):
            if j != i:
                yield from ends(node, w, j, d)
        if node.greedy:
            yield i
    elif isinstance(node, ast.AtomicGroup):
        for j in ends(node.inner, w, i, d):
            yield j
            break
    else:
        ahead = isinstance(node, (ast.PosLookahead, ast.NegLookahead))
        found = next(ends(node.inner, w, i, 1 if ahead else -1), None) is not None
        positive = isinstance(node, (ast.PosLookahead, ast.PosLookbehind))
        if found == positive:
            yield i


def reference_match(node, w: bytes, start: int = 0):
    """First end position of a match from ``start``, or None."""
    return next(ends(node, w, start, 1), None)
