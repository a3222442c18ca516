"""Pure-Python matching kernels.

Three explicit-stack interpreters cover all engines:

* ``run_plain``: backtracking with an optional failure-only memo table that
  is written either after a call fails (``RECORD_EXIT``) or speculatively on
  entry (``RECORD_ENTER``).  No memo gives the reference backtracker.
* ``run_la``: memoization with Success/Failure entries for look-around.
* ``run_la_at``: depth-tagged failures, key sets and batch recording for
  atomic groups, combined with look-around.  On automata without
  look-around it behaves exactly like the atomic-only algorithm.

Each pending call is a frame ``(tag, state, position, extra)``.  A call
either finishes immediately (accept, failed Char, memo hit) or pushes a
frame and descends; results then flow back through the frames.  Results
travel in three locals: ``kind`` (SAT, SUCC or FAIL), ``val`` (position or
failure depth) and, for ``run_la_at``, ``seg`` (start of the result's
key segment on the shared key stack).

The Cython module ``_kernel`` mirrors these functions line for line; the
test-suite checks that both produce identical results and counters.
"""

from __future__ import annotations

from .automaton import OP_ACCEPT, OP_BRANCH, OP_CHAR, OP_EPS, OP_SUB, Program
from .errors import BudgetExceeded, InvariantViolation

SAT, SUCC, FAIL = 0, 1, 2
RECORD_NONE, RECORD_EXIT, RECORD_ENTER = 0, 1, 2

# memo values in ``run_la``/``run_la_at``: SUCCESS_ENTRY or a failure depth >= 0
SUCCESS_ENTRY = -1

K_PLA, K_NLA, K_PLB, K_NLB, K_AT = range(5)

# frame tags
F_RET, F_BRANCH, F_BRANCH2, F_SUB, F_AT_CONT = range(5)

_NO_BUDGET = 1 << 62


def _char_step(prog: Program, w: bytes, q: int, i: int) -> int:
    """Position after consuming one symbol at ``q``, or -1."""
    row = prog.y[q] << 8
    if prog.direction[q] > 0:
        if i < len(w) and prog.classes[row + w[i]]:
            return i + 1
    elif i > 0 and prog.classes[row + w[i - 1]]:
        return i - 1
    return -1


def run_plain(prog: Program, w: bytes, start: int, record: int = RECORD_NONE,
              budget: int | None = None, initial: int | None = None,
              on_hit=None) -> tuple:
    """Backtracking over every transition kind, optionally memoizing failures.

    Returns ``(kind, position, calls, hits, writes, entries, peak)``.
    """
    op, x, y, sub_initial, sub_kind = prog.op, prog.x, prog.y, prog.sub_initial, prog.sub_kind
    width = len(w) + 1
    limit = _NO_BUDGET if budget is None else budget
    guard = prog.has_eps_loop
    active: set = set()
    memo: dict = {}
    frames: list = []
    calls = hits = writes = peak = 0
    q = prog.initial if initial is None else initial
    i = start
    kind = val = 0

    while True:
        # ---- call (q, i)
        calls += 1
        if calls > limit:
            raise BudgetExceeded(limit)
        if len(frames) > peak:
            peak = len(frames)
        key = q * width + i
        returning = True
        if record and key in memo:
            hits += 1
            if on_hit is not None:
                on_hit(q, i, FAIL, 0)
            kind = FAIL
        elif guard and key in active:
            kind = FAIL
        else:
            returning = False
            if record == RECORD_ENTER:
                memo[key] = 0
                writes += 1
            if guard:
                active.add(key)
            o = op[q]
            if o == OP_ACCEPT:
                kind, val = SAT, i
            elif o == OP_EPS:
                frames.append((F_RET, q, i, 0))
                q = x[q]
                continue
            elif o == OP_BRANCH:
                frames.append((F_BRANCH, q, i, 0))
                q = x[q]
                continue
            elif o == OP_CHAR:
                ni = _char_step(prog, w, q, i)
                if ni >= 0:
                    frames.append((F_RET, q, i, 0))
                    q, i = x[q], ni
                    continue
                kind = FAIL
            else:
                frames.append((F_SUB, q, i, 0))
                q = sub_initial[y[q]]
                continue

        # ---- result flows back through the frames
        while True:
            if not returning:
                # the call (q, i) is complete
                if record == RECORD_EXIT and kind == FAIL:
                    memo[q * width + i] = 0
                    writes += 1
                if guard:
                    active.discard(q * width + i)
            if not frames:
                return (kind, val, calls, hits, writes, len(memo), peak)
            tag, q, i, extra = frames.pop()
            returning = False
            if tag == F_RET:
                continue
            if tag == F_BRANCH:
                if kind == FAIL:
                    frames.append((F_RET, q, i, 0))
                    q = y[q]
                    break
                continue
            # F_SUB
            k = sub_kind[y[q]]
            ok = kind != FAIL
            if k == K_AT:
                if ok:
                    frames.append((F_RET, q, i, 0))
                    q, i = x[q], val
                    break
                continue
            if k == K_NLA or k == K_NLB:
                ok = not ok
            if ok:
                frames.append((F_RET, q, i, 0))
                q = x[q]
                break
            kind = FAIL


def run_la(prog: Program, w: bytes, start: int, budget: int | None = None,
           on_hit=None, check: bool = True) -> tuple:
    """Memoization with Success/Failure entries for look-around automata.

    Returns ``(kind, position, calls, hits, writes, entries, peak)``.
    """
    op, x, y, sub_initial, sub_kind = prog.op, prog.x, prog.y, prog.sub_initial, prog.sub_kind
    width = len(w) + 1
    limit = _NO_BUDGET if budget is None else budget
    guard = prog.has_eps_loop
    active: set = set()
    memo: dict = {}
    frames: list = []
    calls = hits = writes = peak = 0
    q, i = prog.initial, start
    kind = val = 0

    while True:
        calls += 1
        if calls > limit:
            raise BudgetExceeded(limit)
        if len(frames) > peak:
            peak = len(frames)
        key = q * width + i
        returning = True
        entry = memo.get(key)
        if entry is not None:
            hits += 1
            kind = SUCC if entry == SUCCESS_ENTRY else FAIL
            if on_hit is not None:
                on_hit(q, i, kind, 0)
        elif guard and key in active:
            kind = FAIL
        else:
            returning = False
            if guard:
                active.add(key)
            o = op[q]
            if o == OP_ACCEPT:
                kind, val = SAT, i
            elif o == OP_EPS:
                frames.append((F_RET, q, i, 0))
                q = x[q]
                continue
            elif o == OP_BRANCH:
                frames.append((F_BRANCH, q, i, 0))
                q = x[q]
                continue
            elif o == OP_CHAR:
                ni = _char_step(prog, w, q, i)
                if ni >= 0:
                    frames.append((F_RET, q, i, 0))
                    q, i = x[q], ni
                    continue
                kind = FAIL
            else:
                frames.append((F_SUB, q, i, 0))
                q = sub_initial[y[q]]
                continue

        while True:
            if not returning:
                key = q * width + i
                if check and key in memo:
                    raise InvariantViolation(f"memo entry for (q{q}, {i}) written twice")
                memo[key] = 0 if kind == FAIL else SUCCESS_ENTRY
                writes += 1
                if guard:
                    active.discard(key)
            if not frames:
                return (kind, val, calls, hits, writes, len(memo), peak)
            tag, q, i, extra = frames.pop()
            returning = False
            if tag == F_RET:
                continue
            if tag == F_BRANCH:
                if kind == FAIL:
                    frames.append((F_RET, q, i, 0))
                    q = y[q]
                    break
                continue
            k = sub_kind[y[q]]
            ok = kind != FAIL
            if k == K_NLA or k == K_NLB:
                ok = not ok
            if ok:
                frames.append((F_RET, q, i, 0))
                q = x[q]
                break
            kind = FAIL


def run_la_at(prog: Program, w: bytes, start: int, budget: int | None = None,
              on_hit=None, check: bool = True) -> tuple:
    """Memoization with depth-tagged failures and key sets.

    Returns ``(kind, value, keys, calls, hits, writes, entries, peak)``
    where ``value`` is a position for SAT and a depth for FAIL, and
    ``keys`` lists the packed keys of a top-level success.
    """
    op, x, y, sub_initial, sub_kind = prog.op, prog.x, prog.y, prog.sub_initial, prog.sub_kind
    depth = prog.depth
    width = len(w) + 1
    limit = _NO_BUDGET if budget is None else budget
    guard = prog.has_eps_loop
    active: set = set()
    memo: dict = {}
    keys: list = []
    frames: list = []
    calls = hits = writes = peak = 0
    q, i = prog.initial, start
    kind = val = seg = 0

    def batch(seg: int, value: int) -> int:
        n = 0
        for k in keys[seg:]:
            old = memo.get(k)
            if old is None:
                memo[k] = value
                n += 1
            elif old != value and check:
                raise InvariantViolation(f"memo entry for key {k} rewritten")
        del keys[seg:]
        return n

    while True:
        calls += 1
        if calls > limit:
            raise BudgetExceeded(limit)
        if len(frames) > peak:
            peak = len(frames)
        key = q * width + i
        returning = True
        entry = memo.get(key)
        if entry is not None:
            hits += 1
            if entry == SUCCESS_ENTRY:
                kind = SUCC
            else:
                kind, val = FAIL, entry
            if on_hit is not None:
                on_hit(q, i, kind, val)
        elif guard and key in active:
            kind, val = FAIL, depth[q]
        else:
            returning = False
            if guard:
                active.add(key)
            o = op[q]
            if o == OP_ACCEPT:
                kind, val, seg = SAT, i, len(keys)
            elif o == OP_EPS:
                frames.append((F_RET, q, i, 0))
                q = x[q]
                continue
            elif o == OP_BRANCH:
                frames.append((F_BRANCH, q, i, 0))
                q = x[q]
                continue
            elif o == OP_CHAR:
                ni = _char_step(prog, w, q, i)
                if ni >= 0:
                    frames.append((F_RET, q, i, 0))
                    q, i = x[q], ni
                    continue
                kind, val = FAIL, depth[q]
            else:
                frames.append((F_SUB, q, i, 0))
                q = sub_initial[y[q]]
                continue

        while True:
            if not returning:
                key = q * width + i
                if kind == SAT:
                    keys.append(key)
                else:
                    if check:
                        if key in memo:
                            raise InvariantViolation(f"memo entry for (q{q}, {i}) written twice")
                        if kind == FAIL and val > depth[q]:
                            raise InvariantViolation(
                                f"failure depth {val} exceeds depth {depth[q]} of q{q}")
                    memo[key] = val if kind == FAIL else SUCCESS_ENTRY
                    writes += 1
                if guard:
                    active.discard(key)
            if not frames:
                return (kind, val, list(keys) if kind == SAT else [],
                        calls, hits, writes, len(memo), peak)
            tag, q, i, extra = frames.pop()
            returning = False
            if tag == F_RET:
                continue
            if tag == F_BRANCH:
                if kind == FAIL:
                    if val == depth[q]:
                        frames.append((F_BRANCH2, q, i, val))
                        q = y[q]
                        break
                    if check and val > depth[q]:
                        raise InvariantViolation(f"failure depth {val} above branch depth")
                continue
            if tag == F_BRANCH2:
                if kind == FAIL and extra < val:
                    val = extra
                continue
            if tag == F_AT_CONT:
                # continuation after an atomic group whose keys start at ``extra``
                if kind == SAT:
                    seg = extra
                elif kind == SUCC:
                    writes += batch(extra, SUCCESS_ENTRY)
                else:
                    writes += batch(extra, val)
                continue
            # F_SUB
            k = sub_kind[y[q]]
            if k == K_AT:
                if kind == SAT:
                    frames.append((F_AT_CONT, q, i, seg))
                    q, i = x[q], val
                    break
                if kind == FAIL and val > depth[q]:
                    val = depth[q]
                continue
            if kind == SAT:
                writes += batch(seg, SUCCESS_ENTRY)
            ok = kind != FAIL
            if k == K_NLA or k == K_NLB:
                ok = not ok
            if ok:
                frames.append((F_RET, q, i, 0))
                q = x[q]
                break
            kind, val = FAIL, depth[q]
