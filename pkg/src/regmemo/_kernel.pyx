# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled versions of the three interpreters in ``engines.py``.

Same control flow, same counters; only the data structures differ.  The
memo table is a dense int32 array indexed by ``state * (n + 1) + position``
holding 0 for undefined, 1 for Success and ``2 + j`` for a failure of
depth ``j``.
"""

from libc.stdint cimport int32_t, int64_t
from libc.stdlib cimport calloc, free, malloc, realloc

from array import array

from .errors import BudgetExceeded, InvariantViolation

cdef enum:
    OP_ACCEPT = 0
    OP_EPS = 1
    OP_BRANCH = 2
    OP_CHAR = 3
    OP_SUB = 4

cdef enum:
    K_NLA = 1
    K_NLB = 3
    K_AT = 4

cdef enum:
    SAT = 0
    SUCC = 1
    FAIL = 2

cdef enum:
    RECORD_EXIT = 1
    RECORD_ENTER = 2

cdef enum:
    F_RET = 0
    F_BRANCH = 1
    F_BRANCH2 = 2
    F_SUB = 3
    F_AT_CONT = 4

# memo cell encoding
cdef enum:
    M_SUCC = 1
    M_FAIL0 = 2

cdef int64_t NO_BUDGET = (<int64_t> 1) << 62


cdef struct Frame:
    int tag
    int q
    int64_t i
    int64_t extra


cdef struct Frames:
    Frame* data
    Py_ssize_t size
    Py_ssize_t cap


cdef struct Keys:
    int64_t* data
    Py_ssize_t size
    Py_ssize_t cap


cdef int frames_push(Frames* f, int tag, int q, int64_t i, int64_t extra) except -1:
    cdef Frame* grown
    if f.size == f.cap:
        grown = <Frame*> realloc(f.data, 2 * f.cap * sizeof(Frame))
        if grown == NULL:
            raise MemoryError()
        f.data = grown
        f.cap *= 2
    f.data[f.size].tag = tag
    f.data[f.size].q = q
    f.data[f.size].i = i
    f.data[f.size].extra = extra
    f.size += 1
    return 0


cdef int keys_push(Keys* k, int64_t key) except -1:
    cdef int64_t* grown
    if k.size == k.cap:
        grown = <int64_t*> realloc(k.data, 2 * k.cap * sizeof(int64_t))
        if grown == NULL:
            raise MemoryError()
        k.data = grown
        k.cap *= 2
    k.data[k.size] = key
    k.size += 1
    return 0


cdef class _Flat:
    """C views of a Program's arrays."""
    cdef int[::1] op, x, y, depth, direction, sub_initial, sub_kind
    cdef const unsigned char[::1] classes
    cdef int initial
    cdef int nstates
    cdef bint guard

    def __init__(self, prog):
        self.op = array("i", prog.op)
        self.x = array("i", prog.x)
        self.y = array("i", prog.y)
        self.depth = array("i", prog.depth)
        self.direction = array("i", prog.direction)
        self.sub_initial = array("i", prog.sub_initial)
        self.sub_kind = array("i", prog.sub_kind)
        self.classes = prog.classes if len(prog.classes) else b"\0" * 256
        self.initial = prog.initial
        self.nstates = len(prog.op)
        self.guard = prog.has_eps_loop


cdef inline int64_t char_step(_Flat p, const unsigned char[::1] w, Py_ssize_t n,
                              int q, int64_t i) noexcept:
    cdef Py_ssize_t row = (<Py_ssize_t> p.y[q]) << 8
    if p.direction[q] > 0:
        if i < n and p.classes[row + w[i]]:
            return i + 1
    elif i > 0 and p.classes[row + w[i - 1]]:
        return i - 1
    return -1


cdef class _Work:
    """Owns the heap buffers of one run so they are freed on any exit."""
    cdef Frames frames
    cdef Keys keys
    cdef int32_t* memo
    cdef unsigned char* active

    def __cinit__(self, Py_ssize_t cells, bint guard):
        self.frames.data = <Frame*> malloc(64 * sizeof(Frame))
        self.frames.size = 0
        self.frames.cap = 64
        self.keys.data = <int64_t*> malloc(64 * sizeof(int64_t))
        self.keys.size = 0
        self.keys.cap = 64
        self.memo = <int32_t*> calloc(cells if cells > 0 else 1, sizeof(int32_t))
        self.active = <unsigned char*> calloc(cells if (guard and cells > 0) else 1, 1)
        if (self.frames.data == NULL or self.keys.data == NULL
                or self.memo == NULL or self.active == NULL):
            raise MemoryError()

    def __dealloc__(self):
        free(self.frames.data)
        free(self.keys.data)
        free(self.memo)
        free(self.active)


def run_plain(prog, const unsigned char[::1] w, Py_ssize_t start, int record=0, budget=None):
    cdef _Flat p = _Flat(prog)
    cdef Py_ssize_t n = w.shape[0]
    cdef int64_t width = n + 1
    cdef _Work work = _Work(p.nstates * width, p.guard)
    cdef Frames* frames = &work.frames
    cdef int32_t* memo = work.memo
    cdef unsigned char* active = work.active
    cdef bint guard = p.guard
    cdef int64_t limit = NO_BUDGET if budget is None else <int64_t> budget
    cdef int64_t calls = 0, hits = 0, writes = 0, entries = 0, peak = 0
    cdef int q = p.initial
    cdef int64_t i = start, val = 0, ni, key
    cdef int kind = SAT, o, k, tag
    cdef bint returning, ok
    cdef Frame fr

    while True:
        calls += 1
        if calls > limit:
            raise BudgetExceeded(limit)
        if frames.size > peak:
            peak = frames.size
        key = q * width + i
        returning = True
        if record and memo[key]:
            hits += 1
            kind = FAIL
        elif guard and active[key]:
            kind = FAIL
        else:
            returning = False
            if record == RECORD_ENTER:
                memo[key] = M_FAIL0
                writes += 1
                entries += 1
            if guard:
                active[key] = 1
            o = p.op[q]
            if o == OP_ACCEPT:
                kind = SAT
                val = i
            elif o == OP_EPS:
                frames_push(frames, F_RET, q, i, 0)
                q = p.x[q]
                continue
            elif o == OP_BRANCH:
                frames_push(frames, F_BRANCH, q, i, 0)
                q = p.x[q]
                continue
            elif o == OP_CHAR:
                ni = char_step(p, w, n, q, i)
                if ni >= 0:
                    frames_push(frames, F_RET, q, i, 0)
                    q = p.x[q]
                    i = ni
                    continue
                kind = FAIL
            else:
                frames_push(frames, F_SUB, q, i, 0)
                q = p.sub_initial[p.y[q]]
                continue

        while True:
            if not returning:
                key = q * width + i
                if record == RECORD_EXIT and kind == FAIL:
                    if not memo[key]:
                        entries += 1
                    memo[key] = M_FAIL0
                    writes += 1
                if guard:
                    active[key] = 0
            if frames.size == 0:
                return (kind, val, calls, hits, writes, entries, peak)
            frames.size -= 1
            fr = frames.data[frames.size]
            tag = fr.tag
            q = fr.q
            i = fr.i
            returning = False
            if tag == F_RET:
                continue
            if tag == F_BRANCH:
                if kind == FAIL:
                    frames_push(frames, F_RET, q, i, 0)
                    q = p.y[q]
                    break
                continue
            k = p.sub_kind[p.y[q]]
            ok = kind != FAIL
            if k == K_AT:
                if ok:
                    frames_push(frames, F_RET, q, i, 0)
                    q = p.x[q]
                    i = val
                    break
                continue
            if k == K_NLA or k == K_NLB:
                ok = not ok
            if ok:
                frames_push(frames, F_RET, q, i, 0)
                q = p.x[q]
                break
            kind = FAIL


def run_la(prog, const unsigned char[::1] w, Py_ssize_t start, budget=None):
    cdef _Flat p = _Flat(prog)
    cdef Py_ssize_t n = w.shape[0]
    cdef int64_t width = n + 1
    cdef _Work work = _Work(p.nstates * width, p.guard)
    cdef Frames* frames = &work.frames
    cdef int32_t* memo = work.memo
    cdef unsigned char* active = work.active
    cdef bint guard = p.guard
    cdef int64_t limit = NO_BUDGET if budget is None else <int64_t> budget
    cdef int64_t calls = 0, hits = 0, writes = 0, entries = 0, peak = 0
    cdef int q = p.initial
    cdef int64_t i = start, val = 0, ni, key
    cdef int kind = SAT, o, k, tag
    cdef int32_t entry
    cdef bint returning, ok
    cdef Frame fr

    while True:
        calls += 1
        if calls > limit:
            raise BudgetExceeded(limit)
        if frames.size > peak:
            peak = frames.size
        key = q * width + i
        returning = True
        entry = memo[key]
        if entry:
            hits += 1
            kind = SUCC if entry == M_SUCC else FAIL
        elif guard and active[key]:
            kind = FAIL
        else:
            returning = False
            if guard:
                active[key] = 1
            o = p.op[q]
            if o == OP_ACCEPT:
                kind = SAT
                val = i
            elif o == OP_EPS:
                frames_push(frames, F_RET, q, i, 0)
                q = p.x[q]
                continue
            elif o == OP_BRANCH:
                frames_push(frames, F_BRANCH, q, i, 0)
                q = p.x[q]
                continue
            elif o == OP_CHAR:
                ni = char_step(p, w, n, q, i)
                if ni >= 0:
                    frames_push(frames, F_RET, q, i, 0)
                    q = p.x[q]
                    i = ni
                    continue
                kind = FAIL
            else:
                frames_push(frames, F_SUB, q, i, 0)
                q = p.sub_initial[p.y[q]]
                continue

        while True:
            if not returning:
                key = q * width + i
                if memo[key]:
                    raise InvariantViolation(f"memo entry for (q{q}, {i}) written twice")
                memo[key] = M_FAIL0 if kind == FAIL else M_SUCC
                writes += 1
                entries += 1
                if guard:
                    active[key] = 0
            if frames.size == 0:
                return (kind, val, calls, hits, writes, entries, peak)
            frames.size -= 1
            fr = frames.data[frames.size]
            tag = fr.tag
            q = fr.q
            i = fr.i
            returning = False
            if tag == F_RET:
                continue
            if tag == F_BRANCH:
                if kind == FAIL:
                    frames_push(frames, F_RET, q, i, 0)
                    q = p.y[q]
                    break
                continue
            k = p.sub_kind[p.y[q]]
            ok = kind != FAIL
            if k == K_NLA or k == K_NLB:
                ok = not ok
            if ok:
                frames_push(frames, F_RET, q, i, 0)
                q = p.x[q]
                break
            kind = FAIL


cdef int64_t batch(Keys* keys, int32_t* memo, Py_ssize_t seg, int32_t value) except -1:
    cdef Py_ssize_t t
    cdef int64_t added = 0
    cdef int32_t old
    for t in range(seg, keys.size):
        old = memo[keys.data[t]]
        if old == 0:
            memo[keys.data[t]] = value
            added += 1
        elif old != value:
            raise InvariantViolation(f"memo entry for key {keys.data[t]} rewritten")
    keys.size = seg
    return added


def run_la_at(prog, const unsigned char[::1] w, Py_ssize_t start, budget=None):
    cdef _Flat p = _Flat(prog)
    cdef Py_ssize_t n = w.shape[0]
    cdef int64_t width = n + 1
    cdef _Work work = _Work(p.nstates * width, p.guard)
    cdef Frames* frames = &work.frames
    cdef Keys* keys = &work.keys
    cdef int32_t* memo = work.memo
    cdef unsigned char* active = work.active
    cdef bint guard = p.guard
    cdef int64_t limit = NO_BUDGET if budget is None else <int64_t> budget
    cdef int64_t calls = 0, hits = 0, writes = 0, entries = 0, peak = 0, added
    cdef int q = p.initial
    cdef int64_t i = start, val = 0, ni, key, seg = 0
    cdef int kind = SAT, o, k, tag
    cdef int32_t entry
    cdef bint returning, ok
    cdef Frame fr
    cdef Py_ssize_t t

    while True:
        calls += 1
        if calls > limit:
            raise BudgetExceeded(limit)
        if frames.size > peak:
            peak = frames.size
        key = q * width + i
        returning = True
        entry = memo[key]
        if entry:
            hits += 1
            if entry == M_SUCC:
                kind = SUCC
            else:
                kind = FAIL
                val = entry - M_FAIL0
        elif guard and active[key]:
            kind = FAIL
            val = p.depth[q]
        else:
            returning = False
            if guard:
                active[key] = 1
            o = p.op[q]
            if o == OP_ACCEPT:
                kind = SAT
                val = i
                seg = keys.size
            elif o == OP_EPS:
                frames_push(frames, F_RET, q, i, 0)
                q = p.x[q]
                continue
            elif o == OP_BRANCH:
                frames_push(frames, F_BRANCH, q, i, 0)
                q = p.x[q]
                continue
            elif o == OP_CHAR:
                ni = char_step(p, w, n, q, i)
                if ni >= 0:
                    frames_push(frames, F_RET, q, i, 0)
                    q = p.x[q]
                    i = ni
                    continue
                kind = FAIL
                val = p.depth[q]
            else:
                frames_push(frames, F_SUB, q, i, 0)
                q = p.sub_initial[p.y[q]]
                continue

        while True:
            if not returning:
                key = q * width + i
                if kind == SAT:
                    keys_push(keys, key)
                else:
                    if memo[key]:
                        raise InvariantViolation(f"memo entry for (q{q}, {i}) written twice")
                    if kind == FAIL and val > p.depth[q]:
                        raise InvariantViolation(
                            f"failure depth {val} exceeds depth {p.depth[q]} of q{q}")
                    memo[key] = <int32_t> (M_FAIL0 + val) if kind == FAIL else M_SUCC
                    writes += 1
                    entries += 1
                if guard:
                    active[key] = 0
            if frames.size == 0:
                if kind == SAT:
                    out = [keys.data[t] for t in range(keys.size)]
                else:
                    out = []
                return (kind, val, out, calls, hits, writes, entries, peak)
            frames.size -= 1
            fr = frames.data[frames.size]
            tag = fr.tag
            q = fr.q
            i = fr.i
            returning = False
            if tag == F_RET:
                continue
            if tag == F_BRANCH:
                if kind == FAIL:
                    if val == p.depth[q]:
                        frames_push(frames, F_BRANCH2, q, i, val)
                        q = p.y[q]
                        break
                    if val > p.depth[q]:
                        raise InvariantViolation(f"failure depth {val} above branch depth")
                continue
            if tag == F_BRANCH2:
                if kind == FAIL and fr.extra < val:
                    val = fr.extra
                continue
            if tag == F_AT_CONT:
                if kind == SAT:
                    seg = fr.extra
                else:
                    added = batch(keys, memo, fr.extra,
                                  M_SUCC if kind == SUCC else <int32_t> (M_FAIL0 + val))
                    writes += added
                    entries += added
                continue
            k = p.sub_kind[p.y[q]]
            if k == K_AT:
                if kind == SAT:
                    frames_push(frames, F_AT_CONT, q, i, seg)
                    q = p.x[q]
                    i = val
                    break
                if kind == FAIL and val > p.depth[q]:
                    val = p.depth[q]
                continue
            if kind == SAT:
                added = batch(keys, memo, seg, M_SUCC)
                writes += added
                entries += added
            ok = kind != FAIL
            if k == K_NLA or k == K_NLB:
                ok = not ok
            if ok:
                frames_push(frames, F_RET, q, i, 0)
                q = p.x[q]
                break
            kind = FAIL
            val = p.depth[q]
