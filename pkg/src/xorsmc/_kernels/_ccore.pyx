# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
# distutils: language = c++
"""Compiled kernels: CDCL SAT solver and projected model counter.

Line-for-line port of ``_pycore``; both must return identical models.
"""

from libcpp.vector cimport vector
from libcpp.algorithm cimport sort as cpp_sort
from posix.time cimport clock_gettime, timespec, CLOCK_MONOTONIC

import time

cdef enum:
    SAT = 10
    UNSAT = 20
    UNKNOWN = 0
    RESTART_BASE = 100
    TIME_CHECK_MASK = 255

cdef double RESCALE_LIMIT = 1e100

cdef double VAR_DECAY_INV = 1.0 / 0.95


cdef inline double _monotonic() noexcept nogil:
    cdef timespec ts
    clock_gettime(CLOCK_MONOTONIC, &ts)
    return <double>ts.tv_sec + <double>ts.tv_nsec * 1e-9


cdef long long _luby(long long y, long long x) noexcept nogil:
    cdef long long size = 1, seq = 0, r = 1
    while size < x + 1:
        seq += 1
        size = 2 * size + 1
    while size - 1 != x:
        size = (size - 1) >> 1
        seq -= 1
        x = x % size
    while seq > 0:
        r *= y
        seq -= 1
    return r


cdef inline int _internal(long long lit) noexcept nogil:
    cdef long long v = (lit if lit > 0 else -lit) - 1
    return <int>(2 * v + (1 if lit < 0 else 0))


cdef struct SortKey:
    int size
    int ci


cdef bint _key_lt(const SortKey& a, const SortKey& b) noexcept nogil:
    if a.size != b.size:
        return a.size < b.size
    return a.ci < b.ci


cdef class _Solver:
    cdef int nvars
    cdef vector[int] assigns
    cdef vector[int] level
    cdef vector[int] reason
    cdef vector[int] phase
    cdef vector[double] activity
    cdef vector[char] seen
    cdef double var_inc
    cdef vector[vector[int]] watches
    cdef vector[vector[int]] clauses
    cdef vector[char] deleted
    cdef vector[int] learnts
    cdef vector[int] trail
    cdef vector[int] trail_lim
    cdef size_t qhead
    cdef vector[int] heap
    cdef vector[int] hpos
    cdef long long conflicts
    cdef long long decisions

    def __cinit__(self, int nvars):
        cdef int v
        self.nvars = nvars
        self.assigns.assign(nvars, -1)
        self.level.assign(nvars, 0)
        self.reason.assign(nvars, -1)
        self.phase.assign(nvars, 0)
        self.activity.assign(nvars, 0.0)
        self.seen.assign(nvars, 0)
        self.var_inc = 1.0
        self.watches.resize(2 * nvars)
        self.qhead = 0
        self.hpos.assign(nvars, -1)
        self.conflicts = 0
        self.decisions = 0
        for v in range(nvars):
            self._heap_insert(v)

    cdef inline bint _lt(self, int a, int b) noexcept nogil:
        return self.activity[a] > self.activity[b] or (
            self.activity[a] == self.activity[b] and a < b)

    cdef void _sift_up(self, int i) noexcept nogil:
        cdef int v = self.heap[i]
        cdef int p
        while i > 0:
            p = (i - 1) >> 1
            if not self._lt(v, self.heap[p]):
                break
            self.heap[i] = self.heap[p]
            self.hpos[self.heap[i]] = i
            i = p
        self.heap[i] = v
        self.hpos[v] = i

    cdef void _sift_down(self, int i) noexcept nogil:
        cdef int v = self.heap[i]
        cdef int n = <int>self.heap.size()
        cdef int child
        while True:
            child = 2 * i + 1
            if child >= n:
                break
            if child + 1 < n and self._lt(self.heap[child + 1], self.heap[child]):
                child += 1
            if not self._lt(self.heap[child], v):
                break
            self.heap[i] = self.heap[child]
            self.hpos[self.heap[i]] = i
            i = child
        self.heap[i] = v
        self.hpos[v] = i

    cdef void _heap_insert(self, int v) noexcept nogil:
        self.hpos[v] = <int>self.heap.size()
        self.heap.push_back(v)
        self._sift_up(<int>self.heap.size() - 1)

    cdef int _heap_pop(self) noexcept nogil:
        cdef int top = self.heap[0]
        cdef int last = self.heap.back()
        self.heap.pop_back()
        self.hpos[top] = -1
        if self.heap.size() > 0:
            self.heap[0] = last
            self.hpos[last] = 0
            self._sift_down(0)
        return top

    cdef inline int _value(self, int lit) noexcept nogil:
        cdef int a = self.assigns[lit >> 1]
        if a < 0:
            return -1
        return a ^ (lit & 1)

    cdef inline void _enqueue(self, int lit, int why) noexcept nogil:
        cdef int v = lit >> 1
        self.assigns[v] = 1 - (lit & 1)
        self.level[v] = <int>self.trail_lim.size()
        self.reason[v] = why
        self.trail.push_back(lit)

    cdef int _attach(self, vector[int]& lits) noexcept nogil:
        cdef int ci = <int>self.clauses.size()
        self.clauses.push_back(lits)
        self.deleted.push_back(0)
        self.watches[lits[0]].push_back(ci)
        self.watches[lits[1]].push_back(ci)
        return ci

    cdef bint add_clause(self, vector[int]& raw) noexcept nogil:
        # raw holds sorted unique internal literals
        cdef vector[int] out
        cdef size_t k
        cdef int lit, val
        for k in range(raw.size()):
            if k > 0 and raw[k] == (raw[k - 1] ^ 1) and (raw[k] & 1) == 1:
                return True
        for k in range(raw.size()):
            lit = raw[k]
            val = self._value(lit)
            if val == 1:
                return True
            if val == -1:
                out.push_back(lit)
        if out.size() == 0:
            return False
        if out.size() == 1:
            self._enqueue(out[0], -1)
            return True
        self._attach(out)
        return True

    cdef int propagate(self) noexcept nogil:
        cdef int confl = -1
        cdef int p, false_lit, ci, first, a, lk, ak
        cdef size_t i, j, n, k
        cdef bint found
        while self.qhead < self.trail.size():
            p = self.trail[self.qhead]
            self.qhead += 1
            false_lit = p ^ 1
            i = 0
            j = 0
            n = self.watches[false_lit].size()
            while i < n:
                ci = self.watches[false_lit][i]
                i += 1
                if self.deleted[ci]:
                    continue
                if self.clauses[ci][0] == false_lit:
                    self.clauses[ci][0] = self.clauses[ci][1]
                    self.clauses[ci][1] = false_lit
                first = self.clauses[ci][0]
                a = self.assigns[first >> 1]
                if a >= 0 and (a ^ (first & 1)) == 1:
                    self.watches[false_lit][j] = ci
                    j += 1
                    continue
                found = False
                for k in range(2, self.clauses[ci].size()):
                    lk = self.clauses[ci][k]
                    ak = self.assigns[lk >> 1]
                    if ak < 0 or (ak ^ (lk & 1)) == 1:
                        self.clauses[ci][1] = lk
                        self.clauses[ci][k] = false_lit
                        self.watches[lk].push_back(ci)
                        found = True
                        break
                if found:
                    continue
                self.watches[false_lit][j] = ci
                j += 1
                if a >= 0:
                    confl = ci
                    self.qhead = self.trail.size()
                    while i < n:
                        self.watches[false_lit][j] = self.watches[false_lit][i]
                        j += 1
                        i += 1
                else:
                    self._enqueue(first, ci)
            self.watches[false_lit].resize(j)
            if confl >= 0:
                return confl
        return -1

    cdef void _bump(self, int v) noexcept nogil:
        cdef int u
        self.activity[v] += self.var_inc
        if self.activity[v] > RESCALE_LIMIT:
            for u in range(self.nvars):
                self.activity[u] *= 1e-100
            self.var_inc *= 1e-100
        if self.hpos[v] >= 0:
            self._sift_up(self.hpos[v])

    cdef int analyze(self, int confl, vector[int]& out) noexcept nogil:
        cdef int dl = <int>self.trail_lim.size()
        cdef vector[int] learnt
        cdef vector[int] to_clear
        cdef int path_c = 0
        cdef int p = -1
        cdef int idx = <int>self.trail.size() - 1
        cdef size_t k, m, start
        cdef int q, v, r, u, best, tmp
        cdef bint redundant
        learnt.push_back(0)
        while True:
            start = 0 if p == -1 else 1
            for k in range(start, self.clauses[confl].size()):
                q = self.clauses[confl][k]
                v = q >> 1
                if not self.seen[v] and self.level[v] > 0:
                    self._bump(v)
                    self.seen[v] = 1
                    to_clear.push_back(v)
                    if self.level[v] >= dl:
                        path_c += 1
                    else:
                        learnt.push_back(q)
            while not self.seen[self.trail[idx] >> 1]:
                idx -= 1
            p = self.trail[idx]
            idx -= 1
            confl = self.reason[p >> 1]
            self.seen[p >> 1] = 0
            path_c -= 1
            if path_c == 0:
                break
        learnt[0] = p ^ 1
        out.clear()
        out.push_back(learnt[0])
        for k in range(1, learnt.size()):
            q = learnt[k]
            r = self.reason[q >> 1]
            if r < 0:
                out.push_back(q)
                continue
            redundant = True
            for m in range(1, self.clauses[r].size()):
                u = self.clauses[r][m] >> 1
                if not self.seen[u] and self.level[u] > 0:
                    redundant = False
                    break
            if not redundant:
                out.push_back(q)
        for k in range(to_clear.size()):
            self.seen[to_clear[k]] = 0
        if out.size() > 1:
            best = 1
            for k in range(2, out.size()):
                if self.level[out[k] >> 1] > self.level[out[best] >> 1]:
                    best = <int>k
            tmp = out[1]
            out[1] = out[best]
            out[best] = tmp
            return self.level[out[1] >> 1]
        return 0

    cdef void cancel_until(self, int lvl) noexcept nogil:
        cdef int stop, k, v
        if <int>self.trail_lim.size() <= lvl:
            return
        stop = self.trail_lim[lvl]
        k = <int>self.trail.size() - 1
        while k >= stop:
            v = self.trail[k] >> 1
            self.phase[v] = self.assigns[v]
            self.assigns[v] = -1
            self.reason[v] = -1
            if self.hpos[v] < 0:
                self._heap_insert(v)
            k -= 1
        self.trail.resize(stop)
        self.trail_lim.resize(lvl)
        self.qhead = stop

    cdef bint _locked(self, int ci) noexcept nogil:
        cdef int lit0 = self.clauses[ci][0]
        return self.reason[lit0 >> 1] == ci and self._value(lit0) == 1

    cdef void reduce_db(self) noexcept nogil:
        cdef vector[SortKey] cand
        cdef vector[int] keep
        cdef SortKey key
        cdef size_t k, half
        cdef int ci
        for k in range(self.learnts.size()):
            ci = self.learnts[k]
            if self.clauses[ci].size() > 2 and not self._locked(ci):
                key.size = <int>self.clauses[ci].size()
                key.ci = ci
                cand.push_back(key)
            else:
                keep.push_back(ci)
        cpp_sort(cand.begin(), cand.end(), _key_lt)
        half = cand.size() // 2
        for k in range(half, cand.size()):
            ci = cand[k].ci
            self.deleted[ci] = 1
            self.clauses[ci].clear()
            self.clauses[ci].shrink_to_fit()
        for k in range(half):
            keep.push_back(cand[k].ci)
        cpp_sort(keep.begin(), keep.end())
        self.learnts.swap(keep)

    cdef int search(self, double deadline) noexcept nogil:
        cdef long long restart_idx = 0
        cdef long long budget = _luby(2, restart_idx) * RESTART_BASE
        cdef long long since_restart = 0
        cdef long long max_learnts = <long long>(self.clauses.size() // 3)
        cdef int confl, bt, ci, v, u
        cdef vector[int] learnt
        if max_learnts < 2000:
            max_learnts = 2000
        if self.propagate() >= 0:
            return UNSAT
        while True:
            confl = self.propagate()
            if confl >= 0:
                self.conflicts += 1
                since_restart += 1
                if self.trail_lim.size() == 0:
                    return UNSAT
                bt = self.analyze(confl, learnt)
                self.cancel_until(bt)
                if learnt.size() == 1:
                    self._enqueue(learnt[0], -1)
                else:
                    ci = self._attach(learnt)
                    self.learnts.push_back(ci)
                    self._enqueue(learnt[0], ci)
                self.var_inc *= VAR_DECAY_INV
                if deadline > 0 and (self.conflicts & TIME_CHECK_MASK) == 0:
                    if _monotonic() > deadline:
                        return UNKNOWN
                continue
            if since_restart >= budget:
                self.cancel_until(0)
                restart_idx += 1
                budget = _luby(2, restart_idx) * RESTART_BASE
                since_restart = 0
                continue
            if <long long>self.learnts.size() - <long long>self.trail.size() >= max_learnts:
                self.reduce_db()
                max_learnts = max_learnts + max_learnts // 10
            v = -1
            while self.heap.size() > 0:
                u = self._heap_pop()
                if self.assigns[u] < 0:
                    v = u
                    break
            if v < 0:
                return SAT
            self.decisions += 1
            self.trail_lim.push_back(<int>self.trail.size())
            self._enqueue(2 * v + (1 - self.phase[v]), -1)


cdef vector[int] _normalize(object clause) except *:
    cdef vector[int] lits
    cdef long long x
    for x in clause:
        lits.push_back(_internal(x))
    cpp_sort(lits.begin(), lits.end())
    cdef vector[int] uniq
    cdef size_t k
    for k in range(lits.size()):
        if k == 0 or lits[k] != lits[k - 1]:
            uniq.push_back(lits[k])
    return uniq


def solve_cnf(int nvars, clauses, double deadline=0.0):
    """Same contract as ``_pycore.solve_cnf``.

    ``deadline`` is a ``time.perf_counter`` timestamp; it is translated to
    the monotonic clock used inside the GIL-free search.
    """
    cdef _Solver s = _Solver(nvars)
    cdef vector[int] lits
    cdef int status
    cdef double cdeadline = 0.0
    for c in clauses:
        lits = _normalize(c)
        if not s.add_clause(lits):
            return UNSAT, None, 0
    if deadline > 0:
        cdeadline = _monotonic() + (deadline - time.perf_counter())
        if cdeadline <= 0:
            cdeadline = 1e-9
    with nogil:
        status = s.search(cdeadline)
    if status == SAT:
        return SAT, [s.assigns[v] for v in range(nvars)], s.conflicts
    return status, None, s.conflicts


# ---------------------------------------------------------------------------
# projected model counting
# ---------------------------------------------------------------------------


cdef struct Frame:
    int pos
    int var


cdef class _Counter:
    cdef int nvars
    cdef vector[char] is_over
    cdef vector[vector[int]] clauses
    cdef vector[int] size
    cdef vector[int] nsat
    cdef vector[int] nfalse
    cdef vector[int] nover
    cdef vector[vector[int]] occ
    cdef long long active
    cdef vector[int] assigns
    cdef vector[int] trail
    cdef vector[int] pending
    cdef int free_over
    cdef bint unsat

    def __cinit__(self, int nvars, clauses, over):
        cdef vector[int] lits
        cdef size_t k
        cdef int ci, cnt
        cdef bint taut
        self.nvars = nvars
        self.is_over.assign(nvars, 0)
        self.unsat = False
        self.free_over = 0
        for v in over:
            self.is_over[v - 1] = 1
            self.free_over += 1
        for c in clauses:
            lits = _normalize(c)
            taut = False
            for k in range(1, lits.size()):
                if lits[k] == (lits[k - 1] ^ 1) and (lits[k] & 1) == 1:
                    taut = True
                    break
            if taut:
                continue
            if lits.size() == 0:
                self.unsat = True
            self.clauses.push_back(lits)
        self.occ.resize(2 * nvars)
        self.active = 0
        for ci in range(<int>self.clauses.size()):
            self.size.push_back(<int>self.clauses[ci].size())
            self.nsat.push_back(0)
            self.nfalse.push_back(0)
            cnt = 0
            for k in range(self.clauses[ci].size()):
                cnt += self.is_over[self.clauses[ci][k] >> 1]
                self.occ[self.clauses[ci][k]].push_back(ci)
            self.nover.push_back(cnt)
            if cnt > 0:
                self.active += 1
        self.assigns.assign(nvars, -1)

    cdef bint _assign(self, int lit) noexcept nogil:
        cdef int v = lit >> 1
        cdef int over = self.is_over[v]
        cdef bint ok = True
        cdef bint was
        cdef size_t k
        cdef int ci
        cdef int neg = lit ^ 1
        self.assigns[v] = 1 - (lit & 1)
        self.trail.push_back(lit)
        if over:
            self.free_over -= 1
        for k in range(self.occ[lit].size()):
            ci = self.occ[lit][k]
            was = self.nsat[ci] == 0 and self.nover[ci] > 0
            self.nsat[ci] += 1
            if over:
                self.nover[ci] -= 1
            if was:
                self.active -= 1
        for k in range(self.occ[neg].size()):
            ci = self.occ[neg][k]
            was = self.nsat[ci] == 0 and self.nover[ci] > 0
            self.nfalse[ci] += 1
            if over:
                self.nover[ci] -= 1
            if was and self.nover[ci] == 0:
                self.active -= 1
            if self.nsat[ci] == 0:
                if self.nfalse[ci] == self.size[ci]:
                    ok = False
                elif self.nfalse[ci] == self.size[ci] - 1:
                    self.pending.push_back(ci)
        return ok

    cdef void _unassign_to(self, int pos) noexcept nogil:
        cdef int lit, v, over, ci, neg
        cdef size_t k
        while <int>self.trail.size() > pos:
            lit = self.trail.back()
            self.trail.pop_back()
            v = lit >> 1
            neg = lit ^ 1
            over = self.is_over[v]
            if over:
                self.free_over += 1
            for k in range(self.occ[neg].size()):
                ci = self.occ[neg][k]
                self.nfalse[ci] -= 1
                if over:
                    self.nover[ci] += 1
                if self.nsat[ci] == 0 and self.nover[ci] == 1 and over:
                    self.active += 1
            for k in range(self.occ[lit].size()):
                ci = self.occ[lit][k]
                self.nsat[ci] -= 1
                if over:
                    self.nover[ci] += 1
                if self.nsat[ci] == 0 and self.nover[ci] > 0:
                    self.active += 1
            self.assigns[v] = -1
        self.pending.clear()

    cdef bint _propagate(self) noexcept nogil:
        cdef int ci, unit, nun, lit
        cdef size_t k
        while self.pending.size() > 0:
            ci = self.pending.back()
            self.pending.pop_back()
            if self.nsat[ci] > 0:
                continue
            unit = -1
            nun = 0
            for k in range(self.clauses[ci].size()):
                lit = self.clauses[ci][k]
                if self.assigns[lit >> 1] < 0:
                    unit = lit
                    nun += 1
            if nun == 0:
                self.pending.clear()
                return False
            if nun > 1:
                continue
            if not self._assign(unit):
                self.pending.clear()
                return False
        return True

    cdef int _pick(self, bint over_only) noexcept nogil:
        cdef int ci, v
        cdef size_t k
        for ci in range(<int>self.clauses.size()):
            if self.nsat[ci] > 0:
                continue
            if over_only and self.nover[ci] == 0:
                continue
            for k in range(self.clauses[ci].size()):
                v = self.clauses[ci][k] >> 1
                if self.assigns[v] < 0 and (not over_only or self.is_over[v]):
                    return v
        return -1

    cdef bint _residual_sat(self) noexcept nogil:
        cdef int base = <int>self.trail.size()
        cdef vector[Frame] stack
        cdef Frame fr
        cdef bint result = False
        cdef bint ok
        cdef int v
        while True:
            v = self._pick(False)
            if v < 0:
                result = True
                break
            fr.pos = <int>self.trail.size()
            fr.var = v
            stack.push_back(fr)
            ok = self._assign(2 * v + 1) and self._propagate()
            while not ok:
                while stack.size() > 0 and stack.back().var < 0:
                    stack.pop_back()
                if stack.size() == 0:
                    break
                fr = stack.back()
                stack.pop_back()
                self._unassign_to(fr.pos)
                v = fr.var
                fr.var = -1
                stack.push_back(fr)
                ok = self._assign(2 * v) and self._propagate()
            if not ok:
                break
        self._unassign_to(base)
        return result

    def count(self):
        cdef vector[Frame] stack
        cdef Frame fr
        cdef bint ok
        cdef int v, ci
        cdef bint sat
        total = 0
        if self.unsat:
            return 0
        for ci in range(<int>self.clauses.size()):
            if self.size[ci] == 1:
                self.pending.push_back(ci)
        ok = self._propagate()
        while True:
            with nogil:
                while ok and self.active != 0:
                    v = self._pick(True)
                    fr.pos = <int>self.trail.size()
                    fr.var = v
                    stack.push_back(fr)
                    ok = self._assign(2 * v) and self._propagate()
                sat = False
                if ok:
                    sat = self._residual_sat()
            if ok and sat:
                total += 1 << self.free_over
            with nogil:
                while stack.size() > 0 and stack.back().var < 0:
                    stack.pop_back()
                if stack.size() > 0:
                    fr = stack.back()
                    stack.pop_back()
                    self._unassign_to(fr.pos)
                    v = fr.var
                    fr.var = -1
                    stack.push_back(fr)
                    ok = self._assign(2 * v + 1) and self._propagate()
            if stack.size() == 0:
                return total


def count_projected(int nvars, clauses, over):
    """Same contract as ``_pycore.count_projected``."""
    return _Counter(nvars, clauses, over).count()
