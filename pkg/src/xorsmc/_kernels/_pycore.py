"""Pure-Python kernels: a CDCL SAT solver and a projected model counter.

This module is the reference for ``_ccore.pyx``.  Both follow the same
decision heuristic, tie-breaking, restart schedule and clause-deletion
policy, so for a given input they return the same model.  Keep them in
lockstep when editing either one.

Literals are encoded internally as ``2 * v + sign`` with ``v`` the 0-based
variable index and ``sign == 1`` for a negated literal.
"""

import time

SAT = 10
UNSAT = 20
UNKNOWN = 0

_VAR_DECAY_INV = 1.0 / 0.95
_RESCALE_LIMIT = 1e100
_RESTART_BASE = 100
_TIME_CHECK_MASK = 255


def luby(y, x):
    size, seq = 1, 0
    while size < x + 1:
        seq += 1
        size = 2 * size + 1
    while size - 1 != x:
        size = (size - 1) >> 1
        seq -= 1
        x = x % size
    return y ** seq


def _internal(lit):
    v = abs(lit) - 1
    return 2 * v + (1 if lit < 0 else 0)


class _Solver:
    def __init__(self, nvars):
        self.nvars = nvars
        self.assigns = [-1] * nvars
        self.level = [0] * nvars
        self.reason = [-1] * nvars
        self.phase = [0] * nvars
        self.activity = [0.0] * nvars
        self.seen = [0] * nvars
        self.var_inc = 1.0
        self.watches = [[] for _ in range(2 * nvars)]
        self.clauses = []
        self.deleted = []
        self.learnts = []
        self.trail = []
        self.trail_lim = []
        self.qhead = 0
        self.heap = []
        self.hpos = [-1] * nvars
        for v in range(nvars):
            self._heap_insert(v)
        self.conflicts = 0
        self.decisions = 0

    # -- heap keyed on activity, ties broken by lower index ------------------
    def _lt(self, a, b):
        act = self.activity
        return act[a] > act[b] or (act[a] == act[b] and a < b)

    def _sift_up(self, i):
        heap, hpos = self.heap, self.hpos
        v = heap[i]
        while i > 0:
            p = (i - 1) >> 1
            if not self._lt(v, heap[p]):
                break
            heap[i] = heap[p]
            hpos[heap[i]] = i
            i = p
        heap[i] = v
        hpos[v] = i

    def _sift_down(self, i):
        heap, hpos = self.heap, self.hpos
        v = heap[i]
        n = len(heap)
        while True:
            child = 2 * i + 1
            if child >= n:
                break
            if child + 1 < n and self._lt(heap[child + 1], heap[child]):
                child += 1
            if not self._lt(heap[child], v):
                break
            heap[i] = heap[child]
            hpos[heap[i]] = i
            i = child
        heap[i] = v
        hpos[v] = i

    def _heap_insert(self, v):
        self.hpos[v] = len(self.heap)
        self.heap.append(v)
        self._sift_up(len(self.heap) - 1)

    def _heap_pop(self):
        heap = self.heap
        top = heap[0]
        last = heap.pop()
        self.hpos[top] = -1
        if heap:
            heap[0] = last
            self.hpos[last] = 0
            self._sift_down(0)
        return top

    # -- assignment -----------------------------------------------------------
    def _value(self, lit):
        a = self.assigns[lit >> 1]
        if a < 0:
            return -1
        return a ^ (lit & 1)

    def _enqueue(self, lit, reason):
        v = lit >> 1
        self.assigns[v] = 1 - (lit & 1)
        self.level[v] = len(self.trail_lim)
        self.reason[v] = reason
        self.trail.append(lit)

    def add_clause(self, lits):
        seen = set()
        clause = []
        for lit in sorted(set(_internal(x) for x in lits)):
            if lit ^ 1 in seen:
                return True
            seen.add(lit)
            clause.append(lit)
        out = []
        for lit in clause:
            val = self._value(lit)
            if val == 1:
                return True
            if val == -1:
                out.append(lit)
        if not out:
            return False
        if len(out) == 1:
            self._enqueue(out[0], -1)
            return True
        self._attach(out)
        return True

    def _attach(self, lits):
        ci = len(self.clauses)
        self.clauses.append(lits)
        self.deleted.append(False)
        self.watches[lits[0]].append(ci)
        self.watches[lits[1]].append(ci)
        return ci

    def propagate(self):
        trail = self.trail
        clauses = self.clauses
        deleted = self.deleted
        watches = self.watches
        assigns = self.assigns
        confl = -1
        while self.qhead < len(trail):
            p = trail[self.qhead]
            self.qhead += 1
            false_lit = p ^ 1
            ws = watches[false_lit]
            i = j = 0
            n = len(ws)
            while i < n:
                ci = ws[i]
                i += 1
                if deleted[ci]:
                    continue
                c = clauses[ci]
                if c[0] == false_lit:
                    c[0] = c[1]
                    c[1] = false_lit
                first = c[0]
                a = assigns[first >> 1]
                if a >= 0 and (a ^ (first & 1)) == 1:
                    ws[j] = ci
                    j += 1
                    continue
                found = False
                for k in range(2, len(c)):
                    lk = c[k]
                    ak = assigns[lk >> 1]
                    if ak < 0 or (ak ^ (lk & 1)) == 1:
                        c[1] = lk
                        c[k] = false_lit
                        watches[lk].append(ci)
                        found = True
                        break
                if found:
                    continue
                ws[j] = ci
                j += 1
                if a >= 0:
                    confl = ci
                    self.qhead = len(trail)
                    while i < n:
                        ws[j] = ws[i]
                        j += 1
                        i += 1
                else:
                    self._enqueue(first, ci)
            del ws[j:]
            if confl >= 0:
                return confl
        return -1

    def _bump(self, v):
        act = self.activity
        act[v] += self.var_inc
        if act[v] > _RESCALE_LIMIT:
            for u in range(self.nvars):
                act[u] *= 1e-100
            self.var_inc *= 1e-100
        if self.hpos[v] >= 0:
            self._sift_up(self.hpos[v])

    def analyze(self, confl):
        seen = self.seen
        level = self.level
        reason = self.reason
        trail = self.trail
        clauses = self.clauses
        dl = len(self.trail_lim)
        learnt = [0]
        to_clear = []
        path_c = 0
        p = -1
        idx = len(trail) - 1
        while True:
            c = clauses[confl]
            start = 0 if p == -1 else 1
            for k in range(start, len(c)):
                q = c[k]
                v = q >> 1
                if not seen[v] and level[v] > 0:
                    self._bump(v)
                    seen[v] = 1
                    to_clear.append(v)
                    if level[v] >= dl:
                        path_c += 1
                    else:
                        learnt.append(q)
            while not seen[trail[idx] >> 1]:
                idx -= 1
            p = trail[idx]
            idx -= 1
            confl = reason[p >> 1]
            seen[p >> 1] = 0
            path_c -= 1
            if path_c == 0:
                break
        learnt[0] = p ^ 1
        # local minimization: drop literals implied by other learnt literals
        out = [learnt[0]]
        for k in range(1, len(learnt)):
            q = learnt[k]
            r = reason[q >> 1]
            if r < 0:
                out.append(q)
                continue
            rc = clauses[r]
            redundant = True
            for m in range(1, len(rc)):
                u = rc[m] >> 1
                if not seen[u] and level[u] > 0:
                    redundant = False
                    break
            if not redundant:
                out.append(q)
        for v in to_clear:
            seen[v] = 0
        bt = 0
        if len(out) > 1:
            best = 1
            for k in range(2, len(out)):
                if level[out[k] >> 1] > level[out[best] >> 1]:
                    best = k
            out[1], out[best] = out[best], out[1]
            bt = level[out[1] >> 1]
        return out, bt

    def cancel_until(self, lvl):
        if len(self.trail_lim) <= lvl:
            return
        trail = self.trail
        stop = self.trail_lim[lvl]
        for k in range(len(trail) - 1, stop - 1, -1):
            v = trail[k] >> 1
            self.phase[v] = self.assigns[v]
            self.assigns[v] = -1
            self.reason[v] = -1
            if self.hpos[v] < 0:
                self._heap_insert(v)
        del trail[stop:]
        del self.trail_lim[lvl:]
        self.qhead = stop

    def _locked(self, ci):
        c = self.clauses[ci]
        v = c[0] >> 1
        return self.reason[v] == ci and self._value(c[0]) == 1

    def reduce_db(self):
        cand = []
        keep = []
        for ci in self.learnts:
            if len(self.clauses[ci]) > 2 and not self._locked(ci):
                cand.append(ci)
            else:
                keep.append(ci)
        cand.sort(key=lambda ci: (len(self.clauses[ci]), ci))
        half = len(cand) // 2
        for ci in cand[half:]:
            self.deleted[ci] = True
            self.clauses[ci] = []
        keep.extend(cand[:half])
        keep.sort()
        self.learnts = keep

    def search(self, deadline):
        if self.propagate() >= 0:
            return UNSAT
        restart_idx = 0
        budget = luby(2, restart_idx) * _RESTART_BASE
        since_restart = 0
        max_learnts = max(len(self.clauses) // 3, 2000)
        while True:
            confl = self.propagate()
            if confl >= 0:
                self.conflicts += 1
                since_restart += 1
                if not self.trail_lim:
                    return UNSAT
                learnt, bt = self.analyze(confl)
                self.cancel_until(bt)
                if len(learnt) == 1:
                    self._enqueue(learnt[0], -1)
                else:
                    ci = self._attach(learnt)
                    self.learnts.append(ci)
                    self._enqueue(learnt[0], ci)
                self.var_inc *= _VAR_DECAY_INV
                if deadline > 0 and (self.conflicts & _TIME_CHECK_MASK) == 0:
                    if time.perf_counter() > deadline:
                        return UNKNOWN
                continue
            if since_restart >= budget:
                self.cancel_until(0)
                restart_idx += 1
                budget = luby(2, restart_idx) * _RESTART_BASE
                since_restart = 0
                continue
            if len(self.learnts) - len(self.trail) >= max_learnts:
                self.reduce_db()
                max_learnts = max_learnts + max_learnts // 10
            v = -1
            while self.heap:
                u = self._heap_pop()
                if self.assigns[u] < 0:
                    v = u
                    break
            if v < 0:
                return SAT
            self.decisions += 1
            self.trail_lim.append(len(self.trail))
            self._enqueue(2 * v + (1 - self.phase[v]), -1)


def solve_cnf(nvars, clauses, deadline=0.0):
    """Decide a DIMACS-style clause list.

    Returns ``(status, model, conflicts)``; ``model`` is a list of 0/1
    values indexed by ``var - 1`` when ``status == SAT``, else ``None``.
    """
    s = _Solver(nvars)
    for c in clauses:
        if not s.add_clause(c):
            return UNSAT, None, 0
    status = s.search(deadline)
    if status == SAT:
        return SAT, list(s.assigns), s.conflicts
    return status, None, s.conflicts


# ---------------------------------------------------------------------------
# projected model counting
# ---------------------------------------------------------------------------


class _Counter:
    def __init__(self, nvars, clauses, over):
        self.nvars = nvars
        self.is_over = [0] * nvars
        for v in over:
            self.is_over[v - 1] = 1
        self.clauses = []
        self.unsat = False
        for c in clauses:
            lits = sorted(set(_internal(x) for x in c))
            if any((lit ^ 1) in lits for lit in lits if lit & 1 == 0):
                continue
            if not lits:
                self.unsat = True
            self.clauses.append(lits)
        m = len(self.clauses)
        self.size = [len(c) for c in self.clauses]
        self.nsat = [0] * m
        self.nfalse = [0] * m
        self.nover = [sum(self.is_over[lit >> 1] for lit in c) for c in self.clauses]
        self.occ = [[] for _ in range(2 * nvars)]
        for ci, c in enumerate(self.clauses):
            for lit in c:
                self.occ[lit].append(ci)
        self.active = sum(1 for ci in range(m) if self.nover[ci] > 0)
        self.assigns = [-1] * nvars
        self.trail = []
        self.pending = []
        self.free_over = len(over)

    def _assign(self, lit):
        """Assign ``lit`` true; returns False on an immediate conflict."""
        v = lit >> 1
        self.assigns[v] = 1 - (lit & 1)
        self.trail.append(lit)
        over = self.is_over[v]
        if over:
            self.free_over -= 1
        ok = True
        nsat, nover, nfalse, size = self.nsat, self.nover, self.nfalse, self.size
        for ci in self.occ[lit]:
            was = nsat[ci] == 0 and nover[ci] > 0
            nsat[ci] += 1
            if over:
                nover[ci] -= 1
            if was:
                self.active -= 1
        for ci in self.occ[lit ^ 1]:
            was = nsat[ci] == 0 and nover[ci] > 0
            nfalse[ci] += 1
            if over:
                nover[ci] -= 1
            if was and nover[ci] == 0:
                self.active -= 1
            if nsat[ci] == 0:
                if nfalse[ci] == size[ci]:
                    ok = False
                elif nfalse[ci] == size[ci] - 1:
                    self.pending.append(ci)
        return ok

    def _unassign_to(self, pos):
        nsat, nover, nfalse = self.nsat, self.nover, self.nfalse
        trail = self.trail
        while len(trail) > pos:
            lit = trail.pop()
            v = lit >> 1
            over = self.is_over[v]
            if over:
                self.free_over += 1
            for ci in self.occ[lit ^ 1]:
                nfalse[ci] -= 1
                if over:
                    nover[ci] += 1
                if nsat[ci] == 0 and nover[ci] == 1 and over:
                    self.active += 1
            for ci in self.occ[lit]:
                nsat[ci] -= 1
                if over:
                    nover[ci] += 1
                if nsat[ci] == 0 and nover[ci] > 0:
                    self.active += 1
            self.assigns[v] = -1
        self.pending.clear()

    def _propagate(self):
        pending = self.pending
        assigns = self.assigns
        while pending:
            ci = pending.pop()
            if self.nsat[ci] > 0:
                continue
            unit = -1
            nun = 0
            for lit in self.clauses[ci]:
                if assigns[lit >> 1] < 0:
                    unit = lit
                    nun += 1
            if nun == 0:
                pending.clear()
                return False
            if nun > 1:
                continue
            if not self._assign(unit):
                pending.clear()
                return False
        return True

    def _pick(self, over_only):
        assigns = self.assigns
        for ci, c in enumerate(self.clauses):
            if self.nsat[ci] > 0:
                continue
            if over_only and self.nover[ci] == 0:
                continue
            for lit in c:
                v = lit >> 1
                if assigns[v] < 0 and (not over_only or self.is_over[v]):
                    return v
        return -1

    def _residual_sat(self):
        """Search for any completion; restores the trail before returning."""
        base = len(self.trail)
        stack = []
        result = False
        while True:
            v = self._pick(False)
            if v < 0:
                result = True
                break
            stack.append((len(self.trail), v))
            ok = self._assign(2 * v + 1) and self._propagate()
            while not ok:
                while stack and stack[-1][1] < 0:
                    stack.pop()
                if not stack:
                    break
                pos, u = stack.pop()
                self._unassign_to(pos)
                stack.append((pos, -1))
                ok = self._assign(2 * u) and self._propagate()
            if not ok:
                break
        self._unassign_to(base)
        return result

    def count(self):
        if self.unsat:
            return 0
        for ci in range(len(self.clauses)):
            if self.size[ci] == 1:
                self.pending.append(ci)
        total = 0
        stack = []
        ok = self._propagate()
        while True:
            if ok:
                if self.active == 0:
                    if self._residual_sat():
                        total += 1 << self.free_over
                    ok = False
                else:
                    v = self._pick(True)
                    stack.append((len(self.trail), v))
                    ok = self._assign(2 * v) and self._propagate()
                    continue
            while stack and stack[-1][1] < 0:
                stack.pop()
            if not stack:
                return total
            pos, u = stack.pop()
            self._unassign_to(pos)
            stack.append((pos, -1))
            ok = self._assign(2 * u + 1) and self._propagate()


def count_projected(nvars, clauses, over):
    """Number of assignments to ``over`` (1-based vars) that extend to a model."""
    return _Counter(nvars, clauses, over).count()
