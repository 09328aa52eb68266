"""Exact reference oracles: projected model counting and brute-force SMC."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .. import _kernels
from ..formula.circuit import Circuit
from ..formula.cnf import CnfFormula

DEFAULT_CAP = 26
MAX_DECISION_BITS = 16
_CHUNK = 1 << 20


class CapExceeded(ValueError):
    pass


def count_exact(cnf: CnfFormula, over: Iterable[int], cap: int | None = DEFAULT_CAP) -> int:
    """Number of assignments of ``over`` that extend to a model of ``cnf``."""
    over = sorted(set(over))
    if cap is not None and len(over) > cap:
        raise CapExceeded(f"{len(over)} projection variables exceed the cap of {cap}")
    for v in over:
        if not 1 <= v <= cnf.num_vars:
            raise ValueError(f"projection variable {v} is not allocated")
    return _kernels.count_projected(cnf.num_vars, cnf.clauses, over)


def bit_columns(names: Sequence) -> dict:
    """Columns enumerating all assignments of ``names``; ``names[0]`` is the LSB."""
    idx = np.arange(1 << len(names), dtype=np.int64)
    return {name: ((idx >> j) & 1).astype(bool) for j, name in enumerate(names)}


def count_circuit(f: Circuit, y_names: Sequence[str], fixed: dict) -> int:
    """Models of ``f`` over ``y_names`` with the other inputs fixed by ``fixed``."""
    total = 0
    d = len(y_names)
    for lo in range(0, 1 << d, _CHUNK):
        hi = min(1 << d, lo + _CHUNK)
        idx = np.arange(lo, hi, dtype=np.int64)
        cols = dict(fixed)
        for j, name in enumerate(y_names):
            cols[name] = ((idx >> j) & 1).astype(bool)
        out = np.broadcast_to(f.evaluate_batch(cols), idx.shape)
        total += int(np.count_nonzero(out))
    return total


def term_counts(instance, i: int) -> np.ndarray:
    """Exact model count of term ``i`` for every x (x0 as the LSB of the row index)."""
    from ..smc.instance import xs, ys

    term = instance.terms[i]
    n, d = instance.n, term.y_size
    x_names, y_names = xs(n), ys(d)
    counts = np.zeros(1 << n, dtype=np.int64)
    rows_per_chunk = max(1, _CHUNK >> d)
    yidx = np.arange(1 << d, dtype=np.int64)
    ycols = {name: ((yidx >> j) & 1).astype(bool)[None, :] for j, name in enumerate(y_names)}
    for lo in range(0, 1 << n, rows_per_chunk):
        hi = min(1 << n, lo + rows_per_chunk)
        xidx = np.arange(lo, hi, dtype=np.int64)
        cols = dict(ycols)
        for j, name in enumerate(x_names):
            cols[name] = ((xidx >> j) & 1).astype(bool)[:, None]
        out = np.broadcast_to(term.f.evaluate_batch(cols), (hi - lo, 1 << d))
        counts[lo:hi] = np.count_nonzero(out, axis=1)
    return counts


@dataclass
class BruteResult:
    answer: bool
    x: tuple[int, ...] | None = None
    b: tuple[int, ...] | None = None
    counts: tuple[int, ...] | None = None

    @property
    def witness(self):
        return None if self.x is None else (self.x, self.b)


def smc_brute_force(instance, thresholds: Sequence[int] | None = None,
                    cap: int = DEFAULT_CAP) -> BruteResult:
    """Decide the instance exactly by enumerating x, b and every y_i.

    ``thresholds`` overrides the counts ``2**q_i`` that active terms must
    reach.  The witness is the first satisfying (x, b) with x, then b, read
    as little-endian integers.
    """
    from ..smc.instance import bs, xs

    n, k = instance.n, instance.k
    if n + k > MAX_DECISION_BITS:
        raise CapExceeded(f"n + k = {n + k} exceeds {MAX_DECISION_BITS}")
    for t in instance.terms:
        if t.y_size > cap:
            raise CapExceeded(f"|y| = {t.y_size} exceeds the cap of {cap}")
    if thresholds is None:
        thresholds = [1 << t.q for t in instance.terms]
    if len(thresholds) != k:
        raise ValueError("one threshold per term required")

    ok = np.stack([term_counts(instance, i) >= thresholds[i] for i in range(k)], axis=1)
    # rows: x index major, b index minor
    idx = np.arange(1 << (n + k), dtype=np.int64)
    xi, bi = idx >> k, idx & ((1 << k) - 1)
    cols = {name: ((xi >> j) & 1).astype(bool) for j, name in enumerate(xs(n))}
    cols.update({name: ((bi >> j) & 1).astype(bool) for j, name in enumerate(bs(k))})
    phi = np.broadcast_to(instance.phi.evaluate_batch(cols), idx.shape)
    good = phi.copy()
    for i in range(k):
        bit = ((bi >> i) & 1).astype(bool)
        good &= ~bit | ok[xi, i]
    hits = np.flatnonzero(good)
    if hits.size == 0:
        return BruteResult(False)
    row = int(hits[0])
    x_int, b_int = row >> k, row & ((1 << k) - 1)
    x = tuple((x_int >> j) & 1 for j in range(n))
    b = tuple((b_int >> j) & 1 for j in range(k))
    counts = tuple(int(term_counts(instance, i)[x_int]) for i in range(k))
    return BruteResult(True, x, b, counts)
