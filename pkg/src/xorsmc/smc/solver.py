"""XOR-Binary, the XOR-SMC compiler, and threshold search."""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

from ..formula.circuit import Circuit
from ..formula.cnf import CnfFormula
from ..formula.encoders import assert_circuit, encode_at_least_k
from ..oracle.exact import count_circuit
from ..oracle.sat import OracleConfig, solve
from ..xorhash import HashRng, encode_parity, sample_parity
from .instance import SmcInstance, bs, xs, ys
from .params import SolveParams, majority


class ConsistencyError(RuntimeError):
    """A witness failed re-verification against φ."""


def _x_bits(x0) -> dict[str, int]:
    if isinstance(x0, Mapping):
        return {str(k): int(v) for k, v in x0.items()}
    return {f"x{i}": int(v) for i, v in enumerate(x0)}


def hashed_formula(f: Circuit, x0, q: int, y_size: int, rng: HashRng) -> CnfFormula:
    """CNF of ``f(x0, y) ∧ XOR_1(y) ∧ ... ∧ XOR_q(y)`` over a fresh ``y`` block."""
    if not 0 <= q <= y_size:
        raise ValueError(f"q={q} outside [0, {y_size}]")
    cnf = CnfFormula()
    y = cnf.new_vars(y_size, "y")
    bind: dict = {name: v for name, v in zip(ys(y_size), y)}
    for name, bit in _x_bits(x0).items():
        t = cnf.true_lit()
        bind[name] = t if bit else -t
    assert_circuit(cnf, f, bind)
    for j in range(q):
        encode_parity(cnf, sample_parity(y, rng.child(j)))
    return cnf


def xor_binary(f: Circuit, x0, q: int, y_size: int, rng: HashRng,
               oracle: OracleConfig | None = None) -> bool:
    """One hashed satisfiability test: is ``f(x0, ·)`` still satisfiable after ``q`` parities?"""
    return solve(hashed_formula(f, x0, q, y_size, rng), oracle).satisfiable


def build_xor_smc_formula(instance: SmcInstance, params: SolveParams) -> CnfFormula:
    """Compile the instance into one CNF with ``T`` hashed repetitions and a majority."""
    T, _, _ = params.resolve(instance.n, instance.k)
    cnf = CnfFormula()
    x = cnf.new_vars(instance.n, "x")
    b = cnf.new_vars(instance.k, "b")
    copies = {}
    for t in range(T):
        for i, term in enumerate(instance.terms):
            copies[i, t] = cnf.new_vars(term.y_size, f"y[{i}][{t}]")
    guards = cnf.new_vars(T, "guards")
    xbind = dict(zip(xs(instance.n), x))

    root = HashRng(params.seed)
    for t in range(T):
        g = guards[t]
        for i, term in enumerate(instance.terms):
            y = copies[i, t]
            guard = [-g, -b[i]]
            bind = dict(xbind)
            bind.update(zip(ys(term.y_size), y))
            assert_circuit(cnf, term.f, bind, guard)
            for j in range(term.q):
                encode_parity(cnf, sample_parity(y, root.child(i, t, j)), guard)
    encode_at_least_k(cnf, list(guards), majority(T))

    phibind = dict(xbind)
    phibind.update(zip(bs(instance.k), b))
    assert_circuit(cnf, instance.phi, phibind)
    return cnf


@dataclass
class Decision:
    answer: bool
    witness: tuple[tuple[int, ...], tuple[int, ...]] | None = None
    diagnostics: dict = field(default_factory=dict)
    formula: CnfFormula | None = field(default=None, repr=False, compare=False)

    @property
    def x(self):
        return None if self.witness is None else self.witness[0]

    @property
    def b(self):
        return None if self.witness is None else self.witness[1]


def verify_witness(instance: SmcInstance, x: Sequence[int], b: Sequence[int],
                   c: int) -> list[dict]:
    """Exact per-term counts for active terms, checked against ``2^(q_i - c)``."""
    fixed = {f"x{j}": bool(v) for j, v in enumerate(x)}
    out = []
    for i, term in enumerate(instance.terms):
        if not b[i]:
            continue
        cnt = count_circuit(term.f, ys(term.y_size), fixed)
        out.append({"term": i, "count": cnt, "q": term.q,
                    "ok": cnt >= 2.0 ** (term.q - c)})
    return out


def xor_smc(instance: SmcInstance, params: SolveParams | None = None,
            oracle: OracleConfig | None = None, verify: bool = False,
            keep_formula: bool = False) -> Decision:
    """Decide the instance with a single oracle call on the compiled formula."""
    params = params or SolveParams()
    T, c, a = params.resolve(instance.n, instance.k)
    start = time.perf_counter()
    cnf = build_xor_smc_formula(instance, params)
    built = time.perf_counter()
    res = solve(cnf, oracle)
    diag = {
        "T": T, "c": c, "alpha": a, "majority": majority(T), "eta": params.eta,
        "seed": params.seed, "num_vars": cnf.num_vars, "num_clauses": len(cnf.clauses),
        "oracle_calls": 1, "build_seconds": built - start, "solve_seconds": res.seconds,
        "oracle": res.stats,
    }
    if not res.satisfiable:
        return Decision(False, None, diag, cnf if keep_formula else None)

    x = tuple(res.model[v - 1] for v in cnf.group("x"))
    b = tuple(res.model[v - 1] for v in cnf.group("b"))
    cols = {f"x{j}": bool(v) for j, v in enumerate(x)}
    cols.update({f"b{j}": bool(v) for j, v in enumerate(b)})
    if not instance.phi.evaluate(cols):
        raise ConsistencyError("witness does not satisfy phi")
    guards_on = [t for t, g in enumerate(cnf.group("guards")) if res.model[g - 1]]
    diag["guards_on"] = guards_on
    diag["guards_on_count"] = len(guards_on)
    if verify:
        diag["verify"] = verify_witness(instance, x, b, c)
    return Decision(True, (x, b), diag, cnf if keep_formula else None)


@dataclass
class ThresholdResult:
    q: int | None
    decision: Decision | None
    probes: list[tuple[int, bool]]
    q_lo: int

    @property
    def infeasible(self) -> bool:
        return self.q is None


def maximize_threshold(instance: SmcInstance, terms: int | Sequence[int], q_lo: int, q_hi: int,
                       params: SolveParams | None = None, oracle: OracleConfig | None = None,
                       jobs: int = 1, verify: bool = False,
                       q_map: Callable[[int, int], int] | None = None) -> ThresholdResult:
    """Largest q in ``[q_lo, q_hi]`` accepted by :func:`xor_smc` for the given term(s).

    Every designated term gets the same exponent, or ``q_map(i, q)`` when
    given (clipped to ``[0, y_size]``), which lets q live in another unit.
    Decisions are taken as authoritative and the search assumes
    monotonicity.  With ``jobs > 1`` each round probes up to ``jobs``
    points concurrently.
    """
    params = params or SolveParams()
    idx = [terms] if isinstance(terms, int) else list(terms)
    if q_map is None:
        cap = min(instance.terms[i].y_size for i in idx)
        if not 0 <= q_lo <= q_hi <= cap:
            raise ValueError(f"need 0 <= q_lo <= q_hi <= {cap}, got [{q_lo}, {q_hi}]")
    elif q_lo > q_hi:
        raise ValueError(f"empty search interval [{q_lo}, {q_hi}]")

    def term_q(i: int, q: int) -> int:
        if q_map is None:
            return q
        return min(max(0, q_map(i, q)), instance.terms[i].y_size)

    def probe(q: int) -> Decision:
        return xor_smc(instance.with_q({i: term_q(i, q) for i in idx}), params, oracle,
                       verify=verify)

    lo, hi = q_lo, q_hi
    best: tuple[int, Decision] | None = None
    probes: list[tuple[int, bool]] = []
    pool = ThreadPoolExecutor(jobs) if jobs > 1 else None
    try:
        while lo <= hi:
            width = hi - lo + 1
            m = min(max(1, jobs), width)
            points = sorted({lo + (width * (r + 1)) // (m + 1) for r in range(m)})
            if pool is None:
                results = [probe(q) for q in points]
            else:
                results = list(pool.map(probe, points))
            probes.extend((q, d.answer) for q, d in zip(points, results))
            trues = [(q, d) for q, d in zip(points, results) if d.answer]
            if trues:
                best = max(trues, key=lambda p: p[0])
                above = [q for q, d in zip(points, results) if not d.answer and q > best[0]]
                lo = best[0] + 1
                hi = min(above) - 1 if above else hi
            else:
                hi = points[0] - 1
    finally:
        if pool is not None:
            pool.shutdown()
    if best is None:
        return ThresholdResult(None, None, probes, q_lo)
    return ThresholdResult(best[0], best[1], probes, q_lo)
