"""Robust supply-chain design as an SMC instance.

Buyer ``v`` wants enough of material ``d`` in expectation over random
events::

    E_θ[ Σ_{s ∈ S(d)} c(s,v) · I(x_sv, θ) ] >= 2^q

where ``I`` is 1 when the trade is bought and no occurring event destroys
it.  Each (v, d) pair becomes one counting term whose models are
(selected supplier, event outcome, discretization bits).  Per-event
Bernoulli weights and the capacity table are embedded separately, so the
model count times the product of the per-factor scales ``M_j / 2^l``
brackets the expectation.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Sequence

from ..discretize import DEFAULT_BITS, WeightTable, forced_zero, threshold_bits
from ..formula.circuit import Circuit
from ..oracle.sat import OracleConfig
from ..smc.instance import CountingTerm, SmcInstance
from ..smc.params import SolveParams
from ..smc.solver import Decision, maximize_threshold

MAX_EVENTS = 20


class NetworkError(ValueError):
    pass


class Infeasible(RuntimeError):
    pass


def _frac(v) -> Fraction:
    return Fraction(repr(v)) if isinstance(v, float) else Fraction(v)


@dataclass
class Supplier:
    name: str
    tier: int
    budget: int = 0
    produces: tuple[str, ...] = ()
    demands: tuple[str, ...] = ()


@dataclass
class Trade:
    src: str
    dst: str
    cost: int
    capacity: int


@dataclass
class Event:
    p: Fraction
    destroys: frozenset[tuple[str, str]]


@dataclass
class SupplyNetwork:
    suppliers: list[Supplier]
    trades: list[Trade]
    events: list[Event] = field(default_factory=list)
    thresholds: dict[tuple[str, str], int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        names = [s.name for s in self.suppliers]
        if len(set(names)) != len(names):
            raise NetworkError("duplicate supplier names")
        self._by_name = {s.name: s for s in self.suppliers}
        seen = set()
        for t in self.trades:
            if t.src not in self._by_name or t.dst not in self._by_name:
                raise NetworkError(f"trade {t.src}->{t.dst} references an unknown supplier")
            if (t.src, t.dst) in seen:
                raise NetworkError(f"duplicate trade {t.src}->{t.dst}")
            seen.add((t.src, t.dst))
            for val, what in ((t.cost, "cost"), (t.capacity, "capacity")):
                if not isinstance(val, int) or val < 0:
                    raise NetworkError(f"trade {t.src}->{t.dst}: {what} must be a nonnegative integer")
        for s in self.suppliers:
            if not isinstance(s.budget, int) or s.budget < 0:
                raise NetworkError(f"{s.name}: budget must be a nonnegative integer")
        for ev in self.events:
            if not 0 <= ev.p <= 1:
                raise NetworkError("event probabilities must lie in [0, 1]")
            for e in ev.destroys:
                if e not in seen:
                    raise NetworkError(f"event destroys unknown trade {e[0]}->{e[1]}")
        for s in self.suppliers:
            for d in s.demands:
                if not self.producers(d):
                    raise NetworkError(f"{s.name} demands {d!r} but nobody produces it")

    @property
    def edges(self) -> list[tuple[str, str]]:
        return [(t.src, t.dst) for t in self.trades]

    def supplier(self, name: str) -> Supplier:
        return self._by_name[name]

    def producers(self, d: str) -> list[str]:
        return [s.name for s in self.suppliers if d in s.produces]

    @property
    def markets(self) -> list[str]:
        top = max(s.tier for s in self.suppliers)
        return [s.name for s in self.suppliers if s.tier == top]

    def demand_pairs(self) -> list[tuple[str, str]]:
        return [(s.name, d) for s in self.suppliers for d in s.demands]

    def trades_for(self, v: str, d: str) -> list[int]:
        """Indices of trades ``s -> v`` with ``s`` producing ``d``."""
        prod_set = set(self.producers(d))
        return [j for j, t in enumerate(self.trades) if t.dst == v and t.src in prod_set]


# -- semantics -----------------------------------------------------------------

def trade_survives(net: SupplyNetwork, plan: Sequence[int], edge: int | tuple[str, str],
                   theta: Sequence[int]) -> int:
    j = edge if isinstance(edge, int) else net.edges.index(tuple(edge))
    if not plan[j]:
        return 0
    e = net.edges[j]
    return int(not any(theta[l] and e in ev.destroys for l, ev in enumerate(net.events)))


def scenarios(net: SupplyNetwork, events: Sequence[int] | None = None):
    """Yield ``(theta, P(theta))`` over all outcomes of the listed events."""
    idx = list(range(len(net.events))) if events is None else list(events)
    if len(idx) > MAX_EVENTS:
        raise NetworkError(f"{len(idx)} events exceed the enumeration limit of {MAX_EVENTS}")
    for bits in product((0, 1), repeat=len(idx)):
        theta = [0] * len(net.events)
        p = Fraction(1)
        for l, bit in zip(idx, bits):
            theta[l] = bit
            p *= net.events[l].p if bit else 1 - net.events[l].p
        yield theta, p


def expected_supply(net: SupplyNetwork, plan: Sequence[int], v: str, d: str) -> Fraction:
    """Exact expectation of the (v, d) term."""
    js = net.trades_for(v, d)
    rel = relevant_events(net, js)
    total = Fraction(0)
    for theta, p in scenarios(net, rel):
        total += p * sum(net.trades[j].capacity * trade_survives(net, plan, j, theta) for j in js)
    return total


def evaluate_plan(net: SupplyNetwork, plan: Sequence[int]) -> Fraction:
    """Expected capacity delivered into the market tier, by scenario enumeration."""
    markets = set(net.markets)
    js = [j for j, t in enumerate(net.trades) if t.dst in markets]
    total = Fraction(0)
    for theta, p in scenarios(net):
        total += p * sum(net.trades[j].capacity * trade_survives(net, plan, j, theta) for j in js)
    return total


def closed_form_value(net: SupplyNetwork, plan: Sequence[int]) -> Fraction:
    """Per-edge product formula; equals :func:`evaluate_plan` for independent events."""
    markets = set(net.markets)
    total = Fraction(0)
    for j, t in enumerate(net.trades):
        if t.dst in markets and plan[j]:
            keep = Fraction(1)
            for ev in net.events:
                if (t.src, t.dst) in ev.destroys:
                    keep *= 1 - ev.p
            total += t.capacity * keep
    return total


def budgets_ok(net: SupplyNetwork, plan: Sequence[int]) -> bool:
    spent: dict[str, int] = {}
    for j, t in enumerate(net.trades):
        if plan[j]:
            spent[t.dst] = spent.get(t.dst, 0) + t.cost
    return all(spent.get(s.name, 0) <= s.budget for s in net.suppliers)


def random_feasible_plan(net: SupplyNetwork, rng: random.Random) -> list[int]:
    """Visit trades in random order and keep each with probability 1/2 if affordable."""
    plan = [0] * len(net.trades)
    spent = {s.name: 0 for s in net.suppliers}
    order = list(range(len(net.trades)))
    rng.shuffle(order)
    for j in order:
        t = net.trades[j]
        if rng.random() < 0.5 and spent[t.dst] + t.cost <= net.supplier(t.dst).budget:
            plan[j] = 1
            spent[t.dst] += t.cost
    return plan


# -- encoding ------------------------------------------------------------------

def relevant_events(net: SupplyNetwork, trade_ids: Sequence[int]) -> list[int]:
    edges = {net.edges[j] for j in trade_ids}
    return [l for l, ev in enumerate(net.events) if ev.destroys & edges]


@dataclass
class TermLayout:
    v: str
    d: str
    trades: list[int]
    events: list[int]
    y_size: int
    scale: Fraction            # multiply the term's model count by this
    factor_max: list[Fraction]  # M_j per factor (events first, then capacity)


@dataclass
class SupplyEncoding:
    instance: SmcInstance
    network: SupplyNetwork
    l: int
    layouts: list[TermLayout]
    forced: list[int]

    def plan(self, x: Sequence[int]) -> list[int]:
        return list(x)

    def count_exponent(self, i: int, q: int) -> int:
        """Smallest integer e with ``scale_i * 2^e >= 2^q``."""
        return exponent_for(self.layouts[i].scale, q)


def exponent_for(scale: Fraction, q: int) -> int:
    target = Fraction(2) ** q / scale
    e = max(0, math.ceil(math.log2(target))) if target > 0 else 0
    while Fraction(2) ** e < target:
        e += 1
    while e > 0 and Fraction(2) ** (e - 1) >= target:
        e -= 1
    return e


def bernoulli_table(p: Fraction, name: str) -> WeightTable:
    return WeightTable([name], [1 - p, p])


def term_circuit(net: SupplyNetwork, v: str, d: str, l: int) -> tuple[Circuit, TermLayout]:
    js = net.trades_for(v, d)
    if not js:
        raise NetworkError(f"{v} has no trade that supplies {d!r}")
    caps = [Fraction(net.trades[j].capacity) for j in js]
    if max(caps) == 0:
        raise NetworkError(f"every trade supplying {d!r} to {v} has zero capacity")
    rel = relevant_events(net, js)
    c = Circuit()
    pos = 0

    def take(count: int) -> list[int]:
        nonlocal pos
        nodes = [c.input(f"y{pos + i}") for i in range(count)]
        pos += count
        return nodes

    sel = take(len(js))
    theta = take(len(rel))
    parts = [c.exactly(1, sel)]
    for s_node, j in zip(sel, js):
        edge = net.edges[j]
        safe = [c.not_(th) for th, l_ in zip(theta, rel) if edge in net.events[l_].destroys]
        parts.append(c.implies(s_node, c.and_(c.input(f"x{j}"), *safe)))

    scale = Fraction(1)
    maxima = []
    for th, l_ in zip(theta, rel):
        table = bernoulli_table(net.events[l_].p, "theta")
        ynodes = take(l)
        parts.append(_embed_nodes(c, table, [th], ynodes))
        maxima.append(table.M)
        scale *= table.M / 2**l
    Mc = max(caps)
    parts.append(threshold_bits(c, list(zip(sel, caps)), Mc, take(l)))
    maxima.append(Mc)
    scale *= Mc / 2**l
    c.set_output(c.and_(*parts))
    return c, TermLayout(v, d, js, rel, pos, scale, maxima)


def _embed_nodes(c: Circuit, table: WeightTable, xnodes: list[int], ynodes: list[int]) -> int:
    # embed_into with caller-owned y inputs
    cases = []
    for idx, w in enumerate(table.values):
        lits = [x if (idx >> b) & 1 else c.not_(x) for b, x in enumerate(xnodes)]
        cases.append((c.and_(*lits), w))
    return threshold_bits(c, cases, table.M, ynodes)


def encode_supply(net: SupplyNetwork, l: int = DEFAULT_BITS, q: int | dict | None = None,
                  pairs: Sequence[tuple[str, str]] | None = None) -> SupplyEncoding:
    """φ = per-buyer budgets ∧ (b forced for market terms and declared thresholds).

    ``q`` gives expectation exponents (one int for all, or a map keyed by
    (v, d)); missing entries fall back to ``net.thresholds`` and then to 0.
    Term thresholds are converted to count exponents through the scale.
    """
    if l < 1:
        raise NetworkError("need at least one discretization bit")
    pairs = list(pairs) if pairs is not None else net.demand_pairs()
    if not pairs:
        raise NetworkError("network declares no demands")
    n = len(net.trades)
    terms, layouts, forced = [], [], []
    markets = set(net.markets)
    for i, (v, d) in enumerate(pairs):
        f, lay = term_circuit(net, v, d, l)
        if isinstance(q, int):
            qe = q
        elif isinstance(q, dict) and (v, d) in q:
            qe = q[v, d]
        else:
            qe = net.thresholds.get((v, d), 0)
        qc = min(exponent_for(lay.scale, qe), lay.y_size)
        terms.append(CountingTerm(f, lay.y_size, qc))
        layouts.append(lay)
        if v in markets or (v, d) in net.thresholds:
            forced.append(i)

    phi = Circuit()
    xnodes = [phi.input(f"x{j}") for j in range(n)]
    parts = []
    for s in net.suppliers:
        inc = [(net.trades[j].cost, xnodes[j]) for j, t in enumerate(net.trades) if t.dst == s.name]
        if inc:
            parts.append(phi.pb_leq(inc, s.budget))
    parts += [phi.input(f"b{i}") for i in forced]
    phi.set_output(phi.and_(*parts))
    inst = SmcInstance(n, len(pairs), phi, tuple(terms))
    return SupplyEncoding(inst, net, l, layouts, forced)


def bracket(net: SupplyNetwork, plan: Sequence[int], lay: TermLayout, l: int
            ) -> tuple[Fraction, Fraction, Fraction]:
    """(exact expectation, scaled model count, per-factor upper bound) for one term.

    The scaled count is computed pointwise: each factor with weight ``w``
    and maximum ``M`` contributes ``2^(free bits)`` models, which lies in
    ``[w, 2w + M/2^l]`` after scaling.
    """
    caps = [Fraction(net.trades[j].capacity) for j in lay.trades]
    Mc = lay.factor_max[-1]
    exact = expected_supply(net, plan, lay.v, lay.d)
    scaled = Fraction(0)
    upper = Fraction(0)
    for theta, _ in scenarios(net, lay.events):
        ev_cnt = Fraction(1)
        ev_up = Fraction(1)
        for l_, M in zip(lay.events, lay.factor_max):
            p = net.events[l_].p
            w = p if theta[l_] else 1 - p
            ev_cnt *= (M / 2**l) * (1 << sum(not forced_zero(w, M, l, i) for i in range(1, l + 1)))
            ev_up *= 2 * w + M / 2**l
        for j, cap in zip(lay.trades, caps):
            if not trade_survives(net, plan, j, theta):
                continue
            cap_cnt = (Mc / 2**l) * (1 << sum(not forced_zero(cap, Mc, l, i)
                                              for i in range(1, l + 1)))
            scaled += ev_cnt * cap_cnt
            upper += ev_up * (2 * cap + Mc / 2**l)
    return exact, scaled, upper


@dataclass
class SupplyResult:
    plan: list[int]
    value: Fraction
    q: dict[tuple[str, str], int]
    decision: Decision
    probes: list[tuple[int, bool]]
    terms: list[dict]
    instance: SmcInstance      # the instance at the accepted thresholds


def solve_supply(net: SupplyNetwork, params: SolveParams | None = None,
                 oracle: OracleConfig | None = None, l: int = DEFAULT_BITS,
                 q_range: tuple[int, int] | None = None, jobs: int = 1) -> SupplyResult:
    """Maximise each market term's expectation exponent in turn.

    Only market pairs and pairs with a declared threshold are encoded;
    other pairs would enter with a free switch and constrain nothing.
    Market buyers have disjoint budgets, so one pass of per-term bisection
    (each term searched with the others held at their accepted values)
    suffices.
    """
    markets = set(net.markets)
    pairs = [(v, d) for v, d in net.demand_pairs() if v in markets or (v, d) in net.thresholds]
    enc = encode_supply(net, l, None, pairs)
    market_terms = [i for i, lay in enumerate(enc.layouts) if lay.v in markets]
    if not market_terms:
        raise NetworkError("no market-tier demands to optimise")
    if q_range is None:
        lo = min(math.floor(math.log2(enc.layouts[i].scale)) for i in market_terms)
        best = max(sum(net.trades[j].capacity for j in enc.layouts[i].trades) for i in market_terms)
        hi = max(lo, math.floor(math.log2(best)) + 1)
        q_range = (lo, hi)
    lo, hi = q_range
    qs = {i: lo for i in market_terms}
    inst = enc.instance.with_q({i: min(enc.count_exponent(i, lo), enc.instance.terms[i].y_size)
                                for i in market_terms})
    decision = None
    probes: list[tuple[int, bool]] = []
    for i in market_terms:
        res = maximize_threshold(inst, [i], lo, hi, params, oracle, jobs=jobs,
                                 q_map=enc.count_exponent)
        probes.extend(res.probes)
        if res.infeasible:
            if decision is None:
                raise Infeasible(f"no trading plan passes even q={lo}")
            continue  # the previous decision already holds this term at lo
        qs[i] = res.q
        decision = res.decision
        inst = inst.with_q({i: min(enc.count_exponent(i, res.q), inst.terms[i].y_size)})
    plan = enc.plan(decision.x)
    if not budgets_ok(net, plan):
        raise RuntimeError("witness plan violates a budget")
    report = []
    for i, lay in enumerate(enc.layouts):
        exact, scaled, upper = bracket(net, plan, lay, l)
        report.append({"v": lay.v, "d": lay.d, "scale": lay.scale, "expectation": exact,
                       "scaled_count": scaled, "upper": upper, "q": qs.get(i),
                       "count_q": inst.terms[i].q})
    q_out = {(enc.layouts[i].v, enc.layouts[i].d): q for i, q in qs.items()}
    return SupplyResult(plan, evaluate_plan(net, plan), q_out, decision, probes, report, inst)


# -- file formats and generators -----------------------------------------------

def _names(v) -> tuple[str, ...]:
    return (v,) if isinstance(v, str) else tuple(map(str, v))


def network_from_dict(doc: dict) -> SupplyNetwork:
    try:
        sups = [Supplier(str(s["id"]), int(s.get("tier", 0)), int(s.get("budget", 0)),
                         _names(s.get("produces", ())), _names(s.get("demands", ())))
                for s in doc["nodes"]]
        trades = [Trade(str(e["from"]), str(e["to"]), e.get("cost", 0), e.get("capacity", 0))
                  for e in doc["edges"]]
        events = [Event(_frac(ev["p"]), frozenset((str(a), str(b)) for a, b in ev.get("destroys", [])))
                  for ev in doc.get("events", [])]
        thresholds = {}
        for key, val in (doc.get("thresholds") or {}).items():
            v, d = key.split(":", 1)
            thresholds[v, d] = int(val)
    except (KeyError, TypeError, ValueError) as exc:
        raise NetworkError(f"malformed network document: {exc!r}") from None
    return SupplyNetwork(sups, trades, events, thresholds)


def network_to_dict(net: SupplyNetwork) -> dict:
    return {
        "nodes": [{"id": s.name, "tier": s.tier, "budget": s.budget, "produces": list(s.produces),
                   "demands": list(s.demands)} for s in net.suppliers],
        "edges": [{"from": t.src, "to": t.dst, "cost": t.cost, "capacity": t.capacity}
                  for t in net.trades],
        "events": [{"p": str(ev.p), "destroys": sorted(list(e) for e in ev.destroys)}
                   for ev in net.events],
        "thresholds": {f"{v}:{d}": q for (v, d), q in net.thresholds.items()},
    }


def load_network(path: str) -> SupplyNetwork:
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise NetworkError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    return network_from_dict(doc)


def generate_network(rng: random.Random, tiers: Sequence[int] = (2, 2, 2), num_events: int = 3,
                     cost_mu: float = 4.0, cost_sd: float = 1.5, cap_mu: float = 8.0,
                     cap_sd: float = 3.0, budget_frac: float = 0.6, p_mu: float = 0.25,
                     p_sd: float = 0.1, edge_prob: float = 1.0) -> SupplyNetwork:
    """Tiered network with Gaussian-drawn costs, capacities and event probabilities.

    Tier ``t`` produces material ``m<t>``; tier ``t+1`` demands it.
    Probabilities are rounded to hundredths so they stay exact rationals.
    """
    sups: list[Supplier] = []
    layers = []
    for t, size in enumerate(tiers):
        layer = [f"t{t}n{i}" for i in range(size)]
        layers.append(layer)
        for name in layer:
            produces = (f"m{t}",) if t + 1 < len(tiers) else ()
            demands = (f"m{t - 1}",) if t > 0 else ()
            sups.append(Supplier(name, t, 0, produces, demands))
    trades = []
    for t in range(len(tiers) - 1):
        for v in layers[t + 1]:
            ins = [u for u in layers[t] if rng.random() < edge_prob] or [rng.choice(layers[t])]
            for u in ins:
                cost = max(1, round(rng.gauss(cost_mu, cost_sd)))
                cap = max(1, round(rng.gauss(cap_mu, cap_sd)))
                trades.append(Trade(u, v, cost, cap))
    for s in sups:
        inc = sum(t.cost for t in trades if t.dst == s.name)
        s.budget = int(round(budget_frac * inc))
    events = []
    edges = [(t.src, t.dst) for t in trades]
    for _ in range(num_events):
        p = min(0.95, max(0.01, round(rng.gauss(p_mu, p_sd), 2)))
        hit = rng.sample(edges, min(len(edges), rng.randint(1, 3)))
        events.append(Event(Fraction(str(p)), frozenset(hit)))
    return SupplyNetwork(sups, trades, events)
