"""Emergency-shelter placement as an SMC instance.

A residential node ``r`` is served by the number of simple directed paths
from ``r`` to any chosen shelter.  Each path is encoded as a unit flow
(one bit per edge) plus per-node position labels: the source and nodes off
the path carry label 0 and every flow edge ``(u, v)`` sets
``label(v) = label(u) + 1``.  The labels are fully determined by the flow,
so models correspond one-to-one with paths, and a cycle can never carry
consistent labels.
"""

from __future__ import annotations

import csv
import io
import random
from dataclasses import dataclass, field
from typing import Sequence

from ..formula.circuit import Circuit
from ..oracle.sat import OracleConfig
from ..smc.instance import CountingTerm, SmcInstance
from ..smc.params import SolveParams
from ..smc.solver import Decision, maximize_threshold


class GraphError(ValueError):
    pass


class Infeasible(RuntimeError):
    pass


@dataclass
class RoadGraph:
    nodes: list[str]
    edges: list[tuple[str, str]]
    residential: list[str]
    budget: int
    candidates: list[str] | None = None

    def __post_init__(self) -> None:
        self.nodes = [str(v) for v in self.nodes]
        self.edges = [(str(u), str(v)) for u, v in self.edges]
        self.residential = [str(v) for v in self.residential]
        names = set(self.nodes)
        if len(names) != len(self.nodes):
            raise GraphError("duplicate node names")
        if not self.residential:
            raise GraphError("at least one residential node is required")
        if self.budget < 1:
            raise GraphError("shelter budget m must be at least 1")
        seen = set()
        for u, v in self.edges:
            if u not in names or v not in names:
                raise GraphError(f"edge ({u}, {v}) references an unknown node")
            if u == v:
                raise GraphError(f"self-loop at {u}")
            if (u, v) in seen:
                raise GraphError(f"duplicate edge ({u}, {v})")
            seen.add((u, v))
        for r in self.residential:
            if r not in names:
                raise GraphError(f"unknown residential node {r}")
        if self.candidates is None:
            res = set(self.residential)
            self.candidates = [v for v in self.nodes if v not in res]
        else:
            self.candidates = [str(v) for v in self.candidates]
            bad = set(self.candidates) & set(self.residential)
            if bad:
                raise GraphError(f"residential nodes {sorted(bad)} cannot host shelters")
            for v in self.candidates:
                if v not in names:
                    raise GraphError(f"unknown candidate node {v}")

    def index(self, v: str) -> int:
        return self.nodes.index(v)

    def successors(self) -> dict[str, list[str]]:
        out: dict[str, list[str]] = {v: [] for v in self.nodes}
        for u, v in self.edges:
            out[u].append(v)
        return out

    def neighbors(self, v: str) -> list[str]:
        """Undirected neighbours in node order."""
        adj = {u for u, w in self.edges if w == v} | {w for u, w in self.edges if u == v}
        return [u for u in self.nodes if u in adj]


def label_bits(num_nodes: int) -> int:
    return max(1, (num_nodes - 1).bit_length())


@dataclass
class ShelterEncoding:
    instance: SmcInstance
    graph: RoadGraph
    label_width: int
    y_size: int
    notes: dict = field(default_factory=dict)

    def shelters(self, x: Sequence[int]) -> list[str]:
        return [v for v, bit in zip(self.graph.nodes, x) if bit]


def path_circuit(graph: RoadGraph, r: str) -> tuple[Circuit, int]:
    """Circuit over ``x*`` (shelters) and ``y*`` (flow bits then labels) for source ``r``."""
    c = Circuit()
    N, M = len(graph.nodes), len(graph.edges)
    B = label_bits(N)
    flow = [c.input(f"y{e}") for e in range(M)]
    label = {v: [c.input(f"y{M + j * B + b}") for b in range(B)] for j, v in enumerate(graph.nodes)}
    shelter = {v: c.input(f"x{j}") for j, v in enumerate(graph.nodes)}
    ins = {v: [] for v in graph.nodes}
    outs = {v: [] for v in graph.nodes}
    for e, (u, v) in enumerate(graph.edges):
        outs[u].append(flow[e])
        ins[v].append(flow[e])

    parts = []
    for v in graph.nodes:
        parts.append(c.at_most(1, ins[v]))
        parts.append(c.at_most(1, outs[v]))
        has_in = c.or_(*ins[v])
        has_out = c.or_(*outs[v])
        if v == r:
            parts.append(c.not_(has_in))
            parts.append(has_out)
        else:
            parts.append(c.implies(has_out, has_in))
            parts.append(c.implies(c.and_(has_in, c.not_(has_out)), shelter[v]))
        # off-path nodes (and the source) get the canonical label 0
        parts.append(c.implies(c.not_(has_in), c.and_(*[c.not_(b) for b in label[v]])))

    for e, (u, v) in enumerate(graph.edges):
        # label[v] == label[u] + 1 without overflow
        carry = c.const(True)
        eq = []
        for bu, bv in zip(label[u], label[v]):
            eq.append(c.iff(bv, c.xor(bu, carry)))
            carry = c.and_(bu, carry)
        eq.append(c.not_(carry))
        parts.append(c.implies(flow[e], c.and_(*eq)))
    c.set_output(c.and_(*parts))
    return c, M + N * B


def encode_shelter(graph: RoadGraph, q: Sequence[int] | int = 0) -> ShelterEncoding:
    """One counting term per residential node; φ = budget ∧ all b ∧ candidate restriction."""
    R = graph.residential
    qs = [q] * len(R) if isinstance(q, int) else list(q)
    if len(qs) != len(R):
        raise GraphError("one threshold exponent per residential node required")
    N = len(graph.nodes)
    phi = Circuit()
    xnodes = [phi.input(f"x{j}") for j in range(N)]
    allowed = set(graph.candidates)
    parts = [phi.at_most(graph.budget, [xnodes[j] for j, v in enumerate(graph.nodes) if v in allowed])]
    parts += [phi.not_(xnodes[j]) for j, v in enumerate(graph.nodes) if v not in allowed]
    parts += [phi.input(f"b{i}") for i in range(len(R))]
    phi.set_output(phi.and_(*parts))
    terms = []
    y_size = 0
    for r, qr in zip(R, qs):
        f, y_size = path_circuit(graph, r)
        terms.append(CountingTerm(f, y_size, qr))
    inst = SmcInstance(N, len(R), phi, tuple(terms))
    return ShelterEncoding(inst, graph, label_bits(N), y_size)


def count_paths_exact(graph: RoadGraph, u: str, v: str) -> int:
    """Simple directed paths from ``u`` to ``v`` with at least one edge."""
    if u == v:
        return 0
    succ = graph.successors()
    on_path = {u}

    def dfs(w: str) -> int:
        total = 0
        for z in succ[w]:
            if z == v:
                total += 1
            elif z not in on_path:
                on_path.add(z)
                total += dfs(z)
                on_path.discard(z)
        return total

    return dfs(u)


def path_table(graph: RoadGraph) -> dict[tuple[str, str], int]:
    return {(r, s): count_paths_exact(graph, r, s)
            for r in graph.residential for s in graph.nodes}


def evaluate_assignment(graph: RoadGraph, shelters) -> int:
    """#Path(R, S): simple paths summed over residential-shelter pairs."""
    return sum(count_paths_exact(graph, r, s) for r in graph.residential for s in shelters)


def local_search_baseline(graph: RoadGraph, m: int, rng: random.Random) -> set[str]:
    """``m`` first-improvement hill climbs on h(v) = #Path(R, {v}) over candidate nodes.

    Starts are drawn uniformly from the candidates; moves go to undirected
    neighbours that are candidates.  Repeated picks collapse, so the result
    may hold fewer than ``m`` nodes.
    """
    allowed = set(graph.candidates)
    scores = {v: evaluate_assignment(graph, [v]) for v in graph.candidates}
    chosen: set[str] = set()
    pool = list(graph.candidates)
    for _ in range(m):
        if not pool:
            break
        cur = rng.choice(pool)
        while True:
            for nb in graph.neighbors(cur):
                if nb in allowed and scores[nb] > scores[cur]:
                    cur = nb
                    break
            else:
                chosen.add(cur)
                break
    return chosen


def optimal_threshold(graph: RoadGraph, m: int | None = None) -> tuple[int | None, list[str]]:
    """Exhaustive best uniform exponent: max over placements of min_r floor(log2 paths_r)."""
    from itertools import combinations

    m = graph.budget if m is None else m
    table = path_table(graph)
    best, best_set = None, []
    cands = graph.candidates
    for size in range(1, min(m, len(cands)) + 1):
        for S in combinations(cands, size):
            worst = min(sum(table[r, s] for s in S) for r in graph.residential)
            if worst < 1:
                continue
            q = worst.bit_length() - 1
            if best is None or q > best:
                best, best_set = q, list(S)
    return best, best_set


@dataclass
class ShelterResult:
    shelters: list[str]
    q: int
    paths: int
    per_residential: dict[str, int]
    decision: Decision
    probes: list[tuple[int, bool]]
    instance: SmcInstance      # the instance at the accepted q


def solve_shelter(graph: RoadGraph, params: SolveParams | None = None,
                  oracle: OracleConfig | None = None, q_range: tuple[int, int] | None = None,
                  jobs: int = 1) -> ShelterResult:
    """Bisect a shared exponent q across residential terms; report the witness placement."""
    enc = encode_shelter(graph, 0)
    lo, hi = q_range if q_range is not None else (0, min(enc.y_size, len(graph.edges)))
    res = maximize_threshold(enc.instance, list(range(enc.instance.k)), lo, hi, params, oracle,
                             jobs=jobs)
    if res.infeasible:
        raise Infeasible(f"no placement passes even q={lo}")
    S = enc.shelters(res.decision.x)
    if len(S) > graph.budget or set(S) & set(graph.residential):
        raise RuntimeError("witness violates the placement constraints")
    per = {r: sum(count_paths_exact(graph, r, s) for s in S) for r in graph.residential}
    final = enc.instance.with_q([res.q] * enc.instance.k)
    return ShelterResult(S, res.q, sum(per.values()), per, res.decision, res.probes, final)


# -- file formats --------------------------------------------------------------

def parse_graph(text: str) -> RoadGraph:
    """Edge-list format.

    Header lines ``residential a b``, ``budget 2``, optional ``candidates ...``
    and ``nodes ...``; every other non-comment line is an edge ``u v``.
    Nodes default to the order of first appearance.
    """
    nodes: list[str] = []
    edges = []
    residential: list[str] = []
    budget = None
    candidates = None
    declared_nodes = None

    def see(v: str) -> None:
        if v not in nodes:
            nodes.append(v)

    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        key = parts[0].lower()
        if key == "residential":
            residential = parts[1:]
        elif key == "budget":
            if len(parts) != 2 or not parts[1].isdigit():
                raise GraphError(f"line {lineno}: expected 'budget <m>'")
            budget = int(parts[1])
        elif key == "candidates":
            candidates = parts[1:]
        elif key == "nodes":
            declared_nodes = parts[1:]
        elif len(parts) == 2:
            see(parts[0])
            see(parts[1])
            edges.append((parts[0], parts[1]))
        else:
            raise GraphError(f"line {lineno}: expected an edge 'u v' or a header")
    if budget is None:
        raise GraphError("missing 'budget' header")
    if declared_nodes is not None:
        extra = [v for v in nodes if v not in declared_nodes]
        if extra:
            raise GraphError(f"edges use undeclared nodes {extra}")
        nodes = declared_nodes
    for v in residential + (candidates or []):
        see(v)
    return RoadGraph(nodes, edges, residential, budget, candidates)


def format_graph(graph: RoadGraph) -> str:
    lines = ["nodes " + " ".join(graph.nodes),
             "residential " + " ".join(graph.residential),
             f"budget {graph.budget}",
             "candidates " + " ".join(graph.candidates)]
    lines += [f"{u} {v}" for u, v in graph.edges]
    return "\n".join(lines) + "\n"


def graph_from_csv(nodes_csv: str, edges_csv: str, budget: int) -> RoadGraph:
    """Node CSV with columns ``id`` and ``kind`` (residential/candidate/other),
    edge CSV with columns ``from`` and ``to``.  Rows marked ``bidirectional=1``
    add both directions."""
    nodes, residential, candidates = [], [], []
    for row in csv.DictReader(io.StringIO(nodes_csv)):
        v = row["id"].strip()
        nodes.append(v)
        kind = (row.get("kind") or "other").strip().lower()
        if kind == "residential":
            residential.append(v)
        elif kind == "candidate":
            candidates.append(v)
    edges = []
    for row in csv.DictReader(io.StringIO(edges_csv)):
        u, v = row["from"].strip(), row["to"].strip()
        edges.append((u, v))
        if (row.get("bidirectional") or "0").strip() in ("1", "true", "yes"):
            edges.append((v, u))
    return RoadGraph(nodes, edges, residential, budget, candidates or None)


def random_graph(num_nodes: int, edge_prob: float, rng: random.Random, residential: int = 1,
                 budget: int = 2, back_prob: float = 0.1) -> RoadGraph:
    """Mostly forward (DAG-like) random digraph with a few backward edges."""
    nodes = [f"v{i}" for i in range(num_nodes)]
    edges = []
    for i in range(num_nodes):
        for j in range(num_nodes):
            if i == j:
                continue
            p = edge_prob if i < j else back_prob * edge_prob
            if rng.random() < p:
                edges.append((nodes[i], nodes[j]))
    return RoadGraph(nodes, edges, nodes[:residential], budget)


def grid_graph(rows: int, cols: int, residential: Sequence[str] = ("g0_0",), budget: int = 1,
               candidates: Sequence[str] | None = None) -> RoadGraph:
    """Right/down grid ``g<r>_<c>``."""
    nodes = [f"g{r}_{c}" for r in range(rows) for c in range(cols)]
    edges = []
    for r in range(rows):
        for c in range(cols):
            if c + 1 < cols:
                edges.append((f"g{r}_{c}", f"g{r}_{c + 1}"))
            if r + 1 < rows:
                edges.append((f"g{r}_{c}", f"g{r + 1}_{c}"))
    return RoadGraph(nodes, edges, list(residential), budget, list(candidates) if candidates else None)
