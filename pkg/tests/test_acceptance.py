"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line."""

import json
import math
import random
import subprocess
import sys
import time
from fractions import Fraction

import mpmath
import pytest

from conftest import random_cnf, random_instance
from xorsmc.apps.shelter import (count_paths_exact, evaluate_assignment, local_search_baseline,
                                 optimal_threshold, path_circuit, random_graph, solve_shelter)
from xorsmc.apps.supply import (bracket, budgets_ok, evaluate_plan, generate_network,
                                random_feasible_plan, solve_supply, term_circuit)
from xorsmc.discretize import WeightTable, embed_weight
from xorsmc.formula import Circuit, CnfFormula
from xorsmc.oracle import count_exact, smc_brute_force
from xorsmc.oracle.exact import count_circuit
from xorsmc.smc import (ParameterError, SolveParams, alpha, compute_T, hashed_formula,
                        xor_binary, xor_smc)
from xorsmc.xorhash import HashRng, ParityConstraint, encode_parity

HASH_RATE_FLOOR = 1 - Fraction(8, 49) - Fraction(7, 100)


@pytest.fixture
def verdict(capsys):
    def emit(n, ok, detail):
        with capsys.disabled():
            print(f"\ncriterion {n}: {'PASS' if ok else 'FAIL'} ({detail})")
        assert ok, detail
    return emit


def cnf_of(n, clauses):
    f = CnfFormula()
    f.new_vars(n)
    f.add_clauses(clauses)
    return f


def cnf_circuit(clauses):
    """The CNF over y0.. as a circuit, so xor_binary sees it as a counting term."""
    return Circuit.from_cnf([[("-" if l < 0 else "") + f"y{abs(l) - 1}" for l in c]
                             for c in clauses])


def calibration_runs(want_high, seed):
    """Pick 50 CNFs whose exact count sits 3 bits above (or below) q; return per-formula rates."""
    rng = random.Random(seed)
    rates = []
    while len(rates) < 50:
        n = rng.randint(8, 10)
        ratio = rng.uniform(1.0, 3.0) if want_high else rng.uniform(3.5, 5.5)
        clauses = random_cnf(rng, n, int(ratio * n))
        cnt = count_exact(cnf_of(n, clauses), range(1, n + 1))
        if want_high:
            if cnt < 16:
                continue
            q = cnt.bit_length() - 1 - 3           # cnt >= 2^(q+3)
        else:
            if cnt == 0:
                continue
            q = max(3, (cnt - 1).bit_length() + 3)  # cnt <= 2^(q-3)
            if q > n:
                continue
        f = cnf_circuit(clauses)
        root = HashRng(len(rates))
        hits = sum(xor_binary(f, [], q, n, root.child(r)) for r in range(400))
        rates.append(hits / 400 if want_high else 1 - hits / 400)
    return rates


# 1 ---------------------------------------------------------------------------------

def test_criterion_1_forward_calibration(verdict):
    start = time.perf_counter()
    rates = calibration_runs(True, 101)
    elapsed = time.perf_counter() - start
    ok = min(rates) >= HASH_RATE_FLOOR and elapsed < 120
    verdict(1, ok, f"min true-rate {min(rates):.3f} >= {float(HASH_RATE_FLOOR):.3f} over 50 CNFs, "
                   f"{elapsed:.1f}s")


# 2 ---------------------------------------------------------------------------------

def test_criterion_2_reverse_calibration(verdict):
    start = time.perf_counter()
    rates = calibration_runs(False, 202)
    elapsed = time.perf_counter() - start
    ok = min(rates) >= HASH_RATE_FLOOR and elapsed < 120
    verdict(2, ok, f"min false-rate {min(rates):.3f} >= {float(HASH_RATE_FLOOR):.3f} over 50 CNFs, "
                   f"{elapsed:.1f}s")


# 3 ---------------------------------------------------------------------------------

def classified_instances(c, per_class, seed):
    rng = random.Random(seed)
    pos, neg = [], []
    while len(pos) < per_class or len(neg) < per_class:
        n, k, d = rng.randint(2, 6), rng.randint(1, 2), rng.randint(4, 8)
        inst = random_instance(rng, n, k, d)
        up = [2 ** (t.q + c) for t in inst.terms]
        down = [math.ceil(2.0 ** (t.q - c)) for t in inst.terms]
        phi_sat = smc_brute_force(inst, [0] * k).answer
        if not phi_sat:
            continue                      # φ alone decides; nothing to calibrate
        if smc_brute_force(inst, up).answer:
            if len(pos) < per_class and any(t.q > 0 for t in inst.terms):
                pos.append(inst)
        elif not smc_brute_force(inst, down).answer:
            if len(neg) < per_class:
                neg.append(inst)
    return pos, neg


def test_criterion_3_end_to_end(verdict):
    c = 3
    pos, neg = classified_instances(c, 15, 303)
    start = time.perf_counter()
    worst = 1.0
    for want, group in ((True, pos), (False, neg)):
        for inst in group:
            agree = sum(xor_smc(inst, SolveParams(eta=0.2, c=c, seed=s)).answer == want
                        for s in range(25))
            worst = min(worst, agree / 25)
    elapsed = time.perf_counter() - start
    ok = worst >= 0.80 - 0.12 and elapsed < 600
    verdict(3, ok, f"worst agreement {worst:.2f} >= 0.68 over {len(pos)} true + {len(neg)} "
                   f"false instances, {elapsed:.1f}s")


# 4 ---------------------------------------------------------------------------------

def test_criterion_4_degenerate_hash(verdict):
    rng = random.Random(404)
    mismatches = 0
    for _ in range(100):
        inst = random_instance(rng, rng.randint(1, 5), rng.randint(1, 3), rng.randint(1, 6), q=0)
        got = xor_smc(inst, SolveParams(T_override=1, seed=rng.randrange(2**32))).answer
        mismatches += got != smc_brute_force(inst).answer
    verdict(4, mismatches == 0, f"{mismatches} mismatches in 100 instances")


# 5 ---------------------------------------------------------------------------------

def test_criterion_5_parameter_math(verdict):
    mpmath.mp.dps = 50
    A, B = mpmath.mpf(7) ** 2, mpmath.mpf(16)
    a_ref = mpmath.log(A / B) / 2 + mpmath.log(2 * A / (A - B)) / 2
    T_ref = int(mpmath.ceil((11 * mpmath.log(2) - mpmath.log(mpmath.mpf("0.01"))) / a_ref))
    a_ok = mpmath.almosteq(alpha(3, 1), a_ref, rel_eps=mpmath.mpf(10) ** -10)
    T_ok = compute_T(10, 1, 0.01, 3) == T_ref == 12
    bad = 0
    for c in range(1, 11):
        for k in range(1, 65):
            outside = (2**c - 1) ** 2 <= k * 2 ** (c + 1)
            try:
                alpha(c, k)
                bad += outside
            except ParameterError:
                bad += not outside
    ok = a_ok and T_ok and bad == 0
    verdict(5, ok, f"alpha(3,1)={alpha(3, 1):.12g} vs {mpmath.nstr(a_ref, 12)}, "
                   f"T={compute_T(10, 1, 0.01, 3)}, {bad} domain errors")


# 6 ---------------------------------------------------------------------------------

def test_criterion_6_discretization(verdict):
    rng = random.Random(606)
    violations = 0
    for _ in range(100):
        n, l = rng.randint(1, 6), rng.randint(1, 5)
        vals = [Fraction(rng.randint(0, 30), rng.randint(1, 7)) for _ in range(1 << n)]
        if max(vals) == 0:
            vals[rng.randrange(1 << n)] = Fraction(1)
        t = WeightTable(n, vals)
        ind = embed_weight(t, l)
        n_prime = count_circuit(ind.circuit, list(ind.x_names) + list(ind.y_names), {})
        M, total = max(vals), sum(vals)
        est = M / 2**l * n_prime
        violations += not (total <= est <= 2 * total + M * Fraction(2**n, 2**l))
    verdict(6, violations == 0, f"{violations} violations in 100 tables")


# 7 ---------------------------------------------------------------------------------

def test_criterion_7_shelter_bijection(verdict):
    rng = random.Random(707)
    checked = wrong = 0
    for _ in range(20):
        g = random_graph(rng.randint(5, 12), rng.uniform(0.2, 0.4), rng,
                         residential=rng.randint(1, 2))
        S = set(rng.sample(g.candidates, min(rng.randint(1, 3), len(g.candidates))))
        x0 = [int(v in S) for v in g.nodes]
        for r in g.residential:
            f, y_size = path_circuit(g, r)
            cnf = hashed_formula(f, x0, 0, y_size, HashRng(0))
            got = count_exact(cnf, cnf.group("y"), cap=None)
            wrong += got != sum(count_paths_exact(g, r, s) for s in S)
            checked += 1
    verdict(7, wrong == 0, f"{wrong} mismatches over {checked} terms on 20 graphs")


# 8 ---------------------------------------------------------------------------------

def shelter_graphs():
    """Five graphs on which every residential node reaches some candidate."""
    rng = random.Random(808)
    out = []
    while len(out) < 5:
        g = random_graph(rng.randint(10, 14), 0.3, rng, residential=2, budget=2)
        if optimal_threshold(g)[0] is not None:
            out.append(g)
    return out


def test_criterion_8_shelter_quality(verdict):
    c = 3
    wins = runs = 0
    worst_gap = 0
    for g in shelter_graphs():
        q_opt, _ = optimal_threshold(g)
        for s in range(10):
            res = solve_shelter(g, SolveParams(c=c, seed=s))
            base = local_search_baseline(g, 2, random.Random(s))
            wins += res.paths >= evaluate_assignment(g, base)
            runs += 1
            worst_gap = max(worst_gap, abs(res.q - q_opt))
    rate = wins / runs
    ok = rate >= 0.8 and worst_gap <= c
    verdict(8, ok, f"win rate {rate:.2f} over {runs} paired runs, max |q - q_opt| = {worst_gap}")


# 9 ---------------------------------------------------------------------------------

def supply_networks():
    rng = random.Random(0)
    return [generate_network(rng, tiers=rng.choice([(2, 2, 2), (2, 3, 2), (3, 3, 2)]),
                             num_events=rng.randint(2, 4)) for _ in range(5)]


def test_criterion_9_supply(verdict):
    wins = runs = over_budget = off_bracket = 0
    for net in supply_networks():
        assert len(net.suppliers) <= 8 and len(net.events) <= 4
        for s in range(5):
            res = solve_supply(net, SolveParams(seed=s))
            over_budget += not budgets_ok(net, res.plan)
            base = random_feasible_plan(net, random.Random(s))
            wins += res.value >= evaluate_plan(net, base)
            runs += 1
            for t in res.terms:
                lay = term_circuit(net, t["v"], t["d"], 4)[1]
                exact, scaled, upper = bracket(net, res.plan, lay, 4)
                off_bracket += not (exact <= scaled <= upper)
    rate = wins / runs
    ok = over_budget == 0 and off_bracket == 0 and rate >= 0.8
    verdict(9, ok, f"win rate {rate:.2f} over {runs} runs, {over_budget} budget violations, "
                   f"{off_bracket} bracket violations")


# 10 --------------------------------------------------------------------------------

def dump_in_subprocess(tmp_path, name, seed):
    inst = {"n": 3, "k": 2, "phi": {"cnf": [["b0"], ["b1", "x2"]]},
            "terms": [{"y_size": 6, "q": 2, "f": {"cnf": [["x0", "y0", "-y3"], ["y1", "y5"]]}},
                      {"y_size": 4, "q": 1, "f": {"cnf": [["y0", "-x1"]]}}]}
    src = tmp_path / "inst.json"
    src.write_text(json.dumps(inst))
    out = tmp_path / name
    subprocess.run([sys.executable, "-m", "xorsmc.cli", "check", str(src), "--seed", str(seed),
                    "--emit-cnf", str(out)], check=False, capture_output=True)
    return out.read_bytes()


def test_criterion_10_determinism_and_halving(verdict, tmp_path):
    a = dump_in_subprocess(tmp_path, "a.cnf", 17)
    b = dump_in_subprocess(tmp_path, "b.cnf", 17)
    other = dump_in_subprocess(tmp_path, "c.cnf", 18)
    same = a == b and len(a) > 0 and a != other
    halving_bad = 0
    for m in range(1, 11):
        for negate in (False, True):
            f = CnfFormula()
            f.new_vars(m)
            encode_parity(f, ParityConstraint(tuple(range(1, m + 1)), negate))
            halving_bad += count_exact(f, range(1, m + 1)) != 2 ** (m - 1)
            halving_bad += count_exact(f, range(1, f.num_vars + 1), cap=None) != 2 ** (m - 1)
    ok = same and halving_bad == 0
    verdict(10, ok, f"dumps identical={a == b}, seed-sensitive={a != other}, "
                    f"{halving_bad} halving failures for m<=10")
