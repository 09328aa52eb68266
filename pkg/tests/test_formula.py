import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import brute_count, brute_models
from xorsmc.oracle import count_exact
from xorsmc.formula import (Circuit, CircuitError, CnfFormula, FormulaError, assert_circuit,
                            encode_at_least_k, encode_at_most_k, encode_exactly_k,
                            encode_pb_leq, tseitin)


def fresh(n):
    f = CnfFormula()
    f.new_vars(n, "in")
    return f


def counts(f, n):
    """(projected count over the first n vars, total model count)."""
    return count_exact(f, range(1, n + 1)), count_exact(f, range(1, f.num_vars + 1), cap=None)


# -- allocation -----------------------------------------------------------------

def test_new_vars_from_empty():
    f = CnfFormula()
    assert list(f.new_vars(3, "x")) == [1, 2, 3]
    assert f.num_vars == 3


def test_zero_count_allocation():
    f = CnfFormula()
    f.new_vars(3, "x")
    assert len(f.new_vars(0, "b")) == 0
    assert f.groups["b"] == range(4, 4)


def test_duplicate_label_rejected():
    f = CnfFormula()
    f.new_vars(2, "x")
    with pytest.raises(FormulaError):
        f.new_vars(2, "x")


def test_clause_on_unallocated_var_rejected():
    f = fresh(2)
    with pytest.raises(FormulaError):
        f.add_clause([1, -3])
    with pytest.raises(FormulaError):
        f.add_clause([0])


def test_dimacs_roundtrip_keeps_groups():
    f = CnfFormula()
    f.new_vars(2, "x")
    f.new_vars(3, "y[0][1]")
    f.add_clauses([[1, -2], [3, 4, -5]])
    text = f.to_dimacs()
    assert text.startswith("p cnf 5 2\n")
    assert "c group y[0][1] 3 5" in text
    g = CnfFormula.from_dimacs(text)
    assert g.clauses == f.clauses and g.groups == f.groups
    assert g.to_dimacs() == text


def test_dimacs_errors():
    with pytest.raises(FormulaError, match="line 1"):
        CnfFormula.from_dimacs("1 2 0\n")
    with pytest.raises(FormulaError):
        CnfFormula.from_dimacs("p cnf 2 1\n1 3 0\n")


# -- tseitin -----------------------------------------------------------------------

def test_and_asserted():
    f = fresh(2)
    c = Circuit()
    c.set_output(c.and_(c.input(1), c.input(2)))
    f.add_clause([tseitin(f, c)])
    assert {m[:2] for m in brute_models(f.num_vars, f.clauses)} == {(1, 1)}


def test_single_wire_is_identity():
    f = fresh(1)
    c = Circuit()
    c.set_output(c.input(1))
    assert tseitin(f, c) == 1
    assert f.clauses == [] and f.num_vars == 1


def test_three_gate_circuit_count_matches_truth_table():
    c = Circuit()
    a, b = c.input("a"), c.input("b")
    c.set_output(c.or_(c.and_(a, c.not_(b)), c.xor(a, b)))
    rows = sum(c.evaluate({"a": x, "b": y}) for x, y in itertools.product((0, 1), repeat=2))
    f = fresh(2)
    f.add_clause([tseitin(f, c, {"a": 1, "b": 2})])
    assert brute_count(f.num_vars, f.clauses, [1, 2]) == rows
    assert len(brute_models(f.num_vars, f.clauses)) == rows  # parsimonious


def test_cycle_rejected():
    with pytest.raises(CircuitError, match="cycl"):
        Circuit.from_gates([{"id": "g", "op": "and", "args": ["h", "x0"]},
                            {"id": "h", "op": "or", "args": ["g", "x0"]}], "g")


def test_unbound_input_rejected():
    f = fresh(1)
    c = Circuit()
    c.set_output(c.input("a"))
    with pytest.raises(CircuitError):
        tseitin(f, c)


def random_circuit(rng, names, gates):
    c = Circuit()
    nodes = [c.input(nm) for nm in names]
    for _ in range(gates):
        op = rng.choice(["and", "or", "xor", "not", "implies", "iff"])
        a, b = rng.choice(nodes), rng.choice(nodes)
        nodes.append({"and": lambda: c.and_(a, b), "or": lambda: c.or_(a, b),
                      "xor": lambda: c.xor(a, b), "not": lambda: c.not_(a),
                      "implies": lambda: c.implies(a, b), "iff": lambda: c.iff(a, b)}[op]())
    c.set_output(nodes[-1])
    return c


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 5), st.integers(1, 12), st.booleans())
def test_tseitin_parsimony(seed, n, gates, top_assert):
    rng = random.Random(seed)
    names = [f"v{i}" for i in range(n)]
    c = random_circuit(rng, names, gates)
    truth = sum(c.evaluate(dict(zip(names, bits))) for bits in itertools.product((0, 1), repeat=n))
    f = fresh(n)
    bind = {nm: i + 1 for i, nm in enumerate(names)}
    if top_assert:
        assert_circuit(f, c, bind)
    else:
        f.add_clause([tseitin(f, c, bind)])
    assert counts(f, n) == (truth, truth)


def test_guarded_assert():
    # guard-clause (¬g) ∨ (a ∧ b): models over (g, a, b) are 4 with g=0 plus 1 with g=1
    f = fresh(3)
    c = Circuit()
    c.set_output(c.and_(c.input(2), c.input(3)))
    assert_circuit(f, c, guard=[-1])
    assert len(brute_models(f.num_vars, f.clauses)) == 5


def test_evaluate_batch_matches_scalar(rng):
    c = random_circuit(rng, ["p", "q", "r"], 10)
    import numpy as np
    cols = {nm: np.array([(i >> j) & 1 for i in range(8)], bool) for j, nm in enumerate("pqr")}
    batch = list(np.broadcast_to(c.evaluate_batch(cols), (8,)))
    scalar = [c.evaluate({nm: (i >> j) & 1 for j, nm in enumerate("pqr")}) for i in range(8)]
    assert batch == scalar


def test_gate_list_roundtrip(rng):
    c = random_circuit(rng, ["x0", "x1", "x2"], 8)
    doc = c.to_gates()
    d = Circuit.from_gates(doc["gates"], doc["output"])
    for bits in itertools.product((0, 1), repeat=3):
        a = {f"x{i}": b for i, b in enumerate(bits)}
        assert c.evaluate(a) == d.evaluate(a)


# -- cardinality and pseudo-Boolean -----------------------------------------------

def test_at_least_single():
    f = fresh(1)
    encode_at_least_k(f, [1], 1)
    assert f.clauses == [[1]]


def test_at_least_all_forces_every_literal():
    f = fresh(3)
    encode_at_least_k(f, [1, 2, 3], 3)
    assert brute_count(f.num_vars, f.clauses, [1, 2, 3]) == 1
    assert brute_models(f.num_vars, f.clauses)[0][:3] == (1, 1, 1)


def test_at_least_two_of_four():
    f = fresh(4)
    encode_at_least_k(f, [1, 2, 3, 4], 2)
    assert brute_count(f.num_vars, f.clauses, range(1, 5)) == 11
    assert len(brute_models(f.num_vars, f.clauses)) == 11


def test_at_least_zero_adds_nothing_and_bad_k_rejected():
    f = fresh(2)
    encode_at_least_k(f, [1, 2], 0)
    assert f.clauses == []
    with pytest.raises(ValueError):
        encode_at_least_k(f, [1, 2], 3)


def test_pb_single_term_over_bound():
    f = fresh(1)
    encode_pb_leq(f, [(5, 1)], 4)
    assert f.clauses == [[-1]]


def test_pb_slack_bound():
    f = fresh(2)
    encode_pb_leq(f, [(1, 1), (1, 2)], 2)
    assert brute_count(f.num_vars, f.clauses, [1, 2]) == 4


def test_pb_three_terms():
    f = fresh(3)
    encode_pb_leq(f, [(3, 1), (2, 2), (2, 3)], 4)
    models = {m[:3] for m in brute_models(f.num_vars, f.clauses)}
    assert models == {(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1), (0, 1, 1)}
    assert len(brute_models(f.num_vars, f.clauses)) == 5


@settings(max_examples=80, deadline=None)
@given(st.integers(1, 7), st.data())
def test_cardinality_parsimony(n, data):
    k = data.draw(st.integers(0, n))
    kind = data.draw(st.sampled_from(["least", "most", "exactly"]))
    signs = data.draw(st.lists(st.booleans(), min_size=n, max_size=n))
    lits = [v if s else -v for v, s in zip(range(1, n + 1), signs)]
    f = fresh(n)
    {"least": encode_at_least_k, "most": encode_at_most_k, "exactly": encode_exactly_k}[kind](f, lits, k)
    pred = {"least": lambda s: s >= k, "most": lambda s: s <= k, "exactly": lambda s: s == k}[kind]
    want = sum(pred(sum((b == 1) == (l > 0) for b, l in zip(bits, lits)))
               for bits in itertools.product((0, 1), repeat=n))
    assert counts(f, n) == (want, want)


@settings(max_examples=80, deadline=None)
@given(st.lists(st.integers(0, 9), min_size=1, max_size=6), st.integers(0, 30))
def test_pb_parsimony(weights, bound):
    n = len(weights)
    f = fresh(n)
    encode_pb_leq(f, list(zip(weights, range(1, n + 1))), bound)
    want = sum(sum(w for w, b in zip(weights, bits) if b) <= bound
               for bits in itertools.product((0, 1), repeat=n))
    assert counts(f, n) == (want, want)


def test_construction_is_deterministic(rng):
    def build():
        f = fresh(5)
        encode_at_least_k(f, [1, -2, 3, 4], 2)
        encode_pb_leq(f, [(3, 1), (4, 5)], 5)
        return f.to_dimacs()
    assert build() == build()


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_clauses_reference_allocated_vars(seed):
    rng = random.Random(seed)
    f = fresh(4)
    encode_exactly_k(f, [1, 2, 3, 4], rng.randint(0, 4))
    c = random_circuit(rng, [1, 2, 3, 4], 6)
    tseitin(f, c)
    assert all(0 < abs(l) <= f.num_vars for cl in f.clauses for l in cl)
