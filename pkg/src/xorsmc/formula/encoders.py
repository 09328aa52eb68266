"""Circuit-to-CNF translation and the cardinality / pseudo-Boolean encoders.

Every gate gets a full (both-direction) Tseitin definition, so each input
assignment extends to exactly one assignment of the auxiliaries.  Model
counts projected on the inputs therefore equal total model counts.
"""

from __future__ import annotations

from typing import Hashable, Mapping, Sequence

from .circuit import Circuit, CircuitError
from .cnf import CnfFormula


def _input_lit(name: Hashable, bind: Mapping | None) -> int:
    if bind is not None and name in bind:
        return bind[name]
    if isinstance(name, int) and not isinstance(name, bool):
        return name
    raise CircuitError(f"circuit input {name!r} is not bound to a formula variable")


def tseitin(formula: CnfFormula, circuit: Circuit, bind: Mapping | None = None,
            node: int | None = None) -> int:
    """Add defining clauses for ``node`` (default: the output); return its literal.

    ``bind`` maps input names to formula literals.  Integer-named inputs
    without a binding are taken as literals directly.
    """
    root = circuit.output if node is None else node
    order = circuit.reachable(root)
    lits: dict[int, int] = {}
    for n in order:
        op, args = circuit.gates[n]
        if op not in ("input", "const") and any(a >= n for a in args):
            raise CircuitError(f"cyclic circuit at node {n}")
        if op == "input":
            lit = _input_lit(args[0], bind)
            if lit == 0 or abs(lit) > formula.num_vars:
                raise CircuitError(f"input {args[0]!r} bound to unallocated literal {lit}")
            lits[n] = lit
        elif op == "const":
            t = formula.true_lit()
            lits[n] = t if args[0] else -t
        elif op == "not":
            lits[n] = -lits[args[0]]
        elif op == "and":
            z = formula.new_var()
            ins = [lits[a] for a in args]
            for a in ins:
                formula.add_clause([-z, a])
            formula.add_clause([z] + [-a for a in ins])
            lits[n] = z
        elif op == "or":
            z = formula.new_var()
            ins = [lits[a] for a in args]
            for a in ins:
                formula.add_clause([z, -a])
            formula.add_clause([-z] + ins)
            lits[n] = z
        elif op == "xor":
            z = formula.new_var()
            a, b = lits[args[0]], lits[args[1]]
            formula.add_clauses([[-z, a, b], [-z, -a, -b], [z, -a, b], [z, a, -b]])
            lits[n] = z
        else:
            raise CircuitError(f"unknown op {op!r}")
    return lits[root]


def assert_circuit(formula: CnfFormula, circuit: Circuit, bind: Mapping | None = None,
                   guard: Sequence[int] = (), node: int | None = None) -> None:
    """Assert ``guard-clause ∨ circuit``; without a guard, assert the circuit.

    A top-level AND is split into one clause per conjunct and a top-level OR
    becomes a single clause.  Neither introduces auxiliaries, so parsimony
    is kept.
    """
    root = circuit.output if node is None else node
    guard = list(guard)
    op, args = circuit.gates[root]
    if op == "const":
        if not args[0]:
            formula.add_clause(guard)
        return
    if op == "and":
        for a in args:
            assert_circuit(formula, circuit, bind, guard, a)
        return
    if op == "or":
        formula.add_clause(guard + [tseitin(formula, circuit, bind, a) for a in args])
        return
    formula.add_clause(guard + [tseitin(formula, circuit, bind, root)])


def _lit_circuit(lits: Sequence[int]) -> tuple[Circuit, list[int]]:
    c = Circuit()
    return c, [c.lit(l) for l in lits]


def encode_at_least_k(formula: CnfFormula, lits: Sequence[int], k: int) -> None:
    """Sequential-counter encoding of ``sum(lits) >= k``."""
    if k < 0 or k > len(lits):
        raise ValueError(f"k={k} outside [0, {len(lits)}]")
    if k == 0:
        return
    c, nodes = _lit_circuit(lits)
    c.set_output(c.at_least(k, nodes))
    assert_circuit(formula, c)


def encode_at_most_k(formula: CnfFormula, lits: Sequence[int], k: int) -> None:
    if k < 0:
        raise ValueError("k must be nonnegative")
    c, nodes = _lit_circuit(lits)
    c.set_output(c.at_most(k, nodes))
    assert_circuit(formula, c)


def encode_exactly_k(formula: CnfFormula, lits: Sequence[int], k: int) -> None:
    c, nodes = _lit_circuit(lits)
    c.set_output(c.exactly(k, nodes))
    assert_circuit(formula, c)


def encode_pb_leq(formula: CnfFormula, terms: Sequence[tuple[int, int]], bound: int) -> None:
    """Adder-network encoding of ``sum(w * lit) <= bound``."""
    c = Circuit()
    c.set_output(c.pb_leq([(w, c.lit(l)) for w, l in terms], bound))
    assert_circuit(formula, c)
