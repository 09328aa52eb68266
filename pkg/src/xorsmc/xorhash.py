"""Random parity constraints and their CNF encoding.

A constraint over ``vars`` with constant bit ``negate`` holds iff
``XOR(vars) XOR negate == 1``; with ``negate`` false an odd number of the
member variables must be true.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .formula.cnf import CnfFormula

DIRECT_LIMIT = 4


@dataclass(frozen=True)
class HashRng:
    """Counter-based generator keyed by ``seed`` and a stream tuple.

    Each stream gets its own Philox instance derived through
    ``SeedSequence(seed, spawn_key=stream)``, so draws do not depend on the
    order in which streams are consumed.
    """

    seed: int
    stream: tuple[int, ...] = ()

    def child(self, *stream: int) -> "HashRng":
        return HashRng(self.seed, self.stream + tuple(stream))

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(self.seed & (2**64 - 1), spawn_key=self.stream)
        return np.random.Generator(np.random.Philox(ss))


@dataclass(frozen=True)
class ParityConstraint:
    vars: tuple[int, ...]
    negate: bool = False

    def holds(self, values: dict[int, int] | Sequence[int]) -> bool:
        """Evaluate under a var->bit mapping or a 0/1 list indexed by ``var - 1``."""
        if isinstance(values, dict):
            acc = sum(values[v] for v in self.vars)
        else:
            acc = sum(values[v - 1] for v in self.vars)
        return (acc + self.negate) % 2 == 1

    def to_xline(self) -> str:
        """``x``-line form: literals whose XOR must be true, terminated by 0."""
        if not self.vars:
            return "x -0 0" if self.negate else "x 0"
        lits = list(self.vars)
        if self.negate:
            lits[0] = -lits[0]
        return "x " + " ".join(map(str, lits)) + " 0"

    @classmethod
    def from_xline(cls, line: str) -> "ParityConstraint":
        toks = line.split()
        if not toks or toks[0] != "x" or toks[-1] != "0":
            raise ValueError(f"bad x-line {line!r}")
        body = toks[1:-1]
        if body == ["-0"]:
            return cls((), True)
        lits = [int(t) for t in body]
        negate = sum(l < 0 for l in lits) % 2 == 1
        return cls(tuple(abs(l) for l in lits), negate)


def sample_parity(var_range: Iterable[int], rng: HashRng) -> ParityConstraint:
    """Include each variable with probability 1/2; flip the constant with probability 1/2."""
    pool = np.fromiter(var_range, dtype=np.int64)
    if pool.size == 0:
        raise ValueError("cannot sample a parity constraint over an empty range")
    bits = rng.generator().integers(0, 2, size=pool.size + 1, dtype=np.int8)
    chosen = tuple(int(v) for v in pool[bits[:-1] == 1])
    return ParityConstraint(chosen, bool(bits[-1]))


def _direct(lits: list[int], odd: bool, guard: list[int]) -> list[list[int]]:
    # forbid every assignment of wrong parity
    m = len(lits)
    out = []
    for mask in range(1 << m):
        ones = bin(mask).count("1")
        if (ones % 2 == 1) != odd:
            out.append(guard + [-l if (mask >> i) & 1 else l for i, l in enumerate(lits)])
    return out


def encode_parity(formula: CnfFormula, pc: ParityConstraint, guard: Sequence[int] = ()) -> None:
    """Add clauses for ``guard-clause ∨ pc``.

    Constraints over more than four variables are cut into a chain of
    3-ary parities through fresh auxiliaries, each fully defined, so the
    encoding stays parsimonious.  Only the final link carries the guard.
    """
    guard = list(guard)
    odd = not pc.negate
    lits = list(pc.vars)
    if not lits:
        if odd:
            formula.add_clause(guard)
        return
    while len(lits) > DIRECT_LIMIT:
        a, b = lits[0], lits[1]
        z = formula.new_var()
        # z <-> a xor b
        formula.add_clauses([[-z, a, b], [-z, -a, -b], [z, -a, b], [z, a, -b]])
        lits = [z] + lits[2:]
    formula.add_clauses(_direct(lits, odd, guard))
