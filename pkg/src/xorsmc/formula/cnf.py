"""CNF clause database over an append-only variable space.

Variables are positive ints allocated densely from 1; literals are signed
ints (DIMACS convention).  Named groups record which variable ranges play
which role (``x``, ``b``, ``y[i][t]``, ``guards`` ...).
"""

from __future__ import annotations

import re
from typing import Iterable


class FormulaError(ValueError):
    """Raised on malformed formula construction or DIMACS input."""


def lit_key(lit: int) -> tuple[int, bool]:
    """Canonical sort key for a literal: (variable, negated)."""
    return abs(lit), lit < 0


class CnfFormula:
    def __init__(self) -> None:
        self.num_vars = 0
        self.clauses: list[list[int]] = []
        self.groups: dict[str, range] = {}
        self._true: int | None = None

    def new_vars(self, count: int, label: str | None = None) -> range:
        """Allocate ``count`` fresh variables, optionally recorded under ``label``."""
        if count < 0:
            raise FormulaError(f"cannot allocate {count} variables")
        if label is not None:
            if label in self.groups:
                raise FormulaError(f"duplicate variable group {label!r}")
            if not label or re.search(r"\s", label):
                raise FormulaError(f"invalid group label {label!r}")
        lo = self.num_vars + 1
        self.num_vars += count
        block = range(lo, self.num_vars + 1)
        if label is not None:
            self.groups[label] = block
        return block

    def new_var(self) -> int:
        self.num_vars += 1
        return self.num_vars

    def true_lit(self) -> int:
        """A literal fixed to true by a unit clause (allocated on first use)."""
        if self._true is None:
            self._true = self.new_var()
            self.clauses.append([self._true])
        return self._true

    def add_clause(self, lits: Iterable[int]) -> None:
        clause = list(lits)
        for lit in clause:
            if lit == 0 or abs(lit) > self.num_vars:
                raise FormulaError(f"literal {lit} references an unallocated variable")
        self.clauses.append(clause)

    def add_clauses(self, clauses: Iterable[Iterable[int]]) -> None:
        for c in clauses:
            self.add_clause(c)

    def group(self, label: str) -> range:
        return self.groups[label]

    def copy(self) -> "CnfFormula":
        other = CnfFormula()
        other.num_vars = self.num_vars
        other.clauses = [list(c) for c in self.clauses]
        other.groups = dict(self.groups)
        other._true = self._true
        return other

    def is_satisfied_by(self, model) -> bool:
        """Check a model given as a 0/1 sequence indexed by ``var - 1``."""
        for c in self.clauses:
            if not any((model[abs(l) - 1] == 1) == (l > 0) for l in c):
                return False
        return True

    # -- DIMACS ----------------------------------------------------------------
    def to_dimacs(self, extra_comments: Iterable[str] = ()) -> str:
        lines = [f"p cnf {self.num_vars} {len(self.clauses)}"]
        for label, block in self.groups.items():
            lines.append(f"c group {label} {block.start} {block.stop - 1}")
        for text in extra_comments:
            lines.append(f"c {text}")
        for c in self.clauses:
            lines.append(" ".join(map(str, c)) + " 0")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_dimacs(cls, text: str) -> "CnfFormula":
        f = cls()
        header = None
        pending: list[int] = []
        declared_clauses = 0
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.strip()
            if not line or line.startswith("%"):
                continue
            if line.startswith("c"):
                parts = line.split()
                if len(parts) == 5 and parts[1] == "group":
                    try:
                        lo, hi = int(parts[3]), int(parts[4])
                    except ValueError:
                        raise FormulaError(f"line {lineno}: bad group comment") from None
                    f.groups[parts[2]] = range(lo, hi + 1)
                continue
            if line.startswith("p"):
                m = re.match(r"p\s+cnf\s+(\d+)\s+(\d+)$", line)
                if m is None:
                    raise FormulaError(f"line {lineno}: bad header {line!r}")
                header = (int(m.group(1)), int(m.group(2)))
                f.num_vars = header[0]
                declared_clauses = header[1]
                continue
            if header is None:
                raise FormulaError(f"line {lineno}: clause before 'p cnf' header")
            try:
                nums = [int(tok) for tok in line.split()]
            except ValueError:
                raise FormulaError(f"line {lineno}: non-integer token") from None
            for x in nums:
                if x == 0:
                    f.add_clause(pending)
                    pending = []
                else:
                    pending.append(x)
        if header is None:
            raise FormulaError("missing 'p cnf' header")
        if pending:
            f.add_clause(pending)
        if len(f.clauses) != declared_clauses:
            raise FormulaError(
                f"header declares {declared_clauses} clauses, found {len(f.clauses)}")
        return f
