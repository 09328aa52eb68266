"""SMC instances: a constraint φ(x, b) plus counting terms f_i(x, y_i).

Circuit inputs use fixed names: ``x0 .. x{n-1}`` for decision variables,
``b0 .. b{k-1}`` for the term switches, and ``y0 .. y{d-1}`` for a term's
own counting variables.  The instance asks for (x, b) with φ(x, b) true
and ``#{y : f_i(x, y)} >= 2**q_i`` whenever ``b_i`` is set.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from typing import Sequence

from ..formula.circuit import Circuit

_NAME = re.compile(r"([xby])(\d+)$")


class InstanceError(ValueError):
    pass


def xs(n: int) -> list[str]:
    return [f"x{i}" for i in range(n)]


def bs(k: int) -> list[str]:
    return [f"b{i}" for i in range(k)]


def ys(d: int) -> list[str]:
    return [f"y{i}" for i in range(d)]


def _check_inputs(circuit: Circuit, allowed: dict[str, int], what: str) -> None:
    if circuit.output is None:
        raise InstanceError(f"{what} has no output")
    for n in circuit.reachable():
        op, args = circuit.gates[n]
        if op != "input":
            continue
        name = args[0]
        m = _NAME.match(name) if isinstance(name, str) else None
        if m is None or m.group(1) not in allowed or int(m.group(2)) >= allowed[m.group(1)]:
            raise InstanceError(f"{what} references input {name!r} outside its scope")


@dataclass(frozen=True)
class CountingTerm:
    f: Circuit
    y_size: int
    q: int

    def __post_init__(self) -> None:
        if self.y_size < 0:
            raise InstanceError("y_size must be nonnegative")
        if not 0 <= self.q <= self.y_size:
            raise InstanceError(
                f"threshold exponent q={self.q} outside [0, {self.y_size}]: "
                f"2^q exceeds the 2^{self.y_size} possible assignments")


@dataclass(frozen=True)
class SmcInstance:
    n: int
    k: int
    phi: Circuit
    terms: tuple[CountingTerm, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        object.__setattr__(self, "terms", tuple(self.terms))
        if self.n < 0:
            raise InstanceError("n must be nonnegative")
        if self.k < 1:
            raise InstanceError("an SMC instance needs at least one counting term")
        if len(self.terms) != self.k:
            raise InstanceError(f"k={self.k} but {len(self.terms)} terms given")
        _check_inputs(self.phi, {"x": self.n, "b": self.k}, "phi")
        for i, t in enumerate(self.terms):
            _check_inputs(t.f, {"x": self.n, "y": t.y_size}, f"term {i}")

    def with_q(self, qs: Sequence[int] | dict[int, int]) -> "SmcInstance":
        """Copy with replaced threshold exponents (sequence, or index->q map)."""
        if not isinstance(qs, dict):
            qs = dict(enumerate(qs))
        terms = tuple(replace(t, q=qs.get(i, t.q)) for i, t in enumerate(self.terms))
        return replace(self, terms=terms)
