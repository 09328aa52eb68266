"""Embedding nonnegative weights into countable binary indicators.

For a table ``w`` with maximum ``M`` and ``l`` extra bits ``y_1..y_l``,
the set ``S(w, l)`` keeps ``(x, y)`` unless some ``y_i = 1`` while
``w(x) / M <= 2^(i-1) / 2^l``.  Point ``x`` then contributes ``2^r`` models
where ``r`` counts the unforced bits, and the scaled count
``(M / 2^l) * N'`` brackets ``sum_x w(x)`` between ``1x`` and
``2x + M 2^(n-l)``.  All comparisons use exact rationals.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import prod
from typing import Sequence

from .formula.circuit import Circuit

DEFAULT_BITS = 4


class WeightError(ValueError):
    pass


def _frac(v) -> Fraction:
    if isinstance(v, float):
        return Fraction(repr(v))  # shortest decimal form, not the binary expansion
    return Fraction(v)


@dataclass(frozen=True)
class WeightTable:
    """Weights over all assignments of ``names``; index bit ``j`` is ``names[j]``."""

    names: tuple[str, ...]
    values: tuple[Fraction, ...]

    def __init__(self, names: Sequence[str] | int, values: Sequence) -> None:
        if isinstance(names, int):
            names = [f"x{j}" for j in range(names)]
        names = tuple(names)
        vals = tuple(_frac(v) for v in values)
        if len(vals) != 1 << len(names):
            raise WeightError(f"table over {len(names)} bits needs {1 << len(names)} values, "
                              f"got {len(vals)}")
        if any(v < 0 for v in vals):
            raise WeightError("weights must be nonnegative")
        if len(set(names)) != len(names):
            raise WeightError("duplicate variable names")
        object.__setattr__(self, "names", names)
        object.__setattr__(self, "values", vals)

    @property
    def domain_bits(self) -> int:
        return len(self.names)

    @property
    def M(self) -> Fraction:
        return max(self.values)

    @property
    def total(self) -> Fraction:
        return sum(self.values, Fraction(0))

    def __call__(self, assignment: int) -> Fraction:
        return self.values[assignment]

    @classmethod
    def parse(cls, text: str, names: Sequence[str] | None = None) -> "WeightTable":
        """Two-column text: ``<bits> <value>`` per line, first bit is ``names[0]``."""
        entries: dict[int, Fraction] = {}
        width = None
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 2 or set(parts[0]) - {"0", "1"}:
                raise WeightError(f"line {lineno}: expected '<bits> <value>'")
            if width is None:
                width = len(parts[0])
            elif len(parts[0]) != width:
                raise WeightError(f"line {lineno}: inconsistent bit width")
            idx = sum(int(ch) << j for j, ch in enumerate(parts[0]))
            if idx in entries:
                raise WeightError(f"line {lineno}: duplicate assignment {parts[0]}")
            try:
                entries[idx] = Fraction(parts[1])
            except ValueError:
                raise WeightError(f"line {lineno}: bad value {parts[1]!r}") from None
        if width is None:
            raise WeightError("empty weight table")
        if len(entries) != 1 << width:
            raise WeightError(f"incomplete table: {len(entries)} of {1 << width} assignments")
        return cls(names if names is not None else width, [entries[i] for i in range(1 << width)])


def forced_zero(w: Fraction, M: Fraction, l: int, i: int) -> bool:
    """Whether bit ``y_i`` (1-based) must be 0 at a point of weight ``w``."""
    return w * 2**l <= M * 2 ** (i - 1)


def free_bits(w: Fraction, M: Fraction, l: int) -> int:
    return sum(not forced_zero(w, M, l, i) for i in range(1, l + 1))


@dataclass
class DiscretizedIndicator:
    l: int
    circuit: Circuit
    x_names: tuple[str, ...]
    y_names: tuple[str, ...]
    scale: Fraction          # multiply the model count by this to estimate the weighted sum


def _shannon(c: Circuit, nodes: Sequence[int], truth: Sequence[bool]) -> int:
    """Circuit node for the Boolean function with the given truth table."""
    memo: dict[tuple, int] = {}

    def rec(j: int, tt: tuple) -> int:
        if all(tt):
            return c.const(True)
        if not any(tt):
            return c.const(False)
        key = (j, tt)
        if key not in memo:
            lo, hi = rec(j + 1, tt[0::2]), rec(j + 1, tt[1::2])
            x = nodes[j]
            memo[key] = c.or_(c.and_(x, hi), c.and_(c.not_(x), lo))
        return memo[key]

    return rec(0, tuple(truth))


def threshold_bits(c: Circuit, cases: Sequence[tuple[int, Fraction]], M: Fraction,
                   y_nodes: Sequence[int]) -> int:
    """Indicator that no ``y_i`` is set while the active case forbids it.

    ``cases`` pairs a predicate node with the weight it selects; the
    predicates are assumed mutually exclusive.
    """
    l = len(y_nodes)
    parts = []
    for i in range(1, l + 1):
        low = [node for node, w in cases if forced_zero(w, M, l, i)]
        if low:
            parts.append(c.implies(y_nodes[i - 1], c.not_(c.or_(*low))))
    return c.and_(*parts)


def _y_names(prefix: str, l: int) -> tuple[str, ...]:
    return tuple(f"{prefix}{i}" for i in range(l))


def embed_into(c: Circuit, table: WeightTable, l: int, y_prefix: str = "y",
               bind: dict[str, int] | None = None) -> tuple[int, tuple[str, ...], Fraction]:
    """Add the indicator of ``S(table, l)`` to ``c``; return (node, y names, M/2^l).

    ``bind`` may map table variable names to existing nodes of ``c``.
    """
    if l < 1:
        raise WeightError("need at least one discretization bit")
    M = table.M
    if M == 0:
        raise WeightError("all-zero weight table: M is undefined")
    bind = bind or {}
    xn = [bind[nm] if nm in bind else c.input(nm) for nm in table.names]
    yn = _y_names(y_prefix, l)
    ynodes = [c.input(nm) for nm in yn]
    parts = []
    for i in range(1, l + 1):
        truth = [forced_zero(w, M, l, i) for w in table.values]
        if any(truth):
            parts.append(c.implies(ynodes[i - 1], c.not_(_shannon(c, xn, truth))))
    return c.and_(*parts), yn, M / 2**l


def embed_weight(w: WeightTable, l: int = DEFAULT_BITS, y_prefix: str = "y") -> DiscretizedIndicator:
    c = Circuit()
    node, yn, scale = embed_into(c, w, l, y_prefix)
    c.set_output(node)
    return DiscretizedIndicator(l, c, w.names, yn, scale)


def embed_product(factors: Sequence[WeightTable], l: int = DEFAULT_BITS,
                  y_prefix: str = "y") -> DiscretizedIndicator:
    """Conjunction of per-factor indicators, each with its own y-block."""
    seen: set[str] = set()
    for f in factors:
        if seen & set(f.names):
            raise WeightError(f"factor domains overlap on {sorted(seen & set(f.names))}")
        seen |= set(f.names)
    c = Circuit()
    nodes, ys, scales = [], [], []
    for j, f in enumerate(factors):
        prefix = y_prefix if len(factors) == 1 else f"{y_prefix}{j}_"
        node, yn, scale = embed_into(c, f, l, prefix)
        nodes.append(node)
        ys.extend(yn)
        scales.append(scale)
    c.set_output(c.and_(*nodes))
    xn = tuple(nm for f in factors for nm in f.names)
    return DiscretizedIndicator(l, c, xn, tuple(ys), prod(scales, start=Fraction(1)))


def pointwise_count(w: Fraction, M: Fraction, l: int) -> int:
    """Models contributed by one point of weight ``w``: ``2^(free bits)``."""
    return 1 << free_bits(w, M, l)


def table_count(table: WeightTable, l: int) -> int:
    """N' for a single table by the pointwise formula."""
    M = table.M
    return sum(pointwise_count(w, M, l) for w in table.values)


def weight_bounds(table: WeightTable, l: int) -> tuple[Fraction, Fraction]:
    """``(sum w, 2 sum w + M 2^(n-l))``, the bracket for ``(M/2^l) N'``."""
    s = table.total
    return s, 2 * s + table.M * Fraction(2) ** (table.domain_bits - l)

