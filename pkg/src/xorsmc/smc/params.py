"""Repetition-count parameters for XOR-SMC."""

from __future__ import annotations

import math
from dataclasses import dataclass


class ParameterError(ValueError):
    pass


def min_c(k: int) -> int:
    """Smallest slack exponent allowed for ``k`` terms: ceil(log2(k+1)) + 1."""
    if k < 1:
        raise ParameterError("k must be positive")
    return (k).bit_length() + 1  # ceil(log2(k+1)) == bit_length(k)


def _domain_ok(c: int, k: int) -> bool:
    return (2**c - 1) ** 2 > k * 2 ** (c + 1)


def min_admissible_c(k: int) -> int:
    c = 1
    while not _domain_ok(c, k):
        c += 1
    return c


ALPHA_FORMS = ("expanded", "kl")


def alpha(c: int, k: int, form: str = "expanded") -> float:
    """Per-repetition exponent α(c, k).

    With ``A = (2^c - 1)^2`` and ``B = k 2^(c+1)`` the default expanded
    closed form is::

        α = ½ ln(A / B) + ½ ln(2A / (A - B))

    ``form="kl"`` gives the exact divergence D(½ ‖ p) with ``p = B / 2A``,
    i.e. ``½ ln(A / B) + ½ ln(A / (2A - B))``.  It is smaller, so it
    yields more repetitions.  Both are defined only for ``A > B``.
    """
    if c < 1 or k < 1:
        raise ParameterError("c and k must be positive integers")
    if form not in ALPHA_FORMS:
        raise ParameterError(f"unknown alpha form {form!r}")
    a = (2**c - 1) ** 2
    b = k * 2 ** (c + 1)
    if a <= b:
        raise ParameterError(
            f"alpha undefined for c={c}, k={k}: (2^c-1)^2 = {a} <= k*2^(c+1) = {b}; "
            f"smallest admissible c is {min_admissible_c(k)}")
    if form == "kl":
        return 0.5 * math.log(a / b) + 0.5 * math.log(a / (2 * a - b))
    return 0.5 * math.log(a / b) + 0.5 * math.log(2 * a / (a - b))


def compute_T(n: int, k: int, eta: float, c: int, form: str = "expanded") -> int:
    """Repetitions needed for failure probability at most ``eta``."""
    if not 0.0 < eta < 1.0:
        raise ParameterError("eta must lie in (0, 1)")
    if n < 0:
        raise ParameterError("n must be nonnegative")
    t = ((n + k) * math.log(2) - math.log(eta)) / alpha(c, k, form)
    return max(1, math.ceil(t))


def majority(T: int) -> int:
    """Guards that must hold out of ``T``: ceil(T/2)."""
    return (T + 1) // 2


@dataclass(frozen=True)
class SolveParams:
    eta: float = 0.1
    c: int | None = None
    T_override: int | None = None
    seed: int = 0
    alpha_form: str = "expanded"

    def __post_init__(self) -> None:
        if not 0.0 < self.eta < 1.0:
            raise ParameterError("eta must lie in (0, 1)")
        if self.c is not None and self.c < 1:
            raise ParameterError("c must be a positive integer")
        if self.T_override is not None and self.T_override < 1:
            raise ParameterError("T must be at least 1")
        if not 0 <= self.seed < 2**64:
            raise ParameterError("seed must be a 64-bit unsigned value")
        if self.alpha_form not in ALPHA_FORMS:
            raise ParameterError(f"unknown alpha form {self.alpha_form!r}")

    def c_for(self, k: int) -> int:
        """The slack exponent used for ``k`` terms (at least the admissible minimum)."""
        return max(min_c(k), self.c or 0)

    def resolve(self, n: int, k: int) -> tuple[int, int, float]:
        """Return ``(T, c, alpha)`` for an instance with ``n`` x-bits and ``k`` terms."""
        c = self.c_for(k)
        a = alpha(c, k, self.alpha_form)
        if self.T_override is not None:
            return self.T_override, c, a
        return compute_T(n, k, self.eta, c, self.alpha_form), c, a
