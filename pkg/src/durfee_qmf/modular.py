"""SL2(Z) matrices, Dedekind sums and the eta multiplier."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .numerics import check_uhp, csqrt, e_frac

DEFINITION_LIMIT = 10**6


@dataclass(frozen=True)
class SL2Matrix:
    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        if self.a * self.d - self.b * self.c != 1:
            raise ValueError(f"determinant of {self} is not 1")

    @classmethod
    def identity(cls) -> "SL2Matrix":
        return cls(1, 0, 0, 1)

    def __matmul__(self, o: "SL2Matrix") -> "SL2Matrix":
        return SL2Matrix(self.a * o.a + self.b * o.c, self.a * o.b + self.b * o.d,
                         self.c * o.a + self.d * o.c, self.c * o.b + self.d * o.d)

    def __neg__(self) -> "SL2Matrix":
        return SL2Matrix(-self.a, -self.b, -self.c, -self.d)

    def inverse(self) -> "SL2Matrix":
        return SL2Matrix(self.d, -self.b, -self.c, self.a)

    def normalized(self) -> "SL2Matrix":
        """``self`` or ``-self``, whichever has ``c > 0`` (or ``c = 0, d = 1``)."""
        if self.c < 0 or (self.c == 0 and self.d < 0):
            return -self
        return self

    def act(self, tau: complex) -> complex:
        return (self.a * tau + self.b) / (self.c * tau + self.d)

    def tolist(self) -> list[list[int]]:
        return [[self.a, self.b], [self.c, self.d]]


def _sawtooth_sum(m: int, t: int) -> Fraction:
    # ((j/t)) = (2j - t)/(2t) for 0 < j < t; the j = 0 term vanishes.
    j = np.arange(1, t, dtype=np.int64)
    r = (m % t) * j % t
    second = np.where(r == 0, 0, 2 * r - t)
    total = int(np.sum((2 * j - t) * second, dtype=np.int64)) if t > 1 else 0
    return Fraction(total, 4 * t * t)


def _reciprocity_sum(m: int, t: int) -> Fraction:
    g = math.gcd(m, t)
    m, t = m // g, t // g
    sign = 1
    total = Fraction(0)
    m %= t
    # s(m,t) + s(t,m) = (m/t + t/m + 1/(mt))/12 - 1/4, and s(t,m) = s(t mod m, m)
    while t > 1 and m != 0:
        total += sign * (Fraction(m * m + t * t + 1, 12 * m * t) - Fraction(1, 4))
        sign = -sign
        m, t = t % m, m
    return total


def dedekind_sum(m: int, t: int) -> Fraction:
    """``s(m, t) = sum_{j mod t} ((j/t)) ((mj/t))``.

    Summed from the definition for ``t <= 10**6``, by reciprocity above that.
    """
    if t < 1:
        raise ValueError("t must be positive")
    if t <= DEFINITION_LIMIT:
        return _sawtooth_sum(m, t)
    return _reciprocity_sum(m, t)


def chi_eta(gamma: SL2Matrix) -> complex:
    """Eta multiplier: ``e(b/24)`` for ``c = 0``, ``sqrt(-i) e(-s(d,c)/2 + (a+d)/(24c))`` for ``c > 0``.

    Matrices with ``c < 0`` (or ``c = 0, d = -1``) are replaced by ``-gamma``.
    """
    g = gamma.normalized()
    if g.c == 0:
        return e_frac(Fraction(g.b, 24))
    phase = Fraction(-1, 8) - dedekind_sum(g.d, g.c) / 2 + Fraction(g.a + g.d, 24 * g.c)
    return e_frac(phase)


def jacobi_symbol(a: int, n: int) -> int:
    if n <= 0 or n % 2 == 0:
        raise ValueError("Jacobi symbol needs an odd positive modulus")
    a %= n
    result = 1
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def legendre_generalized(c: int, d: int) -> int:
    """``(c/d)`` for odd ``d`` with the sign convention for negative ``d``: ``(c/d) = (c/|d|)`` unless ``c, d < 0``."""
    base = jacobi_symbol(c, abs(d))
    if d < 0 and c < 0:
        return -base
    return base


def chi_legendre(gamma: SL2Matrix) -> complex:
    """Eta multiplier written with Legendre symbols (one formula for odd ``c``, one for odd ``d``)."""
    a, b, c, d = gamma.a, gamma.b, gamma.c, gamma.d
    if c % 2 == 1:
        phase = Fraction((a + d) * c - b * d * (c * c - 1) - 3 * c, 24)
        return jacobi_symbol(d, abs(c)) * e_frac(phase)
    if d % 2 == 1:
        phase = Fraction((a + d) * c - b * d * (c * c - 1) + 3 * d - 3 - 3 * c * d, 24)
        return legendre_generalized(c, d) * e_frac(phase)
    raise ArithmeticError(f"c and d both even in {gamma}: not in SL2(Z)")


def eta_transform_check(gamma: SL2Matrix, tau: complex) -> float:
    """``|eta(gamma tau) - chi_gamma (c tau + d)^{1/2} eta(tau)|`` with the principal root."""
    from .qseries import eta_value

    tau = check_uhp(tau)
    g = gamma.normalized()
    lhs = eta_value(g.act(tau))
    rhs = chi_eta(g) * csqrt(g.c * tau + g.d) * eta_value(tau)
    return abs(lhs - rhs)
