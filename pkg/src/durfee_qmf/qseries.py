"""Exact q-series: Pochhammer symbols, partitions and ranks, eta, and the rank generating function."""

from __future__ import annotations

import cmath
import math
from functools import lru_cache
from typing import Iterator

import numpy as np

from .numerics import DomainError, TruncatedSeries, check_uhp, e, frac_mul


class SingularInputError(ValueError):
    """A denominator factor vanishes inside the requested range."""


def pochhammer(a: complex, q: complex, m: int | None = None, tol: float = 1e-16) -> complex:
    """``(a; q)_m``; ``m=None`` gives the infinite product (needs ``|q| < 1``)."""
    if m is not None:
        out = 1 + 0j
        p = complex(a)
        for _ in range(m):
            out *= 1 - p
            p *= q
        return out
    if abs(q) >= 1:
        raise DomainError("infinite q-Pochhammer symbol needs |q| < 1")
    out = 1 + 0j
    p = complex(a)
    while abs(p) > tol:
        out *= 1 - p
        p *= q
    return out * (1 - p)


@lru_cache(maxsize=None)
def _partition_table(n: int) -> tuple[int, ...]:
    p = [1] + [0] * n
    for m in range(1, n + 1):
        total = 0
        k = 1
        while True:
            g1 = k * (3 * k - 1) // 2
            if g1 > m:
                break
            sign = 1 if k % 2 else -1
            total += sign * p[m - g1]
            g2 = k * (3 * k + 1) // 2
            if g2 <= m:
                total += sign * p[m - g2]
            k += 1
        p[m] = total
    return tuple(p)


def partition_count(n: int) -> int:
    """Number of partitions of ``n`` via Euler's pentagonal recurrence."""
    if n < 0:
        return 0
    return _partition_table(n)[n]


def partitions(n: int) -> Iterator[tuple[int, ...]]:
    """All partitions of ``n`` as non-increasing tuples, generated iteratively."""
    if n == 0:
        yield ()
        return
    # ascending-composition algorithm (Kelleher), no recursion
    a = [0] * (n + 1)
    k = 1
    y = n - 1
    while k != 0:
        x = a[k - 1] + 1
        k -= 1
        while 2 * x <= y:
            a[k] = x
            y -= x
            k += 1
        ell = k + 1
        while x <= y:
            a[k] = x
            a[ell] = y
            yield tuple(reversed(a[: k + 2]))
            x += 1
            y -= 1
        a[k] = x + y
        y = x + y - 1
        yield tuple(reversed(a[: k + 1]))


def rank(partition: tuple[int, ...]) -> int:
    """Dyson's rank: largest part minus number of parts."""
    if not partition:
        return 0
    return partition[0] - len(partition)


def rank_count(m: int, n: int) -> int:
    """``N(m, n)`` by enumerating the partitions of ``n``."""
    if n < 0:
        return 0
    return sum(1 for lam in partitions(n) if rank(lam) == m)


def eta_qexp(N: int) -> TruncatedSeries:
    """Exact expansion of ``prod_{n>=1} (1 - q^n)`` through ``q^N``."""
    s = TruncatedSeries.one(N)
    for n in range(1, N + 1):
        s = s.mul_one_minus(1, n)
    return s


def eta_value(tau: complex) -> complex:
    """Dedekind eta at ``tau``.

    Uses the product ``e(tau/24) prod (1 - q^n)`` when ``Im tau >= 0.05``.  Lower
    down the product needs too many factors, so the pentagonal series
    ``sum (-1)^n q^{(6n-1)^2/24}`` is summed instead; its terms never exceed 1 in
    modulus, so there is no cancellation.
    """
    tau = check_uhp(tau)
    if tau.imag >= 0.05:
        q = cmath.exp(2j * math.pi * tau)
        return cmath.exp(2j * math.pi * tau / 24) * pochhammer(q, q)
    return eta_series(tau)


def eta_series(tau: complex) -> complex:
    tau = check_uhp(tau)
    # |term| = exp(-2 pi y (6n-1)^2/24) < 1e-18
    nmax = int(math.sqrt(41.5 * 24 / (2 * math.pi * tau.imag)) / 6) + 3
    n = np.arange(-nmax, nmax + 1)
    x = tau.real
    expo = (6 * n - 1) ** 2 / 24.0
    # (6n-1)^2 = 24 * n(3n-1)/2 + 1
    phase = frac_mul(n * (3 * n - 1) // 2, x) + x / 24
    terms = np.where(n % 2 == 0, 1.0, -1.0) * np.exp(-2 * math.pi * tau.imag * expo) * e(phase)
    return complex(math.fsum(terms.real) + 1j * math.fsum(terms.imag))


def r1_series(w: complex, N: int) -> TruncatedSeries:
    """``R_1(w; q) = sum q^{n^2} / ((wq;q)_n (w^{-1}q;q)_n)`` through ``q^N``.

    Exact integer coefficients when ``w`` is ``1`` or ``-1``.
    """
    if w == 0 or not cmath.isfinite(complex(w)):
        raise SingularInputError("w must be a finite non-zero number")
    exact = isinstance(w, int) and w in (1, -1)
    winv = w if exact else 1 / complex(w)
    total = TruncatedSeries([0], N, exact)
    n = 0
    while n * n <= N:
        t = TruncatedSeries.monomial(n * n, N, 1, exact)
        for i in range(1, n + 1):
            t = t.div_one_minus(w, i).div_one_minus(winv, i)
        total = total + t
        n += 1
    return total


def bringmann_r2_series(N: int) -> TruncatedSeries:
    """``(1/(q;q)_inf) sum_{m != 0} (-1)^{m-1} q^{3m(m+1)/2} / (1 - q^m)^2`` through ``q^N``.

    For ``m < 0`` the term is rewritten with ``1/(1-q^m)^2 = q^{2|m|}/(1-q^{|m|})^2`` so
    every piece is a power series.
    """
    if N < 0:
        raise ValueError("N must be non-negative")
    acc = TruncatedSeries([0], N)
    for m in bringmann_indices(N):
        sign = -1 if m % 2 == 0 else 1  # (-1)^{m-1}
        expo = 3 * m * (m + 1) // 2
        a = abs(m)
        if m < 0:
            expo += 2 * a
        t = TruncatedSeries.monomial(expo, N, sign)
        t = t.div_one_minus(1, a).div_one_minus(1, a)
        acc = acc + t
    inv = TruncatedSeries.one(N)
    for n in range(1, N + 1):
        inv = inv.div_one_minus(1, n)
    return acc * inv


def bringmann_indices(N: int) -> list[int]:
    """The m != 0 whose terms reach order <= N."""
    out = []
    m = 1
    while 3 * m * (m + 1) // 2 <= N:
        out.append(m)
        m += 1
    m = -1
    while 3 * m * (m + 1) // 2 + 2 * abs(m) <= N:
        out.append(m)
        m -= 1
    return sorted(out)


def rank_table_from_r1(nmax: int) -> dict[tuple[int, int], int]:
    """Recover ``N(m, n)`` for ``n <= nmax`` from ``R_1`` evaluated at roots of unity in ``w``.

    ``|m| <= n - 1`` for ``n >= 1`` (rank of ``(n)`` is ``n - 1``), so ``2 nmax + 1``
    evaluation points separate every rank; an inverse DFT and rounding (guard
    ``1e-6``) recover the integers.
    """
    M = 2 * nmax + 1
    vals = np.zeros((M, nmax + 1), dtype=complex)
    for j in range(M):
        vals[j] = r1_series(complex(e(j / M)), nmax).coeffs
    table: dict[tuple[int, int], int] = {}
    for n in range(nmax + 1):
        for m in range(-nmax, nmax + 1):
            c = (vals[:, n] * e(-np.arange(M) * m / M)).sum() / M
            r = round(c.real)
            if abs(c - r) > 1e-6:
                raise ArithmeticError(f"rank coefficient ({m},{n}) not near an integer: {c}")
            table[(m, n)] = int(r)
    return table
