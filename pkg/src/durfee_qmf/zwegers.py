"""Jacobi theta, Zwegers' R, the Mordell integral, unary theta functions g_{a,b} and the level-3 Appell function.

All bilateral series are summed over a window of indices chosen from the Gaussian
envelope of the terms, then checked: the five outermost terms on each side must be
below ``1e-16`` of the largest term.  Terms are assembled from a single exponent
(real part for the size, exactly reduced phase for the angle) so that nothing
overflows at small ``Im tau``.
"""

from __future__ import annotations

import cmath
import math

import numpy as np

from .numerics import (PrecisionError, check_uhp, e, frac_mul,
                       quad_gaussian_line, sgn_minus_E)

LOG_EPS = math.log(1e-17)
MAX_TERMS = 4_000_000
EDGE = 5


class SingularArgumentError(ValueError):
    """The Appell denominator vanishes (u on the lattice Z tau + Z)."""


def _window(lo: float, hi: float, y: float, extra: float = 0.0) -> tuple[int, int]:
    """Integer range covering ``[lo, hi]`` plus a Gaussian margin for width ``1/sqrt(pi y)``."""
    w = math.sqrt((-LOG_EPS + extra) / (math.pi * y)) + EDGE + 2
    a, b = math.floor(lo - w), math.ceil(hi + w)
    if b - a > MAX_TERMS:
        raise PrecisionError(f"Im(tau)={y:.3e} needs {b - a} terms; too close to the real line")
    return a, b


def _edge_check(logmag: np.ndarray, name: str) -> None:
    top = logmag.max()
    if not np.isfinite(top):
        return
    if logmag[:EDGE].max() > top + LOG_EPS + 2.3 or logmag[-EDGE:].max() > top + LOG_EPS + 2.3:
        raise PrecisionError(f"{name}: series window did not capture the tail")


def _fsum(z: np.ndarray) -> complex:
    return complex(math.fsum(z.real), math.fsum(z.imag))


# ---------------------------------------------------------------------------
# theta


def theta(u: complex, tau: complex) -> complex:
    """``sum_{nu in 1/2 + Z} exp(pi i nu^2 tau + 2 pi i nu (u + 1/2))``."""
    tau = check_uhp(tau)
    u = complex(u)
    y = tau.imag
    a = u.imag / y
    lo, hi = _window(-a - 0.5, -a + 0.5, y)
    m = np.arange(lo, hi + 1)
    k = 2 * m + 1  # nu = k/2
    logmag = -2 * math.pi * (k * k * y / 8 + k * u.imag / 2)
    phase = frac_mul(k * k, tau.real / 8) + frac_mul(k, (u.real + 0.5) / 2)
    _edge_check(logmag, "theta")
    return _fsum(np.exp(logmag) * e(phase))


def theta_product(u: complex, tau: complex) -> complex:
    """Triple-product form ``-i q^{1/8} zeta^{-1/2} prod (1-q^m)(1-zeta q^{m-1})(1-zeta^{-1} q^m)``."""
    tau = check_uhp(tau)
    u = complex(u)
    q = cmath.exp(2j * math.pi * tau)
    z = cmath.exp(2j * math.pi * u)
    out = -1j * cmath.exp(1j * math.pi * tau / 4 - 1j * math.pi * u)
    m = 1
    while True:
        qm = q**m
        out *= (1 - qm) * (1 - z * q ** (m - 1)) * (1 - qm / z)
        if abs(qm) * (1 + abs(z) + 1 / abs(z)) < 1e-18 and m > 2:
            break
        m += 1
    return out


# ---------------------------------------------------------------------------
# R


def zwegers_R(u: complex, tau: complex) -> complex:
    """Zwegers' nonholomorphic ``R(u; tau)``."""
    tau = check_uhp(tau)
    u = complex(u)
    y = tau.imag
    a = u.imag / y
    lo, hi = _window(min(-a, 0.0) - 0.5, max(-a, 0.0) + 0.5, y)
    m = np.arange(lo, hi + 1)
    k = 2 * m + 1
    nu = k / 2
    mant, gexp = sgn_minus_E(nu, (nu + a) * math.sqrt(2 * y))
    # |exp(-pi i nu^2 tau - 2 pi i nu u)| = exp(pi y nu^2 + 2 pi nu Im u)
    logmag = gexp + math.pi * y * nu * nu + 2 * math.pi * nu * u.imag
    phase = -frac_mul(k * k, tau.real / 8) - frac_mul(k, u.real / 2)
    sign = np.where(m % 2 == 0, 1.0, -1.0)
    with np.errstate(under="ignore"):
        terms = sign * mant * np.exp(logmag) * e(phase)
    lm = logmag + np.log(np.abs(mant) + 1e-300)
    _edge_check(lm, "R")
    return _fsum(terms)


# ---------------------------------------------------------------------------
# Mordell integral


def _log_cosh(x: np.ndarray) -> np.ndarray:
    ax = np.abs(x)
    return ax + np.log1p(np.exp(-2 * ax)) - math.log(2)


def mordell_h(u: complex, tau: complex, tol: float = 1e-13) -> complex:
    """``h(u; tau) = int_R exp(pi i tau t^2 - 2 pi u t) / cosh(pi t) dt`` on the real line."""
    tau = check_uhp(tau)
    u = complex(u)

    def f(t):
        return np.exp(1j * math.pi * tau * t * t - 2 * math.pi * u * t - _log_cosh(math.pi * t))

    centre = -u.real / tau.imag
    val, _ = quad_gaussian_line(f, tol, center=centre)
    return val


def mordell_h_with_error(u: complex, tau: complex, tol: float = 1e-13) -> tuple[complex, float]:
    tau = check_uhp(tau)
    u = complex(u)

    def f(t):
        return np.exp(1j * math.pi * tau * t * t - 2 * math.pi * u * t - _log_cosh(math.pi * t))

    return quad_gaussian_line(f, tol, center=-u.real / tau.imag)


# ---------------------------------------------------------------------------
# g_{a,b}


def _g_ab_scaled(a: float, b: float, tau: complex) -> tuple[complex, float]:
    """``g_{a,b}(tau)`` as ``(s, L)`` with value ``s * exp(L)``."""
    tau = check_uhp(tau)
    y = tau.imag
    lo, hi = _window(-a, -a, y)
    m = np.arange(lo, hi + 1)
    nu = a + m
    logmag = -math.pi * y * nu * nu
    top = float(logmag.max())
    phase = np.mod(0.5 * nu * nu * tau.real + nu * b, 1.0)
    return _fsum(nu * np.exp(logmag - top) * e(phase)), top


def g_ab(a: float, b: float, tau: complex) -> complex:
    """``g_{a,b}(tau) = sum_{nu in a + Z} nu exp(pi i nu^2 tau + 2 pi i nu b)`` summed directly."""
    s, top = _g_ab_scaled(a, b, tau)
    return s * math.exp(top)


def g_ab_reduced(a: float, b: float, tau: complex, min_height: float = 0.8) -> complex:
    """``g_{a,b}(tau)`` for any ``tau`` in H.

    Moves ``tau`` into the standard fundamental domain with the translation and
    inversion laws of ``g``::

        g_{a,b}(tau + n) = e(-n a (a+1)/2) g_{a, b + n a + n/2}(tau)
        g_{a,b}(-1/tau)  = i e(a b) (-i tau)^{3/2} g_{b,-a}(tau)
        g_{a+1,b} = g_{a,b},   g_{a,b+1} = e(a) g_{a,b}

    and sums the series there, so the series never sees a small imaginary part.
    """
    tau = check_uhp(tau)
    logf = 0j  # log of the accumulated factor
    a = float(a)
    b = float(b)
    for _ in range(10_000):
        fa = math.floor(a)
        a -= fa
        kb = math.floor(b)
        if kb:
            logf += 2j * math.pi * ((kb * a) % 1.0)
            b -= kb
        if tau.imag >= min_height:
            break
        n = round(tau.real)
        if n:
            logf += -1j * math.pi * ((n * a * (a + 1)) % 2.0)
            b = b + n * a + n / 2
            tau = complex(tau.real - n, tau.imag)
            kb = math.floor(b)
            if kb:
                logf += 2j * math.pi * ((kb * a) % 1.0)
                b -= kb
        if abs(tau) < 1 - 1e-15:
            tp = -1 / tau
            logf += 0.5j * math.pi + 2j * math.pi * a * b + 1.5 * cmath.log(-1j * tp)
            a, b = b, -a
            tau = tp
        elif tau.imag < min_height:
            break
    sc, top = _g_ab_scaled(a, b, tau)
    if sc == 0:
        return 0j
    expo = logf + top
    if expo.real < -745:
        return 0j
    return sc * cmath.exp(expo)


# ---------------------------------------------------------------------------
# Appell function


def _lattice_distance(u: complex, tau: complex) -> float:
    n = round(u.imag / tau.imag)
    w = u - n * tau
    return abs(w - round(w.real))


def appell_a3(u: complex, v: complex, tau: complex) -> complex:
    """``A_3(u,v;tau) = e^{3 pi i u} sum_n (-1)^n q^{3n(n+1)/2} e^{2 pi i n v} / (1 - e^{2 pi i u} q^n)``."""
    tau = check_uhp(tau)
    u, v = complex(u), complex(v)
    if _lattice_distance(u, tau) < 1e-12:
        raise SingularArgumentError(f"u={u} lies on the lattice Z tau + Z for tau={tau}")
    y = tau.imag
    # size of term n ~ exp(-2 pi (3 n^2 y/2 + n (3y/2 + Im v) - min(0, n y + Im u)))
    centre = -(1.5 * y + v.imag) / (3 * y)
    lo, hi = _window(centre - abs(u.imag / y) - 1, centre + abs(u.imag / y) + 1, 3 * y)
    n = np.arange(lo, hi + 1)
    X = 2j * math.pi * (u + n * tau)
    num = 2j * math.pi * (1.5 * n * (n + 1) * tau + n * v)
    big = X.real > 0  # |e(u + n tau)| > 1
    with np.errstate(over="ignore", under="ignore"):
        t_small = np.exp(num) / (1 - np.exp(X))
        t_big = -np.exp(num - X) / (1 - np.exp(-X))
    terms = np.where(big, t_big, t_small) * np.where(n % 2 == 0, 1.0, -1.0)
    lm = np.log(np.abs(terms) + 1e-300)
    _edge_check(lm, "A_3")
    return cmath.exp(3j * math.pi * u) * _fsum(terms)


def script_r3(u: complex, v: complex, tau: complex, shifted: bool = True) -> complex:
    """The completion term ``(i/2) sum_{j=0}^2 e(j u) theta(v + j tau [+1]; 3 tau) R(3u - v - j tau [-1]; 3 tau)``."""
    tau = check_uhp(tau)
    s = 1 if shifted else 0
    total = 0j
    for j in range(3):
        th = theta(v + j * tau + s, 3 * tau)
        if th == 0:
            continue
        total += cmath.exp(2j * math.pi * j * u) * th * zwegers_R(3 * u - v - j * tau - s, 3 * tau)
    return 0.5j * total


def script_r3_forms(u: complex, v: complex, tau: complex) -> tuple[complex, complex]:
    """The completion term written with and without the ``+1`` shifts; the two must agree."""
    return script_r3(u, v, tau, True), script_r3(u, v, tau, False)


def appell_a3_hat(u: complex, v: complex, tau: complex) -> complex:
    return appell_a3(u, v, tau) + script_r3(u, v, tau)


def a3hat_elliptic_residual(u: complex, v: complex, tau: complex,
                            n1: int, n2: int, m1: int, m2: int) -> float:
    """Defect of the elliptic transformation law of the completed Appell function."""
    tau = check_uhp(tau)
    u, v = complex(u), complex(v)
    lhs = appell_a3_hat(u + n1 * tau + m1, v + n2 * tau + m2, tau)
    factor = (-1) ** (n1 + m1) * cmath.exp(
        2j * math.pi * (u * (3 * n1 - n2) - v * n1) + 2j * math.pi * tau * (1.5 * n1 * n1 - n1 * n2))
    rhs = factor * appell_a3_hat(u, v, tau)
    return abs(lhs - rhs)
