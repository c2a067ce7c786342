"""Quantum modularity of A_n(x) = e(-x/24) R_n(zeta; e(x)).

The cocycle ``H_{n,gamma}(x) = A_n(x) - chi_gamma (cx+d)^{-1/2} A_n(gamma x)`` is
computed twice: directly from exact finite sums at rationals, and for
``gamma = S_ell`` from period integrals of weight 3/2 unary theta functions.

Notation used below: ``u_j = alpha_j/beta_j``,
``c_j = (zeta_{2beta_j}^{-3alpha_j} - zeta_{2beta_j}^{-alpha_j}) / Pi_j`` (the fitted
Appell coefficients), ``K = sum_j c_j e(3u_j/2)``, and ``kappa`` the extra
``(q)_inf`` coefficient of the fitted decomposition.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .modular import SL2Matrix, chi_eta
from .numerics import DomainError, check_uhp, csqrt, quad_vertical_ray
from .qseries import eta_value
from .quantumset import (INFINITY, GroupWord, RootVector, apply_mobius, ell_of, quantum_set_violation,
                         word_to_matrix)
from .ranksum import PiDaggerSolution, rn_finite_sum, rn_value
from .zwegers import g_ab, g_ab_reduced, script_r3, zwegers_R

DEF_FORM_MIN_HEIGHT = 0.05


class IdentityMismatch(ArithmeticError):
    """Two expressions that must agree identically disagree numerically."""


class PoleError(DomainError):
    pass


def _e(x) -> complex:
    return cmath.exp(2j * math.pi * x)


def zeta24_pow(m: int) -> complex:
    return _e((m % 24) / 24)


def _check_s_ell_chi(ell: int) -> complex:
    chi = chi_eta(SL2Matrix(1, 0, ell, 1))
    expected = zeta24_pow(-ell)
    if abs(chi - expected) > 1e-12:
        raise IdentityMismatch(f"chi_S_ell = {chi} differs from zeta_24^-ell = {expected}")
    return chi


def s_ell_act(ell: int, tau: complex) -> complex:
    return tau / (ell * tau + 1)


# ---------------------------------------------------------------------------
# the nonholomorphic part


def F_ab(u: float, tau: complex) -> complex:
    """``F(tau) = q^{-1/6} sum_pm pm e(-+u) R(3u pm tau; 3 tau)``."""
    tau = check_uhp(tau)
    out = zwegers_R(3 * u + tau, 3 * tau) * _e(-u) - zwegers_R(3 * u - tau, 3 * tau) * _e(u)
    return _e(-tau / 6) * out


@dataclass
class AMinusParts:
    f_form: complex  # -1/2 sum c_j e(2u_j) F(u_j) - K q^{-1/24}
    definition: complex | None  # (1/eta) sum c_j R3(u_j, -2tau; tau), None when too low in H
    completion: complex  # what completes q^{-1/24} R_n
    two_form_residual: float | None


def a_minus_parts(zeta: RootVector, tau: complex, pi: PiDaggerSolution,
                  check: bool = True) -> AMinusParts:
    tau = check_uhp(tau)
    us = [float(f) for f in zeta.fractions]
    first = 0j
    for cj, u in zip(pi.c, us):
        first += cj * _e(2 * u) * F_ab(u, tau)
    first *= -0.5
    qm24 = _e(-tau / 24)
    f_form = first - pi.K * qm24
    definition = None
    resid = None
    if tau.imag >= DEF_FORM_MIN_HEIGHT:
        eta = eta_value(tau)
        definition = sum(cj * script_r3(u, -2 * tau, tau) for cj, u in zip(pi.c, us)) / eta
        resid = abs(definition - f_form)
        if check and resid > 1e-8 * max(1.0, abs(f_form)):
            raise IdentityMismatch(f"the two forms of A^- differ by {resid:.3e} at tau={tau}")
    # (q)_inf R_n = sum c_j A_3 + kappa (q)_inf, so q^{-1/24} R_n picks up kappa q^{-1/24}
    # beyond the Appell part; the completion removes it together with the R3 part.
    completion = f_form - pi.kappa * qm24
    return AMinusParts(f_form, definition, completion, resid)


def a_minus(zeta: RootVector, tau: complex, pi: PiDaggerSolution) -> complex:
    """The nonholomorphic completion term added to ``q^{-1/24} R_n``."""
    return a_minus_parts(zeta, tau, pi).completion


def a_hat(zeta: RootVector, tau: complex, pi: PiDaggerSolution) -> complex:
    tau = check_uhp(tau)
    xs = [cmath.exp(2j * math.pi * float(f)) for f in zeta.fractions]
    hol = _e(-tau / 24) * rn_value(xs, _e(tau), tol=1e-15).value
    return hol + a_minus_parts(zeta, tau, pi, check=False).completion


def a_hat_modularity_residual(zeta: RootVector, tau: complex, pi: PiDaggerSolution,
                              gamma: GroupWord) -> float:
    """``|A^(tau) - chi_gamma (c tau + d)^{-1/2} A^(gamma tau)|``."""
    tau = check_uhp(tau)
    g = word_to_matrix(gamma).normalized()
    if g == SL2Matrix.identity():
        return 0.0
    if gamma.letters.count("S") + gamma.letters.count("s"):
        _check_s_ell_chi(gamma.ell)
    lhs = a_hat(zeta, tau, pi)
    rhs = chi_eta(g) / csqrt(g.c * tau + g.d) * a_hat(zeta, g.act(tau), pi)
    return abs(lhs - rhs)


# ---------------------------------------------------------------------------
# closed-form ingredients


def mathcal_e1(u: Fraction | float, ell: int, x: complex) -> complex:
    """``(ell x+1)^{1/2} zeta_24^ell e(-x/24) e(3u/2) - e(-S_ell x/24) e(3u/2)``."""
    w = ell * complex(x) + 1
    if abs(w) == 0:
        raise PoleError(f"x = -1/{ell} is the pole of S_ell")
    c = _e(1.5 * float(u))
    return csqrt(w) * zeta24_pow(ell) * _e(-complex(x) / 24) * c - _e(-(complex(x) / w) / 24) * c


def h_phi(ell: int, x: complex) -> complex:
    """Cocycle of ``e(-tau/24)``: ``e(-x/24) - zeta_24^-ell (ell x+1)^{-1/2} e(-S_ell x/24)``."""
    w = ell * complex(x) + 1
    if abs(w) == 0:
        raise PoleError(f"x = -1/{ell} is the pole of S_ell")
    return _e(-complex(x) / 24) - zeta24_pow(-ell) / csqrt(w) * _e(-(complex(x) / w) / 24)


@dataclass
class IntegralValue:
    value: complex
    error: float


def theta_period_integral(a: float, b: float, ell: int, x: complex, tol: float = 1e-12,
                          t_split: float = 0.5) -> IntegralValue:
    """``int_{1/ell}^{i oo} g_{a,b}(3 rho) / sqrt(-i(rho + x)) d rho`` on the ray ``rho = 1/ell + i t``.

    For ``3t >= t_split`` the g-series is summed directly; below, ``g`` is first
    carried by the modular transformation laws to a point of height >= 0.8, so
    no series is ever summed close to the real line.
    """
    x = complex(x)
    base = 1.0 / ell
    if abs(base + x) < 1e-15:
        raise PoleError("the radicand vanishes at the endpoint (x = -1/ell)")
    if float(a).is_integer():
        raise DomainError("a must not be an integer")
    h_split = t_split / 3

    def low(z):
        return np.array([g_ab_reduced(a, b, 3 * zz) / csqrt(-1j * (zz + x)) for zz in z])

    def high(z):
        zz = z + 1j * h_split
        return np.array([g_ab(a, b, 3 * w) / csqrt(-1j * (w + x)) for w in zz])

    v1, e1 = quad_vertical_ray(low, base, tol / 2, height=h_split)
    v2, e2 = quad_vertical_ray(high, base, tol / 2, scale=1.0)
    return IntegralValue(v1 + v2, e1 + e2)


def _pm_integrals(u: float, ell: int, x: complex, tol: float) -> tuple[dict, float]:
    out, err = {}, 0.0
    for s in (1, -1):
        iv = theta_period_integral(s / 3 + 0.5, 0.5 - 3 * u, ell, x, tol)
        out[s] = iv.value
        err += iv.error
    return out, err


def g_closed(u: float, ell: int, x: complex, tol: float = 1e-12) -> tuple[complex, float]:
    """``sqrt(3) sum_pm -+ e(-+1/6) int ...``: the integral form of ``G``."""
    I, err = _pm_integrals(u, ell, x, tol)
    val = math.sqrt(3) * (-_e(-1 / 6) * I[1] + _e(1 / 6) * I[-1])
    return val, math.sqrt(3) * err


def g_f_route(u: float, ell: int, tau: complex) -> complex:
    """``F(tau) - zeta_24^-ell (ell tau+1)^{-1/2} F(S_ell tau)``."""
    tau = check_uhp(tau)
    return F_ab(u, tau) - zeta24_pow(-ell) / csqrt(ell * tau + 1) * F_ab(u, s_ell_act(ell, tau))


@dataclass
class GRoutes:
    f_route: complex | None
    closed_form: complex
    residual: float | None
    error_estimate: float


def g_alpha_beta(u: Fraction, ell: int, tau: complex, tol: float = 1e-12) -> GRoutes:
    u = Fraction(u)
    m = round(3 * u)
    r = 3 * u - m
    if abs(r) == Fraction(1, 2):
        raise DomainError("3 alpha/beta is a half-integer (beta = 2)")
    tau = complex(tau)
    closed, err = g_closed(float(u), ell, tau, tol)
    if tau.imag > 0:
        f = g_f_route(float(u), ell, tau)
        return GRoutes(f, closed, abs(f - closed), err)
    return GRoutes(None, closed, None, err)


# ---------------------------------------------------------------------------
# cocycles


@lru_cache(maxsize=4096)
def _r_n_mod_one(x: Fraction, zeta: RootVector) -> complex:
    return rn_finite_sum(zeta, x).value


def _a_n_cached(x: Fraction, zeta: RootVector) -> complex:
    # R_n(zeta; e(x)) only sees x mod 1, so translates share one finite sum
    return _e(-float(x) / 24) * _r_n_mod_one(x % 1, zeta)


def _matrix_for(gamma) -> SL2Matrix:
    if isinstance(gamma, GroupWord):
        return word_to_matrix(gamma)
    return gamma


def h_cocycle_direct(zeta: RootVector, gamma: GroupWord | SL2Matrix, x: Fraction) -> complex:
    """``A_n(x) - chi_gamma (cx+d)^{-1/2} A_n(gamma x)`` from exact finite sums.

    ``gamma`` is replaced by ``-gamma`` when needed so that ``c > 0`` (or ``c = 0, d = 1``),
    the same normalization used for ``chi``.
    """
    x = Fraction(x)
    why = quantum_set_violation(zeta, x)
    if why is not None:
        raise DomainError(f"{x} is not in the quantum set: {why}")
    g = _matrix_for(gamma).normalized()
    y = apply_mobius(g, x)
    if y == INFINITY:
        raise PoleError(f"gamma sends {x} to infinity")
    w = g.c * x + g.d
    return _a_n_cached(x, zeta) - chi_eta(g) / csqrt(complex(w)) * _a_n_cached(y, zeta)


@dataclass
class ClosedForm:
    """Assemblies of ``H_{n,S_ell}(x)`` from the integral representation.

    ``value`` is the reference assembly: the G-integrals with prefactors
    ``sqrt3 (-+e(-+1/6))`` plus ``(K + kappa) h_phi``.  The other fields keep the
    alternative assemblies so the report shows which one the direct cocycle follows.
    """

    value: complex
    route_a: complex  # (sqrt3/2) zeta_6^{+-1} prefactors, E_1 term with K only
    route_b: complex  # sqrt3 (-+e(-+1/6)) prefactors, E_1 term with K only
    e1_term: complex  # sum_j c_j (ell x+1)^{-1/2} zeta_24^-ell E_1 = K h_phi
    kappa_term: complex  # kappa h_phi
    error_estimate: float


def h_closed_form_s_ell(zeta: RootVector, x: complex, pi: PiDaggerSolution,
                        tol: float = 1e-12) -> ClosedForm:
    ell = ell_of(zeta)
    _check_s_ell_chi(ell)
    x = complex(x)
    if abs(ell * x + 1) < 1e-15:
        raise PoleError(f"x = -1/{ell}")
    g_part = 0j
    a_part = 0j
    err = 0.0
    e1 = 0j
    for cj, (al, be) in zip(pi.c, zeta.entries):
        u = al / be
        I, ie = _pm_integrals(u, ell, x, tol)
        cprime = cj * _e(2 * u)  # = (zeta_{2b}^{a} - zeta_{2b}^{3a}) / Pi
        G = math.sqrt(3) * (-_e(-1 / 6) * I[1] + _e(1 / 6) * I[-1])
        g_part += 0.5 * cprime * G
        a_part += 0.5 * math.sqrt(3) * cprime * (_e(1 / 6) * I[1] + _e(-1 / 6) * I[-1])
        err += abs(cprime) * math.sqrt(3) * ie
        e1 += cj * zeta24_pow(-ell) / csqrt(ell * x + 1) * mathcal_e1(u, ell, x)
    hp = h_phi(ell, x)
    kappa_term = pi.kappa * hp
    return ClosedForm(g_part + e1 + kappa_term, a_part + e1, g_part + e1, e1, kappa_term, err)


@dataclass
class CocycleReport:
    x: Fraction
    gamma: str
    direct_value: complex
    closed_form_value: complex
    residual: float
    integral_error_estimate: float
    variants: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return dict(x=str(self.x), gamma=self.gamma, direct_value=self.direct_value,
                    closed_form_value=self.closed_form_value, residual=self.residual,
                    integral_error_estimate=self.integral_error_estimate, variants=self.variants)


def cocycle_report(zeta: RootVector, x: Fraction, pi: PiDaggerSolution, word: str = "S",
                   tol: float = 1e-12) -> CocycleReport:
    """Direct vs closed-form ``H`` for ``word`` in ``{"S", "T"}`` (``H_T`` has closed form 0)."""
    x = Fraction(x)
    ell = ell_of(zeta)
    w = GroupWord(word, ell)
    direct = h_cocycle_direct(zeta, w, x)
    if word == "T":
        return CocycleReport(x, word, direct, 0j, abs(direct), 0.0)
    if word != "S":
        raise ValueError("closed form is available for S and T only")
    cf = h_closed_form_s_ell(zeta, float(x), pi, tol)
    variants = {
        "route_a_half_sqrt3_zeta6": {"value": cf.route_a, "residual": abs(direct - cf.route_a)},
        "route_b_sqrt3_e16": {"value": cf.route_b, "residual": abs(direct - cf.route_b)},
        "e1_term": cf.e1_term,
        "kappa_term": cf.kappa_term,
    }
    return CocycleReport(x, word, direct, cf.value, abs(direct - cf.value), cf.error_estimate, variants)


def cocycle_compose_residual(zeta: RootVector, gamma: GroupWord, gamma_prime: GroupWord,
                             x: Fraction) -> float:
    """Defect of ``H_{gamma gamma'}(x) = H_{gamma'}(x) + chi_{gamma'} (Cx+D)^{-1/2} H_gamma(gamma' x)``."""
    x = Fraction(x)
    gp = word_to_matrix(gamma_prime).normalized()
    y = apply_mobius(gp, x)
    if y == INFINITY:
        raise PoleError(f"{gamma_prime} sends {x} to infinity")
    lhs = h_cocycle_direct(zeta, gamma * gamma_prime, x)
    rhs = (h_cocycle_direct(zeta, gamma_prime, x)
           + chi_eta(gp) / csqrt(complex(gp.c * x + gp.d)) * h_cocycle_direct(zeta, gamma, y))
    return abs(lhs - rhs)
