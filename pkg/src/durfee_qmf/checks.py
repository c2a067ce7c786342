"""Residual batteries for the transformation laws, shared by the CLI and the test suite.

Every check returns records ``{"name", "residual", "tol", "ok"}``.  Residuals are
``|lhs - rhs| / max(1, |lhs|, |rhs|)`` so that large values (theta high up in u)
are judged relative to their size and small ones absolutely.
"""

from __future__ import annotations

import cmath
import itertools
import math

import numpy as np

from .modular import SL2Matrix, chi_eta, chi_legendre, eta_transform_check
from .numerics import quad_vertical_ray
from .quantumset import random_word, word_to_matrix
from .zwegers import (a3hat_elliptic_residual, appell_a3_hat, g_ab, g_ab_reduced, mordell_h, script_r3_forms,
                      theta, theta_product, zwegers_R)

IDENTITY_TOL = 1e-8
QUADRATURE_TOL = 1e-7


def _rec(name: str, lhs: complex, rhs: complex, tol: float) -> dict:
    r = abs(lhs - rhs) / max(1.0, abs(lhs), abs(rhs))
    return {"name": name, "residual": float(r), "tol": tol, "ok": bool(r < tol)}


def _e(x) -> complex:
    return cmath.exp(2j * math.pi * x)


def sample_points(seed: int, count: int = 25) -> list[dict]:
    """Random ``(u, v, tau, a, b)`` with ``Im tau`` in ``[0.5, 2]``."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        tau = complex(rng.uniform(-0.5, 0.5), rng.uniform(0.5, 2.0))
        u = complex(rng.uniform(-0.5, 0.5), rng.uniform(-0.3, 0.3) * tau.imag)
        v = complex(rng.uniform(-0.5, 0.5), rng.uniform(-0.3, 0.3) * tau.imag)
        a, b = rng.uniform(-0.45, 0.45, 2)
        out.append(dict(u=u, v=v, tau=tau, a=float(a), b=float(b)))
    return out


def theta_checks(u: complex, tau: complex) -> list[dict]:
    th = theta(u, tau)
    return [
        _rec("theta(u+1) = -theta(u)", theta(u + 1, tau), -th, IDENTITY_TOL),
        _rec("theta(u+tau) = -e^{-pi i tau - 2 pi i u} theta(u)", theta(u + tau, tau),
             -cmath.exp(-1j * math.pi * tau - 2j * math.pi * u) * th, IDENTITY_TOL),
        _rec("theta series = triple product", th, theta_product(u, tau), IDENTITY_TOL),
    ]


def r_checks(u: complex, tau: complex) -> list[dict]:
    R = zwegers_R(u, tau)
    pi = math.pi
    return [
        _rec("R(u+1) = -R(u)", zwegers_R(u + 1, tau), -R, IDENTITY_TOL),
        _rec("R(u) + e^{-2 pi i u - pi i tau} R(u+tau) = 2 e^{-pi i u - pi i tau/4}",
             R + cmath.exp(-2j * pi * u - 1j * pi * tau) * zwegers_R(u + tau, tau),
             2 * cmath.exp(-1j * pi * u - 1j * pi * tau / 4), IDENTITY_TOL),
        _rec("R(u) = R(-u)", R, zwegers_R(-u, tau), IDENTITY_TOL),
        _rec("R(u; tau+1) = e^{-pi i/4} R(u; tau)", zwegers_R(u, tau + 1),
             cmath.exp(-1j * pi / 4) * R, IDENTITY_TOL),
        _rec("R(u/tau; -1/tau) e^{pi i u^2/tau}/sqrt(-i tau) + R(u) = h(u)",
             cmath.exp(1j * pi * u * u / tau) / cmath.sqrt(-1j * tau) * zwegers_R(u / tau, -1 / tau) + R,
             mordell_h(u, tau), QUADRATURE_TOL),
    ]


def g_checks(a: float, b: float, tau: complex) -> list[dict]:
    g = g_ab(a, b, tau)
    out = [
        _rec("g_{a+1,b} = g_{a,b}", g_ab(a + 1, b, tau), g, IDENTITY_TOL),
        _rec("g_{a,b+1} = e(a) g_{a,b}", g_ab(a, b + 1, tau), _e(a) * g, IDENTITY_TOL),
        _rec("g_{a,b}(tau+1) = e^{-pi i a(a+1)} g_{a,a+b+1/2}(tau)", g_ab(a, b, tau + 1),
             cmath.exp(-1j * math.pi * a * (a + 1)) * g_ab(a, a + b + 0.5, tau), IDENTITY_TOL),
        _rec("g_{a,b}(-1/tau) = i e(ab) (-i tau)^{3/2} g_{b,-a}(tau)", g_ab(a, b, -1 / tau),
             1j * _e(a * b) * cmath.exp(1.5 * cmath.log(-1j * tau)) * g_ab(b, -a, tau), IDENTITY_TOL),
        _rec("g reduced to the fundamental domain = g summed directly", g_ab_reduced(a, b, tau), g,
             IDENTITY_TOL),
    ]
    for m in range(-2, 3):
        out.append(_rec(f"g_{{a,b}} = e({m}a) g_{{a,b-{m}}}", g, _e(m * a) * g_ab(a, b - m, tau), IDENTITY_TOL))
    return out


def mordell_integral_check(a: float, b: float, tau: complex) -> dict:
    """``h(a tau - b) = -e(a^2 tau/2 - a(b+1/2)) int_0^{i oo} g_{a+1/2,b+1/2}(rho)/sqrt(-i(rho+tau)) d rho``."""

    def f(z):
        return np.array([g_ab_reduced(a + 0.5, b + 0.5, w) / cmath.sqrt(-1j * (w + tau)) for w in z])

    integral, _ = quad_vertical_ray(f, 0.0, 1e-12)
    rhs = -_e(a * a * tau / 2 - a * (b + 0.5)) * integral
    return _rec("h(a tau - b) = theta period integral", mordell_h(a * tau - b, tau), rhs, QUADRATURE_TOL)


def appell_checks(u: complex, v: complex, tau: complex) -> list[dict]:
    out = []
    for n1, n2, m1, m2 in itertools.product((-1, 0, 1), repeat=4):
        if (n1, n2, m1, m2) == (0, 0, 0, 0):
            continue
        r = a3hat_elliptic_residual(u, v, tau, n1, n2, m1, m2)
        scale = max(1.0, abs(appell_a3_hat(u, v, tau)))
        out.append({"name": f"A3hat elliptic ({n1},{n2},{m1},{m2})", "residual": r / scale,
                    "tol": IDENTITY_TOL, "ok": bool(r / scale < IDENTITY_TOL)})
    s1, s2 = script_r3_forms(u, v, tau)
    out.append(_rec("R3 shifted form = R3 plain form", s1, s2, IDENTITY_TOL))
    return out


def zwegers_battery(seed: int = 2024, count: int = 25) -> list[dict]:
    out = []
    for i, p in enumerate(sample_points(seed, count)):
        recs = (theta_checks(p["u"], p["tau"]) + r_checks(p["u"], p["tau"])
                + g_checks(p["a"], p["b"], p["tau"]) + [mordell_integral_check(p["a"], p["b"], p["tau"])])
        for r in recs:
            r["sample"] = i
        out.extend(recs)
    return out


def appell_battery(seed: int = 2024, count: int = 25) -> list[dict]:
    out = []
    for i, p in enumerate(sample_points(seed, count)):
        for r in appell_checks(p["u"], p["v"], p["tau"]):
            r["sample"] = i
            out.append(r)
    return out


def eta_battery(seed: int = 2024, ell: int = 2400, words: int = 100, grid: int = 20) -> list[dict]:
    """``chi_eta = chi_legendre`` on random words, and the eta law on a ``grid x grid`` battery."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(words):
        w = random_word(rng, ell, 8)
        g = word_to_matrix(w).normalized()
        r = abs(chi_eta(g) - chi_legendre(g))
        out.append({"name": f"chi_eta = chi_legendre on {w}", "residual": float(r), "tol": 1e-12,
                    "ok": bool(r < 1e-12)})
    taus = [complex(rng.uniform(-0.5, 0.5), rng.uniform(0.3, 2.0)) for _ in range(grid)]
    mats = []
    while len(mats) < grid:
        c = int(rng.integers(0, 12))
        d = int(rng.integers(-12, 13))
        if math.gcd(c, d) != 1 or (c == 0 and d != 1):
            continue
        # solve a d - b c = 1
        if c == 0:
            a, b = 1, int(rng.integers(-5, 6))
        else:
            a = pow(d, -1, c) if c > 1 else 0
            b = (a * d - 1) // c
        mats.append(SL2Matrix(a, b, c, d))
    for g in mats:
        for t in taus:
            r = eta_transform_check(g, t)
            out.append({"name": f"eta law {g.tolist()} at {t:.3f}", "residual": float(r), "tol": 1e-10,
                        "ok": bool(r < 1e-10)})
    return out


def summarize(records: list[dict]) -> dict:
    worst = max(records, key=lambda r: r["residual"] / r["tol"])
    return {"count": len(records), "failures": sum(not r["ok"] for r in records),
            "worst": worst["name"], "worst_residual": worst["residual"], "worst_tol": worst["tol"]}
