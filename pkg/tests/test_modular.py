from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from durfee_qmf.modular import (SL2Matrix, chi_eta, chi_legendre, dedekind_sum, eta_transform_check,
                                jacobi_symbol)
from durfee_qmf.modular import _reciprocity_sum, _sawtooth_sum


def _saw(x: Fraction) -> Fraction:
    if x.denominator == 1:
        return Fraction(0)
    return x - math.floor(x) - Fraction(1, 2)


def _dedekind_reference(m: int, t: int) -> Fraction:
    return sum((_saw(Fraction(j, t)) * _saw(Fraction(m * j, t)) for j in range(t)), Fraction(0))


@given(st.integers(-50, 50), st.integers(1, 60))
def test_dedekind_sum_definition(m, t):
    assert dedekind_sum(m, t) == _dedekind_reference(m, t)


@given(st.integers(1, 10**5), st.integers(2, 10**5))
def test_reciprocity_route_matches_definition(m, t):
    if math.gcd(m, t) != 1:
        m += 1
    if math.gcd(m, t) != 1:
        return
    assert _reciprocity_sum(m, t) == _sawtooth_sum(m, t)


def test_dedekind_reciprocity_law():
    for m, t in [(3, 7), (5, 12), (17, 100)]:
        lhs = dedekind_sum(m, t) + dedekind_sum(t, m)
        assert lhs == Fraction(m * m + t * t + 1, 12 * m * t) - Fraction(1, 4)


def test_large_modulus_uses_reciprocity():
    t = 10**6 + 3
    assert dedekind_sum(7, t) == _reciprocity_sum(7, t)
    with pytest.raises(ValueError):
        dedekind_sum(1, 0)


def test_sl2_basics():
    g = SL2Matrix(2, 1, 1, 1)
    assert g @ g.inverse() == SL2Matrix.identity()
    assert (-g).normalized() == g
    assert SL2Matrix(-1, 0, 0, -1).normalized() == SL2Matrix.identity()
    with pytest.raises(ValueError):
        SL2Matrix(1, 1, 1, 1)
    assert abs(SL2Matrix(0, -1, 1, 0).act(2j) - 0.5j) < 1e-15


def test_chi_eta_generators():
    assert abs(chi_eta(SL2Matrix(1, 1, 0, 1)) - np.exp(2j * np.pi / 24)) < 1e-15
    assert abs(chi_eta(SL2Matrix(0, -1, 1, 0)) - np.exp(-2j * np.pi / 8)) < 1e-15


def test_jacobi_symbol_against_euler_criterion():
    for p in (3, 5, 7, 11, 13, 101):
        for a in range(-20, 21):
            expected = 0 if a % p == 0 else (1 if pow(a, (p - 1) // 2, p) == 1 else -1)
            assert jacobi_symbol(a, p) == expected
    with pytest.raises(ValueError):
        jacobi_symbol(3, 4)


def _random_sl2(rng, size=40):
    while True:
        c = int(rng.integers(1, size))
        d = int(rng.integers(-size, size))
        if math.gcd(c, d) == 1:
            a = pow(d, -1, c) if c > 1 else 0
            b = (a * d - 1) // c
            return SL2Matrix(a, b, c, d)


def test_chi_two_formulas_agree():
    rng = np.random.default_rng(7)
    for _ in range(300):
        g = _random_sl2(rng)
        assert abs(chi_eta(g) - chi_legendre(g)) < 1e-12


def test_chi_is_a_multiplier_system():
    # weight 1/2 cocycle: chi(g1 g2) = sigma * chi(g1) chi(g2) with sigma from the square roots
    rng = np.random.default_rng(11)
    tau = 0.1 + 0.9j
    for _ in range(50):
        g1, g2 = _random_sl2(rng, 12), _random_sl2(rng, 12)
        g = (g1 @ g2).normalized()
        j = lambda m, t: np.sqrt(complex(m.c * t + m.d))
        sigma = j(g1, g2.act(tau)) * j(g2, tau) / j(g, tau)
        assert abs(chi_eta(g) - chi_eta(g1) * chi_eta(g2) * sigma) < 1e-12


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6), st.floats(-0.5, 0.5), st.floats(0.3, 2.0))
def test_eta_transformation(seed, x, y):
    g = _random_sl2(np.random.default_rng(seed), 15)
    assert eta_transform_check(g, complex(x, y)) < 1e-10
