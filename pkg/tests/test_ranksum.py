from __future__ import annotations

import cmath
import itertools
import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest

from durfee_qmf.numerics import DomainError
from durfee_qmf.qseries import SingularInputError, bringmann_r2_series, r1_series
from durfee_qmf.quantumset import RootVector
from durfee_qmf.ranksum import (IllConditionedError, MAX_ORDER, ResourceError, a_n, a_n_at_rational,
                                default_taus, geometric_ratios, radial_limit_probe, rn_finite_sum, rn_multisum,
                                rn_value, root_coefficients, solve_pi_dagger)

PINNED_1_3 = complex(2.0450849718747373, -2.0628430766936812)


def _poch(a, q, m):
    out = 1
    for i in range(m):
        out *= 1 - a * q**i
    return out


def _literal_term(x, q, m):
    """One summand of the defining multisum, with every Pochhammer symbol multiplied out."""
    n = len(x)
    S = list(itertools.accumulate(m))
    expo = S[-1] ** 2 + sum(S[: n - 1])
    den = _poch(x[0] * q, q, m[0]) * _poch(q / x[0], q, m[0])
    for j in range(1, n):
        den *= _poch(x[j] * q ** S[j - 1], q, m[j] + 1) * _poch(q ** S[j - 1] / x[j], q, m[j] + 1)
    return q**expo / den


def _literal_value(x, q, bound):
    n = len(x)
    total = 0
    for m in itertools.product(range(bound), repeat=n):
        if m[0] == 0:
            continue
        total += _literal_term(x, q, m)
    return total


def test_multisum_matches_bringmann():
    assert rn_multisum([1, 1], 20).tolist() == bringmann_r2_series(20).tolist()


def test_multisum_n1_is_rank_gf():
    w = complex(cmath.exp(2j * math.pi / 4))
    a = rn_multisum([w], 15)
    b = r1_series(w, 15)
    assert np.allclose(a.coeffs, b.coeffs, atol=1e-12)


def test_multisum_constant_term_vanishes():
    assert rn_multisum([2.0, 0.5j], 6)[0] == 0
    assert rn_multisum([1, -1, 1], 6)[0] == 0


def test_multisum_against_literal_definition():
    x = [0.3 + 0.8j, -1.2 + 0.1j, 0.7]
    q = 0.21 - 0.12j
    N = 30
    series = rn_multisum(x, N)
    lit = _literal_value(x, q, 7)
    assert abs(series.evaluate(q) - lit) < 1e-12
    assert abs(rn_value(x, q).value - lit) < 1e-12


def test_multisum_singular_input():
    with pytest.raises(SingularInputError, match="x_2"):
        rn_multisum([1, 0], 5)


def test_rn_value_against_mpmath_literal():
    x = [cmath.exp(2j * math.pi / 4), cmath.exp(2j * math.pi / 5)]
    q = 0.55 * cmath.exp(2j * math.pi / 3)
    with mpmath.workdps(30):
        lit = complex(_literal_value([mpmath.mpc(v) for v in x], mpmath.mpc(q), 40))
    ev = rn_value(x, q)
    assert ev.mode == "truncated-multisum"
    assert abs(ev.value - lit) < 1e-13


def test_rn_value_cap():
    x = [cmath.exp(2j * math.pi / 4), cmath.exp(2j * math.pi / 5)]
    with pytest.raises(ResourceError):
        rn_value(x, 0.999, cap=64)
    with pytest.raises(DomainError):
        rn_value(x, 1.0)
    assert MAX_ORDER == 4000


def test_finite_sum_pinned_value(zeta45):
    ev = rn_finite_sum(zeta45, Fraction(1, 3))
    assert ev.mode == "finite-sum" and ev.term_count == 9
    assert abs(ev.value - PINNED_1_3) < 1e-13
    assert all(r < 1 for r in ev.geometric_ratios)


def test_finite_sum_against_literal_series(zeta45):
    # sum the defining series at the root of unity term by term over enough blocks of k
    # that the geometric tail (ratio below 1/2 here) is under 1e-10
    x = [cmath.exp(2j * math.pi / 4), cmath.exp(2j * math.pi / 5)]
    for frac in (Fraction(1, 3), Fraction(1, 2)):
        k = frac.denominator
        ev = rn_finite_sum(zeta45, frac)
        blocks = math.ceil(math.log(1e-11) / math.log(max(ev.geometric_ratios)))
        lit = _literal_value(x, cmath.exp(2j * math.pi * float(frac)), blocks * k)
        assert abs(ev.value - lit) < 1e-8


def test_finite_sum_depends_on_h_mod_k(zeta45):
    base = rn_finite_sum(zeta45, Fraction(1, 3)).value
    for h in (4, 7, -2):
        assert abs(rn_finite_sum(zeta45, Fraction(h, 3)).value - base) < 1e-13


def test_finite_sum_rejects_outside_points(zeta45):
    with pytest.raises(DomainError, match="beta_2 divides k"):
        rn_finite_sum(zeta45, Fraction(1, 5))
    with pytest.raises(DomainError):
        a_n_at_rational(Fraction(1, 5), zeta45)


def test_geometric_ratios(zeta45):
    r = geometric_ratios(zeta45, 3)
    assert abs(r[0] - 0.5) < 1e-15
    assert abs(r[1] - 1 / (2 - 2 * math.cos(2 * math.pi * 3 / 5))) < 1e-15


def test_a_n_translation(zeta45):
    x = Fraction(1, 3)
    lhs = a_n_at_rational(x + 1, zeta45)
    rhs = cmath.exp(-2j * math.pi / 24) * a_n_at_rational(x, zeta45)
    assert abs(lhs - rhs) < 1e-13


def test_a_n_high_in_h(zeta45):
    assert abs(a_n(0.33 + 10j, zeta45)) < 1e-10


def test_radial_probe_single_height_is_multisum(zeta45):
    x = Fraction(1, 3)
    v = radial_limit_probe(zeta45, x, [0.5])[0]
    xs = [cmath.exp(2j * math.pi * float(f)) for f in zeta45.fractions]
    assert abs(v - rn_value(xs, 0.5 * cmath.exp(2j * math.pi / 3), tol=1e-12).value) < 1e-14
    with pytest.raises(DomainError):
        radial_limit_probe(zeta45, x, [1.0])


def test_radial_probe_approaches_finite_sum(zeta45):
    x = Fraction(1, 2)
    target = rn_finite_sum(zeta45, x).value
    seq = radial_limit_probe(zeta45, x, [1 - 2.0**-m for m in range(6, 11)])
    gaps = [abs(v - target) for v in seq]
    assert all(b < a for a, b in zip(gaps, gaps[1:]))
    assert gaps[-1] < 1e-3
    # the probe converges like (1 - t); one Richardson step lands on the finite sum
    assert abs(2 * seq[-1] - seq[-2] - target) < 1e-5


def test_pi_dagger_fit(zeta45, pi45):
    assert pi45.usable and pi45.residual < 1e-7
    assert pi45.stability < 1e-7
    assert abs(pi45.K + pi45.kappa) < 1e-10
    coeffs = root_coefficients(zeta45)
    for c, p, cf in zip(pi45.c, pi45.pi_dagger, coeffs):
        assert abs(cf / p - c) < 1e-12


def test_pi_dagger_permutation(zeta45, pi45):
    swapped = solve_pi_dagger(RootVector.parse("1/5,1/4"), check_stability=False)
    assert abs(swapped.c[0] - pi45.c[1]) < 1e-8 * abs(pi45.c[1])
    assert abs(swapped.c[1] - pi45.c[0]) < 1e-8 * abs(pi45.c[0])


def test_pi_dagger_input_checks(zeta45):
    with pytest.raises(ValueError, match="distinct"):
        solve_pi_dagger(zeta45, [0.1 + 0.5j] * 8, check_stability=False)
    with pytest.raises(ValueError, match="Im"):
        solve_pi_dagger(zeta45, default_taus(7) + [0.1 + 3j], check_stability=False)
    with pytest.raises(ValueError):
        solve_pi_dagger(zeta45, default_taus(5), check_stability=False)


def test_pi_dagger_ill_conditioned(zeta45):
    taus = [complex(0.1, 0.5 + 1e-9 * i) for i in range(8)]
    with pytest.raises(IllConditionedError):
        solve_pi_dagger(zeta45, taus, check_stability=False)


def test_pi_dagger_literal_fit_fails(pi45):
    # without the extra (q)_inf unknown the Appell decomposition does not close
    assert pi45.literal_residual > 1e-3
