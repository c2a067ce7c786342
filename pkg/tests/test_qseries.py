from __future__ import annotations

import cmath

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from durfee_qmf.numerics import DomainError
from durfee_qmf.qseries import (SingularInputError, bringmann_r2_series, eta_qexp, eta_series, eta_value,
                                partition_count, partitions, pochhammer, r1_series, rank, rank_count,
                                rank_table_from_r1)

# OEIS A000041
P = [1, 1, 2, 3, 5, 7, 11, 15, 22, 30, 42, 56, 77, 101, 135, 176, 231, 297, 385, 490, 627, 792,
     1002, 1255, 1575, 1958, 2436, 3010, 3718, 4565, 5604]
# OEIS A000025, third-order mock theta f(q)
F_MOCK = [1, 1, -2, 3, -3, 3, -5, 7, -6, 6, -10, 12, -11, 13, -17, 20, -21, 21, -27, 34, -33, 36,
          -46, 51, -53, 58]


def _f_mock_reference(N: int) -> list[int]:
    """sum q^{n^2} / (-q; q)_n^2 with plain list arithmetic."""
    total = [0] * (N + 1)
    n = 0
    while n * n <= N:
        t = [0] * (N + 1)
        t[n * n] = 1
        for i in range(1, n + 1):
            for _ in range(2):  # divide by (1 + q^i)
                for m in range(i, N + 1):
                    t[m] -= t[m - i]
        total = [a + b for a, b in zip(total, t)]
        n += 1
    return total


def test_partition_count_table():
    assert [partition_count(n) for n in range(31)] == P
    assert partition_count(-3) == 0
    assert partition_count(100) == 190569292


def test_partitions_enumeration():
    for n in range(16):
        parts = list(partitions(n))
        assert len(parts) == P[n]
        assert len(set(parts)) == len(parts)
        for lam in parts:
            assert sum(lam) == n
            assert list(lam) == sorted(lam, reverse=True)


def test_rank_examples():
    assert rank((4, 2, 1)) == 1
    assert rank(()) == 0
    assert rank_count(-2, 7) == 2
    assert rank_count(0, 0) == 1
    assert all(rank_count(m, 0) == 0 for m in range(-3, 4) if m)


def test_rank_symmetry_and_total():
    for n in range(1, 13):
        counts = {m: rank_count(m, n) for m in range(-n, n + 1)}
        assert sum(counts.values()) == P[n]
        assert all(counts[m] == counts[-m] for m in counts)


def test_r1_at_one_is_partition_gf():
    assert r1_series(1, 25).tolist() == P[:26]


def test_r1_at_minus_one_is_mock_f():
    assert r1_series(-1, 25).tolist() == F_MOCK
    assert _f_mock_reference(25) == F_MOCK


def test_r1_rejects_zero():
    with pytest.raises(SingularInputError):
        r1_series(0, 5)


def test_rank_table_from_r1_matches_enumeration():
    table = rank_table_from_r1(10)
    for n in range(11):
        for m in range(-n, n + 1):
            assert table.get((m, n), 0) == rank_count(m, n)


def test_eta_qexp_pentagonal():
    c = eta_qexp(40).tolist()
    expect = [0] * 41
    for k in range(-6, 7):
        g = k * (3 * k - 1) // 2
        if 0 <= g <= 40:
            expect[g] = (-1) ** k
    assert c == expect


@settings(max_examples=25, deadline=None)
@given(st.floats(-0.5, 0.5), st.floats(0.06, 2.0))
def test_eta_value_against_mpmath(x, y):
    tau = complex(x, y)
    q = mpmath.exp(2j * mpmath.pi * tau)
    ref = complex(mpmath.exp(2j * mpmath.pi * tau / 24) * mpmath.qp(q))
    assert abs(eta_value(tau) - ref) < 1e-13


def test_eta_series_agrees_with_product():
    for tau in (0.1 + 0.3j, -0.37 + 0.06j, 0.2 + 1.1j):
        assert abs(eta_series(tau) - eta_value(tau)) < 1e-13


def test_eta_low_height():
    # eta(-1/tau) = sqrt(-i tau) eta(tau) connects a point near the real line to one high up
    tau = 0.3 + 0.002j
    lhs = eta_value(-1 / tau)
    rhs = cmath.sqrt(-1j * tau) * eta_value(tau)
    assert abs(lhs - rhs) < 1e-12


def test_pochhammer():
    assert abs(pochhammer(0.5, 0.5, 3) - 0.5 * 0.75 * 0.875) < 1e-15
    q = 0.3 + 0.2j
    assert abs(pochhammer(q, q) - complex(mpmath.qp(q))) < 1e-14
    with pytest.raises(DomainError):
        pochhammer(0.5, 1.0)


def test_bringmann_series_starts():
    s = bringmann_r2_series(10)
    # the lowest multi-index contributes at q^2
    assert s.tolist()[:4] == [0, 0, 1, 4]
    assert all(isinstance(c, int) for c in s)
