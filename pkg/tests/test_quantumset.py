from __future__ import annotations

import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from durfee_qmf.modular import SL2Matrix
from durfee_qmf.quantumset import (INFINITY, ClosureViolation, GroupWord, InvalidRootVector, RootVector,
                                   apply_mobius, closest_integer, closure_fuzz, ell_of, generator,
                                   is_in_quantum_set, quantum_pool, quantum_set_violation, unchecked_root_vector,
                                   word_to_matrix)


def test_parse_and_validate():
    z = RootVector.parse("1/4, 1/5")
    assert z.entries == ((1, 4), (1, 5))
    assert z.n == 2 and str(z) == "1/4,1/5"
    for bad in ("1/4", "1/2,1/5", "2/4,1/5", "1/4,3/4", "1/5,4/5", "1/4,1"):
        with pytest.raises(InvalidRootVector):
            RootVector.parse(bad)


def test_problems_are_named():
    probs = unchecked_root_vector([(2, 4), (1, 2)]).problems()
    assert any("gcd" in p for p in probs)
    assert any("at least 3" in p for p in probs)


def test_ell():
    assert ell_of(RootVector.parse("1/4,1/5")) == 2400
    assert ell_of(RootVector.parse("1/3,1/5")) == 2 * 15 * 15


def test_closest_integer_rounds_half_down():
    assert closest_integer(Fraction(5, 2)) == 2
    assert closest_integer(Fraction(-5, 2)) == -3
    assert closest_integer(Fraction(7, 3)) == 2
    assert closest_integer(Fraction(8, 3)) == 3


def test_membership_examples(zeta45):
    assert is_in_quantum_set(zeta45, Fraction(1, 3))
    assert is_in_quantum_set(zeta45, Fraction(0))
    assert is_in_quantum_set(zeta45, Fraction(1, 2403))
    assert "beta_2 divides k" in quantum_set_violation(zeta45, Fraction(1, 5))
    assert "beta_1 divides k" in quantum_set_violation(zeta45, Fraction(3, 8))
    # k = 6: 6/4 is 1/2 from an integer and 6/5 is 1/5 away, both above 1/6
    assert is_in_quantum_set(zeta45, Fraction(1, 6))
    # k = 1 and beta = 7: 1/7 <= 1/6
    assert "distance" in quantum_set_violation(RootVector.parse("1/7,1/5"), Fraction(1, 1))


@given(st.integers(-300, 300), st.integers(1, 300))
def test_membership_depends_only_on_k(h, k):
    z = RootVector.parse("1/4,1/5")
    if math.gcd(h, k) != 1:
        return
    assert is_in_quantum_set(z, Fraction(h, k)) == is_in_quantum_set(z, Fraction(1 if k > 1 else 0, k))


def test_pool(zeta45):
    pool = quantum_pool(zeta45, 12, 5)
    assert Fraction(1, 3) in pool and Fraction(0) in pool
    assert all(p.denominator not in (4, 5, 8, 10, 12) for p in pool)
    assert all(is_in_quantum_set(zeta45, p) for p in pool)


def test_words_and_matrices():
    ell = 2400
    assert generator("S", ell) == SL2Matrix(1, 0, ell, 1)
    assert generator("t", ell) == SL2Matrix(1, -1, 0, 1)
    w = GroupWord("TSt", ell)
    assert word_to_matrix(w) == generator("T", ell) @ generator("S", ell) @ generator("t", ell)
    assert word_to_matrix(w * w.inverse()) == SL2Matrix.identity()
    with pytest.raises(ValueError):
        GroupWord("SX", ell)
    with pytest.raises(ValueError):
        GroupWord("S", 2) * GroupWord("S", 3)


def test_apply_mobius():
    S = SL2Matrix(1, 0, 2400, 1)
    assert apply_mobius(S, Fraction(1, 3)) == Fraction(1, 2403)
    assert apply_mobius(S, Fraction(-1, 2400)) == INFINITY


@pytest.mark.parametrize("text", ["1/4,1/5", "1/3,1/5"])
def test_closure_fuzz(text):
    rep = closure_fuzz(RootVector.parse(text), trials=500, seed=42)
    assert rep.violations == []
    assert rep.checked + rep.infinite == 500


def test_closure_needs_the_right_level():
    # S_1 is not in <S_ell, T> and does leave the set
    z = RootVector.parse("1/4,1/5")
    pool = quantum_pool(z)
    y = apply_mobius(SL2Matrix(1, 0, 1, 1), Fraction(1, 3))  # S_1 is not in <S_ell, T>
    assert y == Fraction(1, 4) and not is_in_quantum_set(z, y)
    assert len(pool) > 100


def test_closure_fuzz_reproducible(zeta35):
    a = closure_fuzz(zeta35, trials=50, seed=3)
    b = closure_fuzz(zeta35, trials=50, seed=3)
    assert a.as_dict() == b.as_dict()


def test_closure_violation_type():
    assert issubclass(ClosureViolation, AssertionError)
