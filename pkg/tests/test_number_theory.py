from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from hermtheta.number_theory import (
    DirichletChar, NotPIntegral, QuadField, bernoulli, class_number, divisors, factorize,
    gen_bernoulli, is_fundamental, is_prime, kronecker, mod_p, p_valuation,
)


def legendre(a: int, p: int) -> int:
    r = pow(a % p, (p - 1) // 2, p)
    return -1 if r == p - 1 else r


@given(st.integers(-500, 500), st.sampled_from([3, 5, 7, 11, 13, 97]))
def test_kronecker_matches_euler_criterion(a, p):
    assert kronecker(a, p) == legendre(a, p)


@given(st.integers(-200, 200), st.integers(1, 60), st.integers(1, 60))
def test_kronecker_multiplicative_in_n(a, m, n):
    assert kronecker(a, m * n) == kronecker(a, m) * kronecker(a, n)


def test_kronecker_at_two():
    assert [kronecker(a, 2) for a in (1, 3, 5, 7, 8)] == [1, -1, -1, 1, 0]


@given(st.integers(1, 10**6))
def test_factorize_roundtrip(n):
    prod = 1
    for q, e in factorize(n).items():
        assert is_prime(q)
        prod *= q ** e
    assert prod == n


def test_divisors():
    assert divisors(12) == [1, 2, 3, 4, 6, 12]


def test_bernoulli_values():
    assert [bernoulli(n) for n in (0, 2, 4, 12)] == [1, Fraction(1, 6), Fraction(-1, 30), Fraction(-691, 2730)]
    assert bernoulli(5) == 0


def test_generalized_bernoulli_gauss():
    chi = DirichletChar(-4)
    assert gen_bernoulli(1, chi) == Fraction(-1, 2)
    assert gen_bernoulli(3, chi) == Fraction(3, 2)


@pytest.mark.parametrize("d", [-3, -4, -7, -8, -20, -23, -56, -84])
def test_class_number_formula(d):
    # h = -(w/2) B_{1,chi}
    K = QuadField(d)
    assert K.h == -Fraction(K.w, 2) * gen_bernoulli(1, K.chi)


def test_class_numbers():
    assert [class_number(d) for d in (-3, -4, -20, -23, -56, -84)] == [1, 1, 2, 3, 4, 4]


def test_fundamental():
    assert is_fundamental(-4) and is_fundamental(-3) and is_fundamental(-20)
    assert not is_fundamental(-12) and not is_fundamental(-16)
    with pytest.raises(ValueError):
        QuadField(-12)


def test_mod_p_and_valuation():
    assert mod_p(Fraction(1, 3), 7) == 5
    assert p_valuation(Fraction(49, 3), 7) == 2
    assert p_valuation(0, 7) == float("inf")
    with pytest.raises(NotPIntegral):
        mod_p(Fraction(1, 7), 7)


@pytest.mark.parametrize("d", [-3, -4, -7, -20])
def test_field_arithmetic(d):
    K = QuadField(d)
    for u in [(1, 2), (-3, 1), (0, 5)]:
        for v in [(2, -1), (1, 1)]:
            assert K.norm(*K.mul(u, v)) == K.norm(*u) * K.norm(*v)
        assert K.norm(*u) == K.mul(u, K.conj(*u))[0] and K.mul(u, K.conj(*u))[1] == 0
    assert len(K.units()) == K.w
