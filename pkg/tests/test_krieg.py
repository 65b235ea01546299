from __future__ import annotations

from fractions import Fraction

import pytest
from oracles import chi4, gk_gauss_by_hand

from hermtheta.krieg import (
    KriegParams, VanishingNormalizer, a_D, eisenstein, elliptic_eisenstein_coeff, gk_direct, gk_product,
    krieg_expansion, prefactor,
)
from hermtheta.lambda2 import HermIndex, ndet, parse_gauss
from hermtheta.number_theory import QuadField, bernoulli, divisors
from hermtheta.qseries import siegel_phi


def test_hand_oracle_against_library():
    K = QuadField(-4)
    for N in range(1, 120):
        if 1 + chi4(-N):
            assert gk_gauss_by_hand(2, N) == gk_direct(K, 2, N) == gk_product(K, 2, N)


def test_e4_hand_values():
    # prefactor 4k(k-1)/(B_4 B_{3,chi}) = 48 / ((-1/30)(3/2)) = -960
    assert prefactor(QuadField(-4), 4) == -960
    E4 = eisenstein(4, 2)
    for s, N in (("[1,0,1]", 4), ("[1,1+i,1]", 2)):
        H = parse_gauss(s)
        assert ndet(H) == N
        assert E4[H] == -960 * gk_gauss_by_hand(2, N)
    assert E4[parse_gauss("[1,0,1]")] == 14400
    assert E4[parse_gauss("[1,1+i,1]")] == 2880


@pytest.mark.parametrize("d", [-4, -3, -20, -8])
def test_gk_direct_equals_product(d):
    K = QuadField(d)
    for s in range(1, 7):
        for N in range(1, 201):
            try:
                a = gk_direct(K, s, N)
            except VanishingNormalizer:
                pytest.fail(f"vanishing normalizer with nonzero sum at {d}, {s}, {N}")
            assert a == gk_product(K, s, N), (d, s, N)


@pytest.mark.parametrize("k", [4, 6, 8, 12])
def test_phi_is_elliptic_eisenstein(k):
    F = eisenstein(k, 8)
    phi = siegel_phi(F)
    assert phi[0] == 1
    for t in range(1, 9):
        assert phi[t] == -Fraction(2 * k) / bernoulli(k) * sum(e ** (k - 1) for e in divisors(t))
        assert phi[t] == elliptic_eisenstein_coeff(k, t)


def test_e4_is_g4_lattice_theta(g4):
    from hermtheta.theta import theta_series

    assert theta_series(g4, 3) == eisenstein(4, 3)


def test_symmetry_under_units_and_conj():
    E8 = eisenstein(8, 4)
    K = QuadField(-4)
    for H, v in E8.items():
        assert E8[H.conj()] == v
        for u in K.units():
            x, y = K.mul((H.x, H.y), u)
            assert E8[HermIndex(H.m, x, y, H.n)] == v


def test_params():
    assert KriegParams(QuadField(-4), 8).in_theorem_range
    assert not KriegParams(QuadField(-4), 4).in_theorem_range
    assert not KriegParams(QuadField(-4), 6).in_theorem_range
    assert KriegParams(QuadField(-3), 12).in_theorem_range
    with pytest.raises(ValueError):
        KriegParams(QuadField(-4), 7)
    with pytest.raises(ValueError):
        KriegParams(QuadField(-4), 2)


def test_a_d():
    K = QuadField(-4)
    assert [a_D(K, N) for N in (1, 2, 3, 4)] == [0, 1, 2, 1]


def test_other_fields_constant_term():
    for d, k in ((-3, 12), (-3, 6), (-20, 8)):
        F = krieg_expansion(KriegParams(QuadField(d), k), 3)
        assert F[HermIndex(0, 0, 0, 0, d)] == 1
