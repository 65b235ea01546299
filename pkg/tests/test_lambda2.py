from __future__ import annotations

import pytest
from oracles import brute_psd

from hermtheta.lambda2 import (
    HermIndex, decompose_pairs, enumerate_psd, gauss_classes, is_psd, lex_key, ndet, parse_gauss, rank,
)
from hermtheta.number_theory import QuadField


@pytest.mark.parametrize("d", [-4, -3, -20, -7])
@pytest.mark.parametrize("T", [0, 1, 2, 3, 4])
def test_enumerate_psd_vs_brute_force(d, T):
    K = QuadField(d)
    got = enumerate_psd(K, T)
    assert set(got) == brute_psd(K, T)
    assert got == sorted(got, key=lex_key)


def test_counts_small_trace():
    assert len(enumerate_psd(QuadField(-4), 1)) == 3
    # [1, c, 1] over Q(sqrt(3) i): Nm(c) <= 3 gives 13 psd indices, 7 of them definite
    ones = [H for H in enumerate_psd(QuadField(-3), 2) if H.m == H.n == 1]
    assert len(ones) == 13 and sum(ndet(H) > 0 for H in ones) == 7


def test_parse_and_print():
    for s in ["[1,1+i,1]", "[3,0,1]", "[2,-1-i,2]", "[1,i,1]", "[2,2-2i,3]"]:
        assert str(parse_gauss(s)) == s
    H = parse_gauss("[1,1+i,1]")
    assert H.ab == (1, 1) and ndet(H) == 2 and rank(H) == 2


def test_conj_and_arithmetic():
    H = parse_gauss("[2,1+i,3]")
    assert H.conj() == parse_gauss("[2,1-i,3]")
    assert (H + H) - H == H and H.scale(2) == H + H
    assert is_psd(HermIndex(0, 0, 0, 0))


def test_decompose_pairs():
    H = parse_gauss("[1,1+i,1]")
    pairs = decompose_pairs(H)
    assert all(a + b == H and is_psd(a) and is_psd(b) for a, b in pairs)
    K = QuadField(-4)
    expect = {(a, b) for a in enumerate_psd(K, 2) for b in enumerate_psd(K, 2) if a + b == H}
    assert set(pairs) == expect


def test_gauss_classes():
    cls = gauss_classes(6)
    reps = {r for H, r in cls.items() if rank(H) == 2 and min(r.m, r.n) >= 2}
    assert len(reps) == 28
    assert cls[parse_gauss("[2,4,4]")] == cls[parse_gauss("[2,0,2]")]
    assert all(ndet(H) == ndet(r) for H, r in cls.items())
