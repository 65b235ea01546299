from __future__ import annotations

from fractions import Fraction

import pytest

from hermtheta.congruence import (
    CHECKED, PROVED, REFUTED, REGISTRY, CheckContext, InsufficientBound, UnsupportedField, first_inert_prime,
    format_report, mod_p_singular_verify, run_named_checks, singular_prefactor, starstar_failures,
    sturm_trace_bound, theta_kernel_verify, verify_zero_mod_p,
)
from hermtheta.krieg import KriegParams, eisenstein, krieg_expansion
from hermtheta.lambda2 import HermIndex, parse_gauss
from hermtheta.number_theory import NotPIntegral, QuadField
from hermtheta.qseries import FourierExpansion, linear_combine, mul, theta_op

GAUSS, EIS = QuadField(-4), QuadField(-3)


def test_sturm_bounds():
    assert sturm_trace_bound(24, GAUSS) == 6
    assert sturm_trace_bound(16, GAUSS) == 4
    assert sturm_trace_bound(24, EIS) == 4
    with pytest.raises(UnsupportedField):
        sturm_trace_bound(12, QuadField(-20))


def test_trivial_multiple():
    v = verify_zero_mod_p(linear_combine([(7, eisenstein(4, 2))]), 7, 4)
    assert v.status == PROVED and v.bound_used == 0


def test_exact_identity(gens):
    F = linear_combine([(1, mul(gens.E4, gens.E4)), (-1, gens.E8), (-gens.chi8_normalizer, gens.chi8)])
    assert F.is_zero()
    assert verify_zero_mod_p(F, 5, 8).status == PROVED


def test_theta_e4_mod5_regression():
    # E4 = 1 mod 5, so Theta(E4) vanishes mod 5
    v = theta_kernel_verify(eisenstein(4, 6), 5)
    assert v.status == PROVED and v.bound_used == 2


def test_cor1_example():
    assert theta_kernel_verify(eisenstein(8, 6), 7).status == PROVED


def test_negative_controls():
    E4 = eisenstein(4, 6)
    v = theta_kernel_verify(E4, 7)
    assert v.status == REFUTED
    assert v.residue_at(parse_gauss("[1,1+i,1]")) == 1440 % 7 == 5
    assert v.witness == min((H for H, _ in v.failures), key=lambda H: (H.trace, H.m, *H.ab))
    s = mod_p_singular_verify(E4, 7)
    assert s.status == REFUTED and s.residue_at(parse_gauss("[1,0,1]")) == 14400 % 7 == 1


@pytest.mark.parametrize("T", [2, 3, 4, 5, 6])
def test_refutation_monotone(T):
    v = theta_kernel_verify(eisenstein(4, T), 7)
    assert v.status == REFUTED and str(v.witness) == "[1,-1-i,1]"


def test_soundness_proved_implies_data(gens):
    v = theta_kernel_verify(gens.rank8("H1"), 7)
    assert v.status == PROVED
    assert verify_zero_mod_p(theta_op(gens.rank8("H1")), 7, 16).status == PROVED


def test_insufficient_bound():
    with pytest.raises(InsufficientBound) as exc:
        theta_kernel_verify(eisenstein(12, 4), 11)
    assert exc.value.required == 6


def test_p_dividing_discriminant_rejected():
    with pytest.raises(ValueError):
        theta_kernel_verify(krieg_expansion(KriegParams(EIS, 6), 3), 3)


def test_downgrades():
    F = krieg_expansion(KriegParams(QuadField(-20), 8), 3)
    assert theta_kernel_verify(F, 7).status in (CHECKED, REFUTED)
    E8 = eisenstein(8, 6)
    untagged = FourierExpansion(GAUSS, 8, 6, dict(E8.coeffs), char_tag=None)
    assert theta_kernel_verify(untagged, 7).status == CHECKED
    assert verify_zero_mod_p(linear_combine([(7, E8.truncate(1))]), 7, 24).status == CHECKED


def test_non_integral_rejected():
    F = FourierExpansion(GAUSS, 4, 1, {HermIndex(0, 0, 0, 0): 1, HermIndex(1, 0, 0, 0): Fraction(1, 7)})
    with pytest.raises(NotPIntegral):
        verify_zero_mod_p(F, 7)


def test_singular_instances():
    v = mod_p_singular_verify(krieg_expansion(KriegParams(QuadField(-11), 6), 6), 11)
    assert v.status == CHECKED and v.checked_to == 6
    for p in (11, 19):
        assert singular_prefactor(p).ok


@pytest.mark.parametrize("d,p", [(-4, 7), (-4, 11), (-3, 11), (-20, 11)])
def test_starstar(d, p):
    K = QuadField(d)
    assert K.chi(p) == -1
    assert starstar_failures(K, p, 300) == []


def test_first_inert_prime():
    assert first_inert_prime(QuadField(-20)) == 11
    assert first_inert_prime(GAUSS) == 7


def test_registry_report(gens):
    ctx = CheckContext(6, external=False, _gens=gens)
    results = run_named_checks(["neg-kernel", "h2-enum"], ctx)
    assert results[0].passed and results[1].skipped
    text = format_report(results)
    assert "neg-kernel" in text and "SKIP" in text
    assert set(REGISTRY) >= {"mod7", "mod11cong-1", "mod11cong-2", "thetaconstantth", "cor1", "main1",
                             "modpsingular", "ex1"}
