"""Explicit Fourier coefficients of Krieg's forms F_{k,K}.

For H > 0::

    a(H) = 4k(k-1) / (B_k B_{k-1,chi_K}) * sum_{d | eps(H)} d^(k-1) G_K(k-2; D_K det(H) / d^2)

for rank one ``-(2k/B_k) sum_{d | eps(H)} d^(k-1)``, and 1 at H = 0.  The
normalized divisor sum G_K(s; N) is available in its defining double-sum
form (:func:`gk_direct`) and in the factorized form over ramified and
unramified primes (:func:`gk_product`); the two are tested against each other.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .lambda2 import HermIndex, enumerate_psd, epsilon, ndet, rank
from .number_theory import (
    QuadField,
    bernoulli,
    chi_q_factor,
    coprime_splittings,
    divisors,
    factorize,
    gen_bernoulli,
    psi_char,
)
from .qseries import FourierExpansion


class VanishingNormalizer(ArithmeticError):
    """a_D(N) = 0 while the double sum defining G_K(s; N) is nonzero."""


def a_D(K: QuadField, N: int) -> int:
    """prod over q | D_K of (1 + chi_q(-N))."""
    out = 1
    for q in factorize(K.D):
        out *= 1 + chi_q_factor(K, q)(-N)
    return out


def _normalize(K: QuadField, s: int, N: int, numerator: int) -> Fraction:
    a = a_D(K, N)
    if a == 0:
        if numerator:
            raise VanishingNormalizer(f"a_D({N}) = 0 but the divisor sum is {numerator} (d_K={K.d}, s={s})")
        return Fraction(0)
    return Fraction(numerator, a)


def gk_numerator_direct(K: QuadField, s: int, N: int) -> int:
    total = 0
    for m, n in coprime_splittings(K):
        pm, pn = psi_char(K, m), psi_char(K, n)
        for d in divisors(N):
            total += pm(-(N // d)) * pn(d) * d ** s
    return total


def gk_direct(K: QuadField, s: int, N: int) -> Fraction:
    if N <= 0:
        raise ValueError("N must be positive")
    return _normalize(K, s, N, gk_numerator_direct(K, s, N))


def gk_numerator_product(K: QuadField, s: int, N: int) -> int:
    ramified = set(factorize(K.D))
    beta = factorize(N)
    N2 = 1
    unramified_factor = 1
    for q, b in beta.items():
        if q not in ramified:
            N2 *= q ** b
            chi = K.chi(q)
            unramified_factor *= sum(chi ** t * q ** (s * t) for t in range(b + 1))
    inner = 0
    for m, n in coprime_splittings(K):
        pm, pn = psi_char(K, m), psi_char(K, n)
        term = pm(-1) * pm(N2)
        for q, b in beta.items():
            if q not in ramified:
                continue
            if m % q == 0:
                term *= pn(q) ** b * q ** (s * b)
            else:
                term *= pm(q) ** b
        inner += term
    return unramified_factor * inner


def gk_product(K: QuadField, s: int, N: int) -> Fraction:
    if N <= 0:
        raise ValueError("N must be positive")
    return _normalize(K, s, N, gk_numerator_product(K, s, N))


@dataclass(frozen=True)
class KriegParams:
    K: QuadField
    k: int

    def __post_init__(self):
        if self.k % 2 or self.k < 4:
            raise ValueError(f"weight must be even and >= 4, got {self.k}")

    @property
    def in_theorem_range(self) -> bool:
        return self.k > 4 and self.k % self.K.w == 0


def prefactor(K: QuadField, k: int) -> Fraction:
    """4k(k-1) / (B_k B_{k-1,chi_K}), the rank-2 leading factor."""
    return Fraction(4 * k * (k - 1)) / (bernoulli(k) * gen_bernoulli(k - 1, K.chi))


def rank1_factor(k: int) -> Fraction:
    return Fraction(-2 * k) / bernoulli(k)


@lru_cache(maxsize=None)
def _gk(d: int, s: int, N: int) -> Fraction:
    return gk_product(QuadField(d), s, N)


def krieg_coeff(P: KriegParams, H: HermIndex) -> Fraction:
    K, k = P.K, P.k
    r = rank(H)
    if r == 0:
        return Fraction(1)
    eps = epsilon(H)
    if r == 1:
        return rank1_factor(k) * sum(d ** (k - 1) for d in divisors(eps))
    N = ndet(H)
    total = Fraction(0)
    for d in divisors(eps):
        q, rem = divmod(N, d * d)
        assert rem == 0, (H, d)
        total += d ** (k - 1) * _gk(K.d, k - 2, q)
    return prefactor(K, k) * total


def krieg_expansion(P: KriegParams, T: int) -> FourierExpansion:
    coeffs = {H: krieg_coeff(P, H) for H in enumerate_psd(P.K, T)}
    return FourierExpansion(P.K, P.k, T, coeffs, char_tag=P.k // 2,
                            meta={"in_theorem_range": P.in_theorem_range, "source": f"krieg k={P.k}"})


def eisenstein(k: int, T: int, K: QuadField | None = None) -> FourierExpansion:
    """F_{k,K} (the Eisenstein series when h_K = 1); Gaussian field by default."""
    return krieg_expansion(KriegParams(K or QuadField(-4), k), T)


def elliptic_eisenstein_coeff(k: int, t: int) -> Fraction:
    """Coefficient of q^t in the normalized elliptic Eisenstein series of weight k."""
    if t == 0:
        return Fraction(1)
    return rank1_factor(k) * sum(d ** (k - 1) for d in divisors(t))
