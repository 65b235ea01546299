"""Scalar arithmetic behind the Eisenstein coefficients.

Imaginary quadratic fields, real Dirichlet characters (Kronecker symbols),
Bernoulli and generalized Bernoulli numbers, and class numbers.  Everything
is exact: rationals are :class:`fractions.Fraction` in lowest terms.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb, gcd, isqrt


class NotPIntegral(ArithmeticError):
    """A rational with denominator divisible by p was reduced mod p."""


def factorize(n: int) -> dict[int, int]:
    """Trial-division factorization of ``|n|`` (small inputs only)."""
    n = abs(n)
    out: dict[int, int] = {}
    q = 2
    while q * q <= n:
        while n % q == 0:
            out[q] = out.get(q, 0) + 1
            n //= q
        q += 1 if q == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    return factorize(n) == {n: 1}


def divisors(n: int) -> list[int]:
    n = abs(n)
    small = [d for d in range(1, isqrt(n) + 1) if n % d == 0]
    return sorted(set(small + [n // d for d in small]))


def is_squarefree(n: int) -> bool:
    return all(e == 1 for e in factorize(n).values())


def is_fundamental(d: int) -> bool:
    """True for fundamental discriminants (any sign, excluding 1)."""
    if d in (0, 1):
        return False
    if d % 4 == 1:
        return is_squarefree(d)
    if d % 4 == 0:
        m = d // 4
        return m % 4 in (2, 3) and is_squarefree(m)
    return False


def kronecker(a: int, n: int) -> int:
    """The Kronecker symbol (a/n)."""
    if n == 0:
        return 1 if a in (1, -1) else 0
    result = 1
    if n < 0:
        n = -n
        if a < 0:
            result = -result
    v = 0
    while n % 2 == 0:
        n //= 2
        v += 1
    if v:
        if a % 2 == 0:
            return 0
        if v % 2 and a % 8 in (3, 5):
            result = -result
    # Jacobi symbol (a/n) for odd n > 0
    a %= n
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def mod_p(x: Fraction | int, p: int) -> int:
    """Residue of a p-integral rational in ``range(p)``."""
    x = Fraction(x)
    if x.denominator % p == 0:
        raise NotPIntegral(f"{x} is not {p}-integral")
    return x.numerator * pow(x.denominator, -1, p) % p


def p_valuation(x: Fraction | int, p: int) -> float:
    x = Fraction(x)
    if x == 0:
        return float("inf")
    v = 0
    num, den = x.numerator, x.denominator
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


@dataclass(frozen=True)
class DirichletChar:
    """The real character n -> (disc/n).

    ``disc`` is 1 (trivial character) or a product of prime discriminants.
    """

    disc: int

    @property
    def modulus(self) -> int:
        return abs(self.disc)

    def __call__(self, n: int) -> int:
        if self.disc == 1:
            return 1
        return kronecker(self.disc, n)

    def __mul__(self, other: "DirichletChar") -> "DirichletChar":
        return DirichletChar(self.disc * other.disc)


TRIVIAL_CHAR = DirichletChar(1)


@dataclass(frozen=True)
class QuadField:
    """Imaginary quadratic field of (negative, fundamental) discriminant ``d``.

    Ring of integers has basis {1, omega} with omega = sqrt(d)/2 when
    d = 0 mod 4 and omega = (1 + sqrt(d))/2 when d = 1 mod 4.
    """

    d: int
    _h: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.d >= 0 or not is_fundamental(self.d):
            raise ValueError(f"{self.d} is not a negative fundamental discriminant")
        object.__setattr__(self, "_h", class_number(self.d))

    @property
    def D(self) -> int:
        return -self.d

    @property
    def h(self) -> int:
        return self._h

    @property
    def w(self) -> int:
        return {-3: 6, -4: 4}.get(self.d, 2)

    @property
    def chi(self) -> DirichletChar:
        return DirichletChar(self.d)

    def norm(self, x: int, y: int) -> int:
        """Norm of x + y*omega."""
        if self.d % 4 == 0:
            return x * x + (self.D // 4) * y * y
        return x * x + x * y + ((1 - self.d) // 4) * y * y

    def conj(self, x: int, y: int) -> tuple[int, int]:
        """Coordinates of the conjugate of x + y*omega."""
        if self.d % 4 == 0:
            return x, -y
        return x + y, -y

    def mul(self, u: tuple[int, int], v: tuple[int, int]) -> tuple[int, int]:
        """Product in O_K, coordinates over {1, omega}."""
        (a, b), (c, e) = u, v
        # omega^2 = t*omega - n with t the trace and n the norm of omega
        if self.d % 4 == 0:
            t, n = 0, self.D // 4
        else:
            t, n = 1, (1 - self.d) // 4
        return a * c - n * b * e, a * e + b * c + t * b * e

    def units(self) -> list[tuple[int, int]]:
        return [(x, y) for x in range(-2, 3) for y in range(-2, 3) if self.norm(x, y) == 1]

    def __str__(self) -> str:
        return {-4: "Q(i)", -3: "Q(sqrt(3) i)"}.get(self.d, f"Q(sqrt({self.d}))")


def prime_discriminants(d: int) -> dict[int, int]:
    """Split a fundamental discriminant into prime discriminants, keyed by prime."""
    out: dict[int, int] = {}
    odd = d
    while odd % 2 == 0:
        odd //= 2
    for q in factorize(odd):
        out[q] = q if q % 4 == 1 else -q
    if d % 2 == 0:
        rest = 1
        for v in out.values():
            rest *= v
        out[2] = d // rest
        if out[2] not in (-4, 8, -8):
            raise ValueError(f"{d} is not fundamental")
    return out


def chi_q_factor(K: QuadField, q: int) -> DirichletChar:
    """The q-component of chi_K for a prime q | D_K."""
    parts = prime_discriminants(K.d)
    if q not in parts:
        raise ValueError(f"{q} does not divide D_K = {K.D}")
    return DirichletChar(parts[q])


def coprime_splittings(K: QuadField) -> list[tuple[int, int]]:
    """All ordered pairs (m, n) with m*n = D_K and gcd(m, n) = 1."""
    return [(m, K.D // m) for m in divisors(K.D) if gcd(m, K.D // m) == 1]


def psi_char(K: QuadField, m: int) -> DirichletChar:
    if m <= 0 or K.D % m or gcd(m, K.D // m) != 1:
        raise ValueError(f"{m} * {K.D // m if m and K.D % m == 0 else '?'} is not a coprime splitting of {K.D}")
    disc = 1
    for q, dq in prime_discriminants(K.d).items():
        if m % q == 0:
            disc *= dq
    return DirichletChar(disc)


def psi_m(K: QuadField, m: int, n: int) -> int:
    return psi_char(K, m)(n)


@lru_cache(maxsize=None)
def _bernoulli_table(n: int) -> tuple[Fraction, ...]:
    B = [Fraction(1)]
    for k in range(1, n + 1):
        B.append(-sum(comb(k + 1, j) * B[j] for j in range(k)) / (k + 1))
    return tuple(B)


def bernoulli(n: int) -> Fraction:
    """B_n with B_1 = -1/2."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    if n > 1 and n % 2:
        return Fraction(0)
    return _bernoulli_table(n)[n]


def bernoulli_poly(n: int, x: Fraction | int) -> Fraction:
    x = Fraction(x)
    return sum((comb(n, k) * bernoulli(k) * x ** (n - k) for k in range(n + 1)), Fraction(0))


@lru_cache(maxsize=None)
def gen_bernoulli(n: int, chi: DirichletChar) -> Fraction:
    """B_{n,chi} = f^(n-1) * sum_{a=1}^{f} chi(a) B_n(a/f)."""
    f = chi.modulus
    total = sum((chi(a) * bernoulli_poly(n, Fraction(a, f)) for a in range(1, f + 1)), Fraction(0))
    return f ** (n - 1) * total


@lru_cache(maxsize=None)
def class_number(d: int) -> int:
    """Count reduced primitive forms (a, b, c) of discriminant d < 0."""
    if d >= 0 or not is_fundamental(d):
        raise ValueError(f"{d} is not a negative fundamental discriminant")
    h = 0
    a = 1
    while 3 * a * a <= -d:
        for b in range(-a + 1, a + 1):
            if (b * b - d) % (4 * a):
                continue
            c = (b * b - d) // (4 * a)
            if c < a or (c == a and b < 0):
                continue
            if gcd(gcd(a, abs(b)), c) == 1:
                h += 1
        a += 1
    return h


GAUSS = QuadField(-4)
EISENSTEIN = QuadField(-3)
