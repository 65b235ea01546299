"""Index lattice of half-integral Hermitian 2x2 matrices.

An index H = (m, h12; conj(h12), n) is stored through its diagonal and the
integral element c = sqrt(d_K) * h12 of O_K, written x + y*omega.  For the
Gaussian field the familiar notation [m, a+bi, n] has h12 = (a+bi)/2, so
c = i(a+bi) = -b + a*i, i.e. x = -b and y = a.
"""

from __future__ import annotations

from functools import lru_cache
from math import gcd, isqrt
from typing import NamedTuple

from .number_theory import QuadField


class HermIndex(NamedTuple):
    m: int
    x: int
    y: int
    n: int
    d: int = -4

    @classmethod
    def gauss(cls, m: int, a: int, b: int, n: int) -> "HermIndex":
        """[m, a+bi, n] over Q(i)."""
        return cls(m, -b, a, n, -4)

    @property
    def field(self) -> QuadField:
        return _field(self.d)

    @property
    def trace(self) -> int:
        return self.m + self.n

    @property
    def ab(self) -> tuple[int, int]:
        """(a, b) in [m, a+bi, n]; Gaussian field only."""
        if self.d != -4:
            raise ValueError("the [m, a+bi, n] coordinates exist only over Q(i)")
        return self.y, -self.x

    def __add__(self, other):  # type: ignore[override]
        if not isinstance(other, HermIndex):
            return NotImplemented
        if other.d != self.d:
            raise ValueError("indices over different fields")
        return HermIndex(self.m + other.m, self.x + other.x, self.y + other.y, self.n + other.n, self.d)

    def __sub__(self, other):
        if other.d != self.d:
            raise ValueError("indices over different fields")
        return HermIndex(self.m - other.m, self.x - other.x, self.y - other.y, self.n - other.n, self.d)

    def scale(self, ell: int) -> "HermIndex":
        return HermIndex(ell * self.m, ell * self.x, ell * self.y, ell * self.n, self.d)

    def conj(self) -> "HermIndex":
        """Transpose (= complex conjugate) of the index."""
        cx, cy = self.field.conj(self.x, self.y)
        return HermIndex(self.m, -cx, -cy, self.n, self.d)

    def __str__(self) -> str:
        if self.d == -4:
            a, b = self.ab
            return f"[{self.m},{_gauss_str(a, b)},{self.n}]"
        return f"[{self.m},({self.x},{self.y}),{self.n}]"

    def __repr__(self) -> str:
        if self.d == -4:
            return f"HermIndex{self}"
        return f"HermIndex(m={self.m}, x={self.x}, y={self.y}, n={self.n}, d={self.d})"


def _gauss_str(a: int, b: int) -> str:
    if b == 0:
        return str(a)
    bi = {1: "i", -1: "-i"}.get(b, f"{b}i")
    if a == 0:
        return bi
    return f"{a}{'+' if b > 0 else ''}{bi}"


def parse_gauss(text: str) -> HermIndex:
    """Parse the notation ``[m, a+bi, n]``."""
    body = text.strip().strip("[]")
    m, c, n = (t.strip() for t in body.split(","))
    c = c.replace(" ", "")
    a = b = 0
    if "i" in c:
        # split the imaginary term off the real part
        cut = max(c.rfind("+", 1), c.rfind("-", 1))
        real, imag = (c[:cut], c[cut:]) if cut > 0 else ("0", c)
        imag = imag.rstrip("i")
        b = int(imag) if imag not in ("", "+", "-") else (-1 if imag == "-" else 1)
        a = int(real)
    else:
        a = int(c)
    return HermIndex.gauss(int(m), a, b, int(n))


@lru_cache(maxsize=None)
def _field(d: int) -> QuadField:
    return QuadField(d)


def zero(K: QuadField) -> HermIndex:
    return HermIndex(0, 0, 0, 0, K.d)


def ndet(H: HermIndex) -> int:
    """D_K * det(H), an integer (equals 4mn - a^2 - b^2 over Q(i))."""
    K = _field(H.d)
    return K.D * H.m * H.n - K.norm(H.x, H.y)


def is_psd(H: HermIndex) -> bool:
    return H.m >= 0 and H.n >= 0 and ndet(H) >= 0


def rank(H: HermIndex) -> int:
    if H.m == H.n == H.x == H.y == 0:
        return 0
    return 1 if ndet(H) == 0 else 2


def epsilon(H: HermIndex) -> int:
    """Largest ell with H/ell still in Lambda_2."""
    g = gcd(gcd(H.m, H.n), gcd(H.x, H.y))
    if g == 0:
        raise ValueError("epsilon is undefined at the zero index")
    return g


def in_lambda2(m, x, y, n) -> bool:
    """Membership for rational coordinates (diagonal integral, c in O_K)."""
    return all(getattr(v, "denominator", 1) == 1 for v in (m, x, y, n))


def lex_key(H: HermIndex) -> tuple[int, int, int, int]:
    """Sort key of the lexicographic order: (tr, m, a, b) over Q(i), (tr, m, x, y) otherwise."""
    if H.d == -4:
        return H.m + H.n, H.m, H.y, -H.x
    return H.m + H.n, H.m, H.x, H.y


def lex_cmp(H: HermIndex, H2: HermIndex) -> int:
    """-1, 0, 1 as H precedes, equals or follows H2."""
    if H.d != H2.d:
        raise ValueError("cannot compare indices over different fields")
    k1, k2 = lex_key(H), lex_key(H2)
    return (k1 > k2) - (k1 < k2)


def offdiagonals(K: QuadField, bound: int) -> list[tuple[int, int]]:
    """All (x, y) with Nm(x + y*omega) <= bound."""
    if bound < 0:
        return []
    # Nm >= (3/4) y^2 in the odd case and >= y^2 otherwise
    ymax = isqrt(4 * bound // 3) + 1
    out = []
    for y in range(-ymax, ymax + 1):
        for x in range(-isqrt(bound) - abs(y) - 1, isqrt(bound) + abs(y) + 2):
            if K.norm(x, y) <= bound:
                out.append((x, y))
    return out


@lru_cache(maxsize=64)
def _enumerate(d: int, T: int) -> tuple[HermIndex, ...]:
    K = _field(d)
    out = []
    for m in range(T + 1):
        for n in range(T + 1 - m):
            for x, y in offdiagonals(K, K.D * m * n):
                out.append(HermIndex(m, x, y, n, d))
    out.sort(key=lex_key)
    return tuple(out)


def enumerate_psd(K: QuadField, T: int) -> list[HermIndex]:
    """All psd indices of trace <= T, in lexicographic order."""
    return list(_enumerate(K.d, T))


def decompose_pairs(H: HermIndex) -> list[tuple[HermIndex, HermIndex]]:
    """All ordered pairs of psd indices summing to H."""
    K = _field(H.d)
    out = []
    for m1 in range(H.m + 1):
        for n1 in range(H.n + 1):
            for x1, y1 in offdiagonals(K, K.D * m1 * n1):
                H1 = HermIndex(m1, x1, y1, n1, H.d)
                H2 = H - H1
                if is_psd(H2):
                    out.append((H1, H2))
    return out


class SiegelIndex(NamedTuple):
    """[m, r, n] meaning the matrix (m, r/2; r/2, n)."""

    m: int
    r: int
    n: int

    @property
    def disc(self) -> int:
        return 4 * self.m * self.n - self.r * self.r

    def is_psd(self) -> bool:
        return self.m >= 0 and self.n >= 0 and self.disc >= 0

    def __str__(self) -> str:
        return f"[{self.m},{self.r},{self.n}]"


def _gauss_moves(H: HermIndex):
    """Neighbours of H under generators of GL_2(Z[i]) acting by U* H U."""
    m, n = H.m, H.n
    a, b = H.ab
    h2 = complex(a, b)  # twice the off-diagonal entry
    yield HermIndex.gauss(n, a, -b, m)  # swap the two basis vectors
    for u in (1j, -1):
        v = u.conjugate() * h2
        yield HermIndex.gauss(m, int(v.real), int(v.imag), n)
    for u in (1, -1, 1j, -1j):
        v = h2 + 2 * m * u
        n2 = n + m + int((u.conjugate() * h2).real)
        yield HermIndex.gauss(m, int(v.real), int(v.imag), n2)


@lru_cache(maxsize=8)
def gauss_classes(T: int) -> dict[HermIndex, HermIndex]:
    """Map each psd index of trace <= T over Q(i) to the lex-least member of
    its GL_2(Z[i])-class within trace <= T.

    Reduction steps never raise the trace, so classes are connected inside
    the trace-T window.
    """
    K = _field(-4)
    nodes = enumerate_psd(K, T)
    parent = {H: H for H in nodes}

    def find(H):
        while parent[H] != H:
            parent[H] = parent[parent[H]]
            H = parent[H]
        return H

    for H in nodes:
        for H2 in _gauss_moves(H):
            if H2.trace <= T and H2 in parent:
                r1, r2 = find(H), find(H2)
                if r1 != r2:
                    if lex_key(r2) < lex_key(r1):
                        r1, r2 = r2, r1
                    parent[r2] = r1
    return {H: find(H) for H in nodes}
