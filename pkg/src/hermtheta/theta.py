"""Theta functions over O_K: lattice theta series and Gaussian theta constants.

Lattice theta series are built from exact short-vector lists (Fincke-Pohst
on the real transfer of the Hermitian form).  Theta constants are sums over
g in Z[i]^2 whose exponents live on a finer grid than Lambda_2; they are
accumulated as dense integer arrays and only their symmetric combinations
(psi_{4k}, F10) are converted back to Lambda_2 expansions.
"""

from __future__ import annotations

import hashlib
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from pathlib import Path

import numpy as np

from .lambda2 import HermIndex
from .number_theory import QuadField
from .qseries import FourierExpansion, linear_combine

log = logging.getLogger(__name__)


class GramError(ValueError):
    """Malformed Gram matrix data."""


class NotPositiveDefinite(ValueError):
    pass


class NotEven(ValueError):
    pass


@dataclass(frozen=True)
class GramMatrix:
    """Hermitian matrix over O_K; entries are (x, y) meaning x + y*omega."""

    field: QuadField
    entries: tuple[tuple[tuple[int, int], ...], ...]
    label: str = ""

    def __post_init__(self):
        r = len(self.entries)
        if r == 0 or any(len(row) != r for row in self.entries):
            raise GramError("Gram matrix must be square and nonempty")
        K = self.field
        for j in range(r):
            for l in range(r):
                if tuple(self.entries[j][l]) != K.conj(*self.entries[l][j]):
                    raise GramError(f"not Hermitian at ({j}, {l})")

    @property
    def rank(self) -> int:
        return len(self.entries)

    def real_gram(self) -> list[list[Fraction]]:
        """Matrix of (u, w) -> Re(u* G w) in the Z-basis e_j, omega e_j."""
        K, r = self.field, self.rank
        # coordinate order (x_0, y_0, x_1, y_1, ...)
        basis = [(j, u) for j in range(r) for u in ((1, 0), (0, 1))]
        out = []
        for j, u in basis:
            row = []
            for l, w in basis:
                z = K.mul(K.conj(*u), K.mul(tuple(self.entries[j][l]), w))
                row.append(_re(K, z))
            out.append(row)
        return out

    def is_even(self) -> bool:
        """v*Gv in 2Z for all v; for odd d_K an even diagonal is not enough."""
        if any(self.entries[j][j][1] or self.entries[j][j][0] % 2 for j in range(self.rank)):
            return False
        A = self.real_gram()
        return all(A[i][i] % 2 == 0 and all(a.denominator == 1 for a in A[i]) for i in range(len(A)))

    def cholesky(self) -> list[list[Fraction]]:
        """Exact q_ij with q(x) = sum_i q_ii (x_i + sum_{j>i} q_ij x_j)^2."""
        A = [row[:] for row in self.real_gram()]
        n = len(A)
        Q = [[Fraction(0)] * n for _ in range(n)]
        for i in range(n):
            for j in range(i, n):
                Q[i][j] = A[i][j]
        for i in range(n):
            if Q[i][i] <= 0:
                raise NotPositiveDefinite(f"leading minor {i + 1} is not positive")
            for j in range(i + 1, n):
                Q[j][i] = Q[i][j]
                Q[i][j] = Q[i][j] / Q[i][i]
            for k in range(i + 1, n):
                for l in range(k, n):
                    Q[k][l] -= Q[k][i] * Q[i][l]
        return Q

    def det(self) -> Fraction:
        """det(G), from det(real transfer) = det(G)^2 (D/4)^r."""
        Q = self.cholesky()
        real_det = math.prod(Q[i][i] for i in range(len(Q)))
        g2 = real_det / Fraction(self.field.D, 4) ** self.rank
        num, den = math.isqrt(g2.numerator), math.isqrt(g2.denominator)
        if Fraction(num * num, den * den) != g2:
            raise GramError("determinant is not a rational square")
        return Fraction(num, den)

    @property
    def unimodular(self) -> bool:
        return self.det() == 1

    def hermitian_value(self, u, w) -> tuple[int, int]:
        """u* G w in O_K for coordinate vectors u, w."""
        K = self.field
        X = Y = 0
        for j in range(self.rank):
            for l in range(self.rank):
                z = K.mul(K.conj(*u[j]), K.mul(tuple(self.entries[j][l]), tuple(w[l])))
                X += z[0]
                Y += z[1]
        return X, Y

    @classmethod
    def direct_sum(cls, *grams: "GramMatrix", label: str = "") -> "GramMatrix":
        K = grams[0].field
        r = sum(g.rank for g in grams)
        rows = [[(0, 0)] * r for _ in range(r)]
        off = 0
        for g in grams:
            for j in range(g.rank):
                for l in range(g.rank):
                    rows[off + j][off + l] = tuple(g.entries[j][l])
            off += g.rank
        return cls(K, tuple(tuple(row) for row in rows), label)


def _re(K: QuadField, z: tuple[int, int]) -> Fraction:
    x, y = z
    return Fraction(x) if K.d % 4 == 0 else x + Fraction(y, 2)


# Gram files --------------------------------------------------------------------

def dumps_gram(G: GramMatrix) -> str:
    lines = [f"disc {G.field.d}", f"rank {G.rank}", f"unimodular {int(G.unimodular)}", f"label {G.label}"]
    for row in G.entries:
        lines.append(" ".join(f"{x},{y}" for x, y in row))
    body = "\n".join(lines) + "\n"
    return body + f"checksum {hashlib.sha256(body.encode()).hexdigest()}\n"


def loads_gram(text: str) -> GramMatrix:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    header: dict[str, str] = {}
    try:
        for key in ("disc", "rank", "unimodular", "label"):
            k, _, v = lines.pop(0).partition(" ")
            if k != key:
                raise GramError(f"expected header '{key}', got '{k}'")
            header[key] = v.strip()
        r = int(header["rank"])
        rows = []
        for _ in range(r):
            parts = lines.pop(0).split()
            if len(parts) != r:
                raise GramError(f"row has {len(parts)} entries, expected {r}")
            rows.append(tuple(tuple(int(t) for t in p.split(",")) for p in parts))
    except (IndexError, ValueError) as exc:
        if isinstance(exc, GramError):
            raise
        raise GramError(f"malformed Gram file: {exc}") from None
    if any(len(e) != 2 for row in rows for e in row):
        raise GramError("entries must be 'x,y'")
    if lines:
        k, _, v = lines.pop(0).partition(" ")
        if k != "checksum":
            raise GramError(f"unexpected trailing line '{k}'")
        body = text[: text.index("checksum")]
        if hashlib.sha256(body.encode()).hexdigest() != v.strip():
            raise GramError("checksum mismatch")
    G = GramMatrix(QuadField(int(header["disc"])), tuple(rows), header["label"])
    if int(header["unimodular"]) != int(G.unimodular):
        raise GramError("unimodular flag disagrees with the determinant")
    return G


def load_gram(path: str | Path) -> GramMatrix:
    return loads_gram(Path(path).read_text())


# short vectors -------------------------------------------------------------------

_SLACK = 1e-7


def short_vectors(G: GramMatrix, B: int) -> dict[int, np.ndarray]:
    """Vectors v in O_K^r with (1/2) v*Gv = t for t <= B, bucketed by t.

    Each bucket is an int64 array of shape (count, r, 2) holding the (x, y)
    coordinates of every component, rows in lexicographic order.  Pruning
    uses the exact Cholesky data in floating point with bounds widened by a
    safety slack; every candidate is then kept or dropped by its exact
    integer norm, so rounding can only cost time, never vectors.
    """
    if not G.is_even():
        raise NotEven("diagonal entries must be even rational integers")
    Qx = G.cholesky()
    n = len(Qx)
    Q = [[float(v) for v in row] for row in Qx]
    A2 = np.array([[int(2 * v) for v in row] for row in G.real_gram()], dtype=np.int64)
    bound = 2.0 * B
    found: list[np.ndarray] = []
    x = [0] * n

    # real coordinate order is (x_0, y_0, x_1, y_1, ...)
    def rec(i: int, remaining: float):
        c = -sum(Q[i][j] * x[j] for j in range(i + 1, n))
        s = math.sqrt(max(remaining, 0.0) / Q[i][i]) + _SLACK
        lo, hi = math.ceil(c - s), math.floor(c + s)
        if i == 0:
            if lo <= hi:
                block = np.tile(np.array(x, dtype=np.int64), (hi - lo + 1, 1))
                block[:, 0] = np.arange(lo, hi + 1)
                found.append(block)
            return
        for xi in range(lo, hi + 1):
            x[i] = xi
            rec(i - 1, remaining - Q[i][i] * (xi - c) ** 2 + _SLACK)
        x[i] = 0

    rec(n - 1, bound + _SLACK)
    V = np.concatenate(found) if found else np.zeros((0, n), dtype=np.int64)
    norms2 = np.einsum("ij,jk,ik->i", V, A2, V)  # twice v*Gv
    keep = norms2 <= 4 * B
    V, norms2 = V[keep], norms2[keep]
    if np.any(norms2 % 4):
        raise NotEven("lattice vector with odd norm")
    half = norms2 // 4
    out = {}
    for t in range(B + 1):
        Vt = V[half == t]
        Vt = Vt[np.lexsort(Vt.T[::-1])] if len(Vt) else Vt
        out[t] = Vt.reshape(len(Vt), n // 2, 2)
    return out


def _coordinate_matrices(G: GramMatrix) -> tuple[np.ndarray, np.ndarray]:
    """Integer matrices of v -> conj(v) and v -> G v on (x, y) coordinates."""
    K, r = G.field, G.rank
    C = np.zeros((2 * r, 2 * r), dtype=np.int64)
    M = np.zeros((2 * r, 2 * r), dtype=np.int64)
    for l in range(r):
        for u_idx, u in enumerate(((1, 0), (0, 1))):
            col = 2 * l + u_idx
            cx, cy = K.conj(*u)
            C[2 * l, col], C[2 * l + 1, col] = cx, cy
            for j in range(r):
                z = K.mul(tuple(G.entries[j][l]), u)
                M[2 * j, col] += z[0]
                M[2 * j + 1, col] += z[1]
    return C, M


def theta_series(G: GramMatrix, T: int, chunk: int = 20_000_000) -> FourierExpansion:
    """Degree-2 theta series: a([m, c, n]) counts pairs (v1, v2) with half-norms m, n
    and sqrt(d_K) * (1/2) v1* G v2 = c."""
    K = G.field
    if not G.is_even():
        raise NotEven("theta series needs an even lattice")
    buckets = short_vectors(G, T)
    if K.d % 4 == 0:
        t_om, n_om = 0, K.D // 4
    else:
        t_om, n_om = 1, (1 - K.d) // 4
    C, M = _coordinate_matrices(G)
    r = G.rank
    flat = {t: v.reshape(len(v), 2 * r) for t, v in buckets.items() if len(v)}
    conj = {t: (v @ C.T).reshape(len(v), r, 2) for t, v in flat.items()}
    gv = {t: (v @ M.T).reshape(len(v), r, 2) for t, v in flat.items()}
    counts: dict[HermIndex, int] = {}
    for m in range(T + 1):
        for n in range(T + 1 - m):
            if m not in flat or n not in flat:
                continue
            wx, wy = gv[n][:, :, 0], gv[n][:, :, 1]
            step = max(1, chunk // len(wx))
            for s in range(0, len(conj[m]), step):
                cx, cy = conj[m][s:s + step, :, 0], conj[m][s:s + step, :, 1]
                # conj(v1) . (G v2) summed over components, in O_K coordinates
                yy = cy @ wy.T
                X = cx @ wx.T - n_om * yy
                Y = cx @ wy.T + cy @ wx.T + t_om * yy
                pairs, cnt = np.unique(np.stack([X.ravel(), Y.ravel()], axis=1), axis=0, return_counts=True)
                for (X0, Y0), c in zip(pairs.tolist(), cnt.tolist()):
                    H = HermIndex(m, *_sqrt_d_half(K, X0, Y0), n, K.d)
                    counts[H] = counts.get(H, 0) + c
    return FourierExpansion(K, G.rank, T, counts, char_tag=0,
                            meta={"source": f"theta {G.label}".strip()})


def _sqrt_d_half(K: QuadField, X: int, Y: int) -> tuple[int, int]:
    """Coordinates of sqrt(d_K) * (X + Y omega) / 2, which must lie in O_K."""
    if K.d % 4 == 0:
        return K.mul((0, 1), (X, Y))
    a, b = K.mul((-1, 2), (X, Y))
    if a % 2 or b % 2:
        raise NotEven("off-diagonal value outside the index lattice")
    return a // 2, b // 2


# theta constants -------------------------------------------------------------------

EVEN_CHARACTERISTICS: tuple[tuple[int, int, int, int], ...] = (
    (0, 0, 0, 0), (0, 0, 0, 1), (0, 0, 1, 0), (0, 0, 1, 1), (0, 1, 0, 0),
    (0, 1, 1, 0), (1, 0, 0, 0), (1, 0, 0, 1), (1, 1, 0, 0), (1, 1, 1, 1),
)

# kappa / (2 pi i) for the two admissible exponent normalizations
KAPPA_CANDIDATES = {"2*pi*i": 1, "pi*i": Fraction(1, 2)}


class GridSeries:
    """Dense integer q-series on the grid of indices H = key / scale.

    key = (M, N, P, Q) stands for the Hermitian matrix with diagonal M/scale,
    N/scale and off-diagonal (P + Qi)/scale.  Cells of trace > T are kept at 0.
    """

    def __init__(self, scale: int, T: int, dtype=np.int64, data=None):
        self.scale, self.T = scale, T
        self.L = scale * T + 1
        self.R = (scale * T) // 2
        self.W = 2 * self.R + 1
        self.data = np.zeros((self.L, self.L, self.W, self.W), dtype=dtype) if data is None else data
        Mi, Ni = np.meshgrid(np.arange(self.L), np.arange(self.L), indexing="ij")
        self._keep = (Mi + Ni <= scale * T)[:, :, None, None]

    @classmethod
    def from_terms(cls, scale, T, terms, dtype=np.int64) -> "GridSeries":
        g = cls(scale, T, dtype)
        for (M, N, P, Q), c in terms.items():
            g.data[M, N, P + g.R, Q + g.R] += c
        return g

    def copy(self) -> "GridSeries":
        return GridSeries(self.scale, self.T, self.data.dtype, self.data.copy())

    def mul_terms(self, terms: dict) -> "GridSeries":
        """Product with a sparse series given as {key: coefficient}."""
        out = np.zeros_like(self.data)
        A, L, W = self.data, self.L, self.W
        for (M, N, P, Q), c in terms.items():
            if M >= L or N >= L or abs(P) >= W or abs(Q) >= W:
                continue
            ps = slice(P, W) if P >= 0 else slice(0, W + P)
            pa = slice(0, W - P) if P >= 0 else slice(-P, W)
            qs = slice(Q, W) if Q >= 0 else slice(0, W + Q)
            qa = slice(0, W - Q) if Q >= 0 else slice(-Q, W)
            out[M:, N:, ps, qs] += c * A[: L - M, : L - N, pa, qa]
        out *= self._keep
        return GridSeries(self.scale, self.T, self.data.dtype, out)

    def nonzero(self) -> dict[tuple[int, int, int, int], int]:
        idx = np.argwhere(self.data != 0)
        return {(int(M), int(N), int(P) - self.R, int(Q) - self.R): self.data[M, N, P, Q].item()
                for M, N, P, Q in idx}

    def to_expansion(self, weight: int, divisor: int = 1, **kw) -> FourierExpansion:
        """Convert to a Gaussian-field expansion; every nonzero key must lie in Lambda_2."""
        S = self.scale
        coeffs = {}
        for (M, N, P, Q), c in self.nonzero().items():
            # h12 = (P + Qi)/S = (a + bi)/2
            if M % S or N % S or (2 * P) % S or (2 * Q) % S:
                raise ValueError(f"support leaves Lambda_2 at scaled key {(M, N, P, Q)}")
            coeffs[HermIndex.gauss(M // S, 2 * P // S, 2 * Q // S, N // S)] = Fraction(int(c), divisor)
        return FourierExpansion(QuadField(-4), weight, self.T, coeffs, **kw)


def _theta_terms(char, T: int, kappa: Fraction, box_pad: int = 0):
    """Sparse terms {key: phase} of theta_m on the grid of scale 4/kappa.

    With u_j = 2 g_j + (1+i) a_j the index is H = kappa * conj(u)^t u / 8 and
    the scaled key is conj(u_j) u_l / 2.  The phase is exp(kappa * 2 pi i * Re((1+i)/2 * b.v))
    with v = u/2, a power of zeta = exp(pi i kappa).
    """
    a1, a2, b1, b2 = char
    # trace = kappa * (|u1|^2 + |u2|^2) / 8 <= T
    lim = 8 * T / kappa
    R = math.isqrt(int(lim)) // 2 + 2 + box_pad
    out: dict = {}
    coords = [(s, t) for s in range(-R, R + 1) for t in range(-R, R + 1)]

    def u_of(s, t, a):
        return 2 * s + a, 2 * t + a

    for s1, t1 in coords:
        u1 = u_of(s1, t1, a1)
        n1 = u1[0] ** 2 + u1[1] ** 2
        if n1 > lim:
            continue
        for s2, t2 in coords:
            u2 = u_of(s2, t2, a2)
            n2 = u2[0] ** 2 + u2[1] ** 2
            if n1 + n2 > lim:
                continue
            # conj(u1) * u2
            re = u1[0] * u2[0] + u1[1] * u2[1]
            im = u1[0] * u2[1] - u1[1] * u2[0]
            key = (n1 // 2, n2 // 2, re // 2, im // 2)
            # Re((1+i)/2 * v) = (Re v - Im v)/2 = (u_re - u_im)/4 ; phase exponent counts half-turns
            half_turns = b1 * (u1[0] - u1[1]) // 2 + b2 * (u2[0] - u2[1]) // 2
            out[key] = out.get(key, 0) + _zeta_power(kappa, half_turns)
    return {k: v for k, v in out.items() if v != 0}


def _zeta_power(kappa: Fraction, e: int):
    """exp(pi i kappa e) for kappa in {1, 1/2}."""
    if kappa == 1:
        return -1 if e % 2 else 1
    return (1, 1j, -1, -1j)[e % 4]


def theta_constant_terms(char, T: int, kappa: Fraction = Fraction(1)) -> dict:
    if char not in EVEN_CHARACTERISTICS:
        raise ValueError(f"{char} is not an even characteristic")
    terms = _theta_terms(char, T, kappa)
    # truncation self-check: a wider box must not add terms
    if _theta_terms(char, T, kappa, box_pad=2) != terms:
        raise AssertionError("theta constant box truncation is too small")
    return terms


def _scale_for(kappa) -> int:
    return int(4 / Fraction(kappa))


def theta_constant(char, T: int, kappa: Fraction = Fraction(1)) -> GridSeries:
    """theta_m up to trace T, as a grid series (its support is finer than Lambda_2)."""
    terms = theta_constant_terms(char, T, kappa)
    dtype = np.int64 if kappa == 1 else np.complex128
    return GridSeries.from_terms(_scale_for(kappa), T, terms, dtype)


def _power_sum(kk: int, T: int, kappa=Fraction(1)) -> GridSeries:
    """sum over even characteristics of theta_m^kk, as a grid series."""
    total = None
    dtype = np.int64 if kappa == 1 else np.complex128
    for char in EVEN_CHARACTERISTICS:
        terms = theta_constant_terms(char, T, kappa)
        acc = GridSeries.from_terms(_scale_for(kappa), T, terms, dtype)
        for _ in range(kk - 1):
            acc = acc.mul_terms(terms)
        if kappa == 1 and char[2:] == (0, 0):
            # b = 0 powers have nonnegative terms dominating every other
            # characteristic with the same a; they bound all partial sums
            if int(np.abs(acc.data).max()) >= 2 ** 62:
                raise OverflowError("theta constant power exceeds int64 range")
        total = acc if total is None else GridSeries(acc.scale, T, acc.data.dtype, total.data + acc.data)
    return total


def calibrate_kappa(T: int = 1) -> Fraction:
    """Pick the exponent normalization for which psi_4 lands in Lambda_2 and equals E4."""
    from .krieg import eisenstein

    E4 = eisenstein(4, T)
    good = []
    for name, kappa in KAPPA_CANDIDATES.items():
        g = _power_sum(4, T, Fraction(kappa))
        data = g.data
        if np.iscomplexobj(data):
            if np.abs(data.imag).max() > 0.5:
                log.info("kappa=%s rejected: non-real coefficients", name)
                continue
            data = np.rint(data.real).astype(np.int64)
            g = GridSeries(g.scale, T, np.int64, data)
        try:
            psi4 = g.to_expansion(4, divisor=4)
        except ValueError as exc:
            log.info("kappa=%s rejected: %s", name, exc)
            continue
        if psi4 == E4:
            good.append(Fraction(kappa))
        else:
            log.info("kappa=%s rejected: psi_4 != E_4", name)
    if len(good) != 1:
        raise AssertionError(f"theta constant calibration is not unique: {good}")
    log.info("theta constant normalization kappa = %s * 2 pi i", good[0])
    return good[0]


@lru_cache(maxsize=None)
def kappa() -> Fraction:
    return calibrate_kappa()


@lru_cache(maxsize=8)
def psi_series(kk: int, T: int) -> FourierExpansion:
    """psi_kk = (1/4) sum over the ten even characteristics of theta_m^kk."""
    if kk <= 0 or kk % 4:
        raise ValueError("psi_k needs k a positive multiple of 4")
    g = _power_sum(kk, T, kappa())
    return g.to_expansion(kk, divisor=4, char_tag=kk // 2, meta={"source": f"psi_{kk}", "kappa": str(kappa())})


@lru_cache(maxsize=8)
def f10_series(T: int) -> FourierExpansion:
    """F10 = 2^-12 prod over even characteristics of theta_m."""
    k = kappa()
    S = _scale_for(k)
    chars = list(EVEN_CHARACTERISTICS)
    acc = GridSeries.from_terms(S, T, theta_constant_terms(chars[0], T, k))
    bound = GridSeries.from_terms(S, T, {key: abs(v) for key, v in theta_constant_terms(chars[0], T, k).items()},
                                  np.float64)
    for char in chars[1:]:
        terms = theta_constant_terms(char, T, k)
        acc = acc.mul_terms(terms)
        bound = bound.mul_terms({key: abs(v) for key, v in terms.items()})
    if bound.data.max() >= 2.0 ** 62:
        raise OverflowError("theta constant product exceeds int64 range")
    return acc.to_expansion(10, divisor=2 ** 12, char_tag=5, meta={"source": "F10", "kappa": str(k)})


def psi_linear(terms, T):
    return linear_combine([(c, psi_series(k, T)) for c, k in terms])
