"""Independent brute-force oracles shared by the unit and acceptance tests."""

from __future__ import annotations

import itertools
from fractions import Fraction

from hermtheta.lambda2 import HermIndex
from hermtheta.number_theory import divisors


def brute_psd(K, T):
    out = set()
    R = 2 * T + 2
    for m in range(T + 1):
        for n in range(T + 1 - m):
            for x in range(-R, R + 1):
                for y in range(-R, R + 1):
                    if K.D * m * n - K.norm(x, y) >= 0:
                        out.add(HermIndex(m, x, y, n, K.d))
    return out


def herm(K, u, w, G):
    X = Y = 0
    for j, l in itertools.product(range(len(G)), repeat=2):
        z = K.mul(K.conj(*u[j]), K.mul(G[j][l], w[l]))
        X, Y = X + z[0], Y + z[1]
    return X, Y


def brute_theta(K, G, T, R=4):
    """Double loop over pairs of lattice vectors, straight from the definition."""
    r = len(G)
    vecs = []
    for coords in itertools.product(range(-R, R + 1), repeat=2 * r):
        v = [tuple(coords[2 * j:2 * j + 2]) for j in range(r)]
        X, _ = herm(K, v, v, G)
        if X <= 2 * T:
            assert max(abs(c) for c in coords) < R, "search box too small"
            vecs.append((X // 2, v))
    # sqrt(d_K) as an element of O_K
    root = (0, 2) if K.d == -4 else (-1, 2)
    out = {}
    for m, v1 in vecs:
        for n, v2 in vecs:
            if m + n > T:
                continue
            x, y = K.mul(root, herm(K, v1, v2, G))
            assert x % 2 == 0 and y % 2 == 0
            H = HermIndex(m, x // 2, y // 2, n, K.d)
            out[H] = out.get(H, 0) + 1
    return out


def chi4(n: int) -> int:
    return (0, 1, 0, -1)[n % 4]


def gk_gauss_by_hand(s: int, N: int) -> Fraction:
    """G_{Q(i)}(s; N) from the two coprime splittings 1*4 and 4*1."""
    num = sum((chi4(d) + chi4(-(N // d))) * d ** s for d in divisors(N))
    return Fraction(num, 1 + chi4(-N))


# small Gram matrices as nested lists of (x, y) entries
GRAMS = {
    "gauss-1": (-4, [[(2, 0)]]),
    "gauss-2a": (-4, [[(2, 0), (1, 1)], [(1, -1), (2, 0)]]),
    "gauss-2b": (-4, [[(4, 0), (1, 0)], [(1, 0), (2, 0)]]),
    "eis-1": (-3, [[(2, 0)]]),
    "eis-2": (-3, [[(2, 0), (0, 2)], [(2, -2), (4, 0)]]),
}
