"""Truncated Fourier expansions of degree-2 Hermitian modular forms.

A :class:`FourierExpansion` is a finite map from psd indices of trace at
most ``trace_bound`` to exact rationals (``int`` or ``Fraction``), together
with weight/character metadata.  Expansions are immutable by convention;
every operation returns a new object.
"""

from __future__ import annotations

import io
from collections import defaultdict
from dataclasses import dataclass, field, replace
from fractions import Fraction
from math import lcm
from typing import Iterable, Mapping

from .lambda2 import HermIndex, SiegelIndex, enumerate_psd, is_psd, lex_key, ndet, rank, zero
from .number_theory import NotPIntegral, QuadField, mod_p

FORMAT_VERSION = 1


def _norm(c):
    if isinstance(c, Fraction) and c.denominator == 1:
        return c.numerator
    return c


@dataclass(frozen=True)
class Infinity:
    """ord_p of an expansion vanishing mod p up to ``bound``."""

    bound: int

    def __str__(self) -> str:
        return f"(oo) [checked to trace {self.bound}]"


@dataclass(frozen=True, eq=False)
class FourierExpansion:
    field: QuadField
    weight: int
    trace_bound: int
    coeffs: Mapping[HermIndex, int | Fraction]
    char_tag: int | None = 0
    symmetric: bool = True
    # provenance flags: in_theorem_range, theta_image_of, ...
    meta: Mapping[str, object] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for H, c in self.coeffs.items():
            if H.d != self.field.d:
                raise ValueError(f"index {H!r} is not over {self.field}")
            if H.trace > self.trace_bound:
                continue
            if not is_psd(H):
                raise ValueError(f"index {H!r} is not positive semidefinite")
            if c:
                clean[H] = _norm(c)
        object.__setattr__(self, "coeffs", clean)
        if self.char_tag is not None:
            object.__setattr__(self, "char_tag", self.char_tag % self.field.w)

    def __getitem__(self, H: HermIndex):
        if H.trace > self.trace_bound:
            raise KeyError(f"{H} lies beyond the trace bound {self.trace_bound}")
        return self.coeffs.get(H, 0)

    def __iter__(self):
        return iter(sorted(self.coeffs, key=lex_key))

    def items(self):
        for H in self:
            yield H, self.coeffs[H]

    def support(self) -> list[HermIndex]:
        return list(self)

    def is_zero(self) -> bool:
        return not self.coeffs

    def truncate(self, T: int) -> "FourierExpansion":
        if T > self.trace_bound:
            raise ValueError(f"cannot extend trace bound {self.trace_bound} to {T}")
        return replace(self, trace_bound=T, coeffs=dict(self.coeffs))

    def with_meta(self, **kw) -> "FourierExpansion":
        return replace(self, coeffs=dict(self.coeffs), meta={**self.meta, **kw})

    def __add__(self, other):
        return linear_combine([(1, self), (1, other)])

    def __sub__(self, other):
        return linear_combine([(1, self), (-1, other)])

    def __neg__(self):
        return scale(self, -1)

    def __mul__(self, other):
        if isinstance(other, FourierExpansion):
            return mul(self, other)
        return scale(self, other)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, FourierExpansion):
            return NotImplemented
        T = min(self.trace_bound, other.trace_bound)
        return self.field == other.field and self.truncate(T).coeffs == other.truncate(T).coeffs

    def __repr__(self) -> str:
        return (f"FourierExpansion({self.field}, weight={self.weight}, T={self.trace_bound}, "
                f"{len(self.coeffs)} nonzero coefficients)")


def constant(K: QuadField, T: int, value=1, weight: int = 0) -> FourierExpansion:
    return FourierExpansion(K, weight, T, {zero(K): value})


def from_function(K: QuadField, weight: int, T: int, f, **kw) -> FourierExpansion:
    return FourierExpansion(K, weight, T, {H: f(H) for H in enumerate_psd(K, T)}, **kw)


def scale(F: FourierExpansion, c) -> FourierExpansion:
    c = _norm(Fraction(c))
    return replace(F, coeffs={H: c * v for H, v in F.coeffs.items()})


def linear_combine(terms: Iterable[tuple[object, FourierExpansion]], allow_mixed: bool = False) -> FourierExpansion:
    """sum c_i F_i; all F_i over one field, equal weights unless ``allow_mixed``."""
    terms = [(Fraction(c), F) for c, F in terms]
    if not terms:
        raise ValueError("empty combination")
    F0 = terms[0][1]
    for _, F in terms:
        if F.field != F0.field:
            raise ValueError(f"field mismatch: {F.field} vs {F0.field}")
        if F.weight != F0.weight and not allow_mixed:
            raise ValueError(f"weight mismatch: {F.weight} vs {F0.weight} (pass allow_mixed=True)")
    T = min(F.trace_bound for _, F in terms)
    acc: dict[HermIndex, Fraction | int] = defaultdict(int)
    for c, F in terms:
        c = _norm(c)
        for H, v in F.coeffs.items():
            if H.trace <= T:
                acc[H] += c * v
    tags = {F.char_tag for _, F in terms}
    return FourierExpansion(
        F0.field, F0.weight, T, acc,
        char_tag=tags.pop() if len(tags) == 1 else None,
        symmetric=all(F.symmetric for _, F in terms),
    )


def _integral_part(F: FourierExpansion) -> tuple[dict[tuple, int], int]:
    den = lcm(*(getattr(v, "denominator", 1) for v in F.coeffs.values())) if F.coeffs else 1
    return {H[:4]: int(v * den) for H, v in F.coeffs.items()}, den


def mul(F: FourierExpansion, G: FourierExpansion) -> FourierExpansion:
    """Product of expansions: a(FG; H) = sum over H1 + H2 = H of a(F;H1) a(G;H2)."""
    if F.field != G.field:
        raise ValueError(f"field mismatch: {F.field} vs {G.field}")
    T = min(F.trace_bound, G.trace_bound)
    d = F.field.d
    f, df = _integral_part(F)
    g, dg = _integral_part(G)
    # bucket G by trace so each F-term only meets compatible terms
    by_trace: dict[int, list[tuple[tuple, int]]] = defaultdict(list)
    for key, v in g.items():
        by_trace[key[0] + key[3]].append((key, v))
    acc: dict[tuple, int] = defaultdict(int)
    for (m1, x1, y1, n1), u in f.items():
        room = T - m1 - n1
        for t in range(room + 1):
            for (m2, x2, y2, n2), v in by_trace.get(t, ()):
                acc[(m1 + m2, x1 + x2, y1 + y2, n1 + n2)] += u * v
    den = df * dg
    coeffs = {HermIndex(*k, d): (Fraction(c, den) if den != 1 else c) for k, c in acc.items() if c}
    tag = None if F.char_tag is None or G.char_tag is None else F.char_tag + G.char_tag
    return FourierExpansion(F.field, F.weight + G.weight, T, coeffs, char_tag=tag,
                            symmetric=F.symmetric and G.symmetric)


def power(F: FourierExpansion, e: int) -> FourierExpansion:
    if e < 0:
        raise ValueError("negative power")
    out = constant(F.field, F.trace_bound)
    for _ in range(e):
        out = mul(out, F)
    return out


def theta_op(F: FourierExpansion) -> FourierExpansion:
    """a(F; H) -> det(H) a(F; H) with the exact rational det(H) = ndet(H)/D_K."""
    D = F.field.D
    coeffs = {H: _norm(Fraction(ndet(H), D) * v) for H, v in F.coeffs.items()}
    return replace(F, coeffs=coeffs, meta={**F.meta, "theta_image_of": F.weight})


@dataclass(frozen=True)
class EllipticQExp:
    weight: int
    bound: int
    coeffs: Mapping[int, int | Fraction]

    def __getitem__(self, t: int):
        if t > self.bound:
            raise KeyError(t)
        return self.coeffs.get(t, 0)

    def as_list(self) -> list:
        return [self[t] for t in range(self.bound + 1)]

    def __mul__(self, other: "EllipticQExp") -> "EllipticQExp":
        B = min(self.bound, other.bound)
        out = [0] * (B + 1)
        for i in range(B + 1):
            for j in range(B + 1 - i):
                out[i + j] += self[i] * other[j]
        return EllipticQExp(self.weight + other.weight, B, {t: _norm(Fraction(c)) for t, c in enumerate(out)})

    def combine(self, c, other: "EllipticQExp", c2) -> "EllipticQExp":
        B = min(self.bound, other.bound)
        return EllipticQExp(self.weight, B, {t: _norm(Fraction(c) * self[t] + Fraction(c2) * other[t])
                                            for t in range(B + 1)})

    def __eq__(self, other):
        B = min(self.bound, other.bound)
        return all(self[t] == other[t] for t in range(B + 1))


def siegel_phi(F: FourierExpansion) -> EllipticQExp:
    d = F.field.d
    return EllipticQExp(F.weight, F.trace_bound,
                        {t: F.coeffs.get(HermIndex(t, 0, 0, 0, d), 0) for t in range(F.trace_bound + 1)})


def restrict_siegel(F: FourierExpansion) -> dict[SiegelIndex, int | Fraction]:
    """Coefficients of F restricted to the Siegel half-space (Gaussian field).

    a(F|S2; [m, r, n]) = sum over b of a(F; [m, r+bi, n]) with 4mn - r^2 - b^2 >= 0,
    where [m, r, n] is the Siegel index with off-diagonal r/2.
    """
    if F.field.d != -4:
        raise ValueError("restriction to the Siegel half-space is implemented for Q(i) only")
    out = {}
    T = F.trace_bound
    for m in range(T + 1):
        for n in range(T + 1 - m):
            r = 0
            while r * r <= 4 * m * n:
                for s in {r, -r}:
                    total = 0
                    b = 0
                    while r * r + b * b <= 4 * m * n:
                        for bb in {b, -b}:
                            total += F.coeffs.get(HermIndex.gauss(m, s, bb, n), 0)
                        b += 1
                    out[SiegelIndex(m, s, n)] = _norm(Fraction(total))
                r += 1
    return out


def reduce_mod(F: FourierExpansion, p: int) -> dict[HermIndex, int]:
    """Nonzero residues of all coefficients; NotPIntegral names the offending index."""
    out = {}
    for H, v in F.items():
        try:
            r = mod_p(v, p)
        except NotPIntegral:
            raise NotPIntegral(f"coefficient {v} at {H} is not {p}-integral") from None
        if r:
            out[H] = r
    return out


def ord_p(F: FourierExpansion, p: int) -> HermIndex | Infinity:
    """Lex-minimal index with a coefficient nonzero mod p (up to the trace bound)."""
    if F.field.d not in (-4, -3):
        raise ValueError("ord_p is defined only over Q(i) and Q(sqrt(3) i)")
    residues = reduce_mod(F, p)
    if not residues:
        return Infinity(F.trace_bound)
    return min(residues, key=lex_key)


def is_cusp(F: FourierExpansion) -> bool:
    return all(rank(H) == 2 for H in F.coeffs)


# serialization ---------------------------------------------------------------

def dumps(F: FourierExpansion) -> str:
    buf = io.StringIO()
    buf.write(f"# hermtheta expansion v{FORMAT_VERSION}\n")
    buf.write(f"disc {F.field.d}\nweight {F.weight}\n")
    buf.write(f"char_tag {'none' if F.char_tag is None else F.char_tag}\n")
    buf.write(f"trace_bound {F.trace_bound}\nsymmetric {int(F.symmetric)}\n")
    for k in sorted(F.meta):
        buf.write(f"meta {k} {F.meta[k]!r}\n")
    buf.write("records m x y n num den\n")
    for H, v in F.items():
        v = Fraction(v)
        buf.write(f"{H.m} {H.x} {H.y} {H.n} {v.numerator} {v.denominator}\n")
    buf.write("end\n")
    return buf.getvalue()


def loads(text: str) -> FourierExpansion:
    import ast

    header: dict[str, str] = {}
    meta: dict[str, object] = {}
    coeffs: dict[HermIndex, Fraction | int] = {}
    lines = iter(text.splitlines())
    first = next(lines, "")
    if not first.startswith("# hermtheta expansion v"):
        raise ValueError("not an expansion file")
    if int(first.rsplit("v", 1)[1]) != FORMAT_VERSION:
        raise ValueError(f"unsupported format version {first}")
    for line in lines:
        if line.startswith("records"):
            break
        key, _, rest = line.partition(" ")
        if key == "meta":
            name, _, val = rest.partition(" ")
            meta[name] = ast.literal_eval(val)
        else:
            header[key] = rest.strip()
    d = int(header["disc"])
    ended = False
    for line in lines:
        if line == "end":
            ended = True
            break
        m, x, y, n, num, den = map(int, line.split())
        coeffs[HermIndex(m, x, y, n, d)] = _norm(Fraction(num, den))
    if not ended:
        raise ValueError("truncated expansion file")
    tag = header["char_tag"]
    return FourierExpansion(QuadField(d), int(header["weight"]), int(header["trace_bound"]), coeffs,
                            char_tag=None if tag == "none" else int(tag),
                            symmetric=bool(int(header["symmetric"])), meta=meta)
