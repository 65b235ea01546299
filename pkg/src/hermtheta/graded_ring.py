"""Generators of the symmetric graded ring over Q(i) and exact linear algebra.

The five generators E4, E6, chi8, F10, F12 are assembled from Krieg
expansions and theta constants.  The Leech theta series is never enumerated;
it comes out of the psi_12 relation, and F12 is then defined through the
closed expression of the Leech series in the other generators.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from math import gcd, lcm

from .krieg import eisenstein
from .lambda2 import HermIndex, enumerate_psd, gauss_classes, lex_key, parse_gauss, rank
from .number_theory import QuadField
from .qseries import (
    EllipticQExp,
    FourierExpansion,
    is_cusp,
    linear_combine,
    mul,
    power,
    restrict_siegel,
    siegel_phi,
)
from .theta import f10_series, kappa, psi_series

log = logging.getLogger(__name__)

GAUSS = QuadField(-4)

# theta_Leech = a1 psi_12 + a2 E4^3 + a3 E4 E8 + a4 E12
LEECH_PSI_RELATION = (
    Fraction(1470105, 8511808),
    Fraction(167218051, 638385600),
    Fraction(-147340193, 212795200),
    Fraction(802930253, 638385600),
)

# theta_H1 = E4^2 - 5760 chi8, theta_H2 = E4^2 - 3072 chi8, theta_H3 = E4^2
RANK8_CHI8_COEFFS = {"H1": -5760, "H2": -3072, "H3": 0}

# rank-8 genus: sum_i theta_Hi / |Aut(H_i)| = mass * E8
RANK8_AUT = {"H1": 2 ** 15 * 3 ** 5 * 5 ** 2 * 7, "H2": 2 ** 22 * 3 ** 2 * 5 * 7, "H3": 2 ** 21 * 3 ** 4 * 5 ** 2}
RANK8_MASS = Fraction(61, 2 ** 22 * 3 ** 5 * 5 * 7)


class GeneratorError(AssertionError):
    """A validation identity failed while building the generators."""


class NoSolution:
    """Returned by :func:`express` when the system is inconsistent."""

    def __init__(self, residual_index: HermIndex | None = None):
        self.residual_index = residual_index

    def __bool__(self):
        return False

    def __repr__(self):
        return f"NoSolution(at {self.residual_index})"


@dataclass(frozen=True)
class GeneratorSet:
    E4: FourierExpansion
    E6: FourierExpansion
    chi8: FourierExpansion
    F10: FourierExpansion
    F12: FourierExpansion
    # auxiliary series used along the way
    E8: FourierExpansion
    E12: FourierExpansion
    psi12: FourierExpansion
    leech: FourierExpansion
    chi8_normalizer: Fraction
    kappa: Fraction
    timings: dict = field(default_factory=dict, compare=False)

    @property
    def trace_bound(self) -> int:
        return self.E4.trace_bound

    def as_dict(self) -> dict[str, FourierExpansion]:
        return {"E4": self.E4, "E6": self.E6, "chi8": self.chi8, "F10": self.F10, "F12": self.F12}

    def rank8(self, label: str) -> FourierExpansion:
        """Theta series of the rank-8 lattice class ``label`` via its chi8 combination."""
        return rank8_theta(label, self.trace_bound, self.E4, self.chi8)


@lru_cache(maxsize=8)
def chi8_series(T: int) -> tuple[FourierExpansion, Fraction]:
    """chi8 = (E4^2 - E8)/c with c the coefficient of E4^2 - E8 at [1,1+i,1]."""
    E4, E8 = eisenstein(4, T), eisenstein(8, T)
    diff = linear_combine([(1, mul(E4, E4)), (-1, E8)])
    c = Fraction(diff[HermIndex.gauss(1, 1, 1, 1)]) if T >= 2 else Fraction(0)
    if c == 0:
        raise GeneratorError("E4^2 - E8 vanishes at [1,1+i,1]; cannot normalize chi8")
    return (diff * (1 / c)).with_meta(source="chi8 = (E4^2 - E8)/c", normalizer=str(c)), c


def rank8_theta(label: str, T: int, E4: FourierExpansion | None = None,
                chi8: FourierExpansion | None = None) -> FourierExpansion:
    """Theta series of the rank-8 class ``label`` as E4^2 + c chi8."""
    E4 = E4 if E4 is not None else eisenstein(4, T)
    chi8 = chi8 if chi8 is not None else chi8_series(T)[0]
    c = RANK8_CHI8_COEFFS[label]
    return linear_combine([(1, mul(E4, E4)), (c, chi8)]).with_meta(source=f"theta {label} (E4^2 {c:+d} chi8)")


@lru_cache(maxsize=4)
def build_generators(T: int = 6) -> GeneratorSet:
    if T > 8:
        raise ValueError("generators are supported up to trace 8")
    times = {}
    t0 = time.perf_counter()
    E4, E6, E8, E12 = (eisenstein(k, T) for k in (4, 6, 8, 12))
    times["krieg"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    chi8, c = chi8_series(T)
    times["chi8"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    F10 = f10_series(T)
    psi12 = psi_series(12, T)
    times["theta constants"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    E4cube = power(E4, 3)
    a1, a2, a3, a4 = LEECH_PSI_RELATION
    leech = linear_combine([(a1, psi12), (a2, E4cube), (a3, mul(E4, E8)), (a4, E12)])
    leech = leech.with_meta(source="theta Leech via psi_12")
    F12 = linear_combine([
        (Fraction(7, 12), E4cube),
        (Fraction(5, 12), mul(E6, E6)),
        (-10080, mul(E4, chi8)),
        (-1, leech),
    ]) * Fraction(1, 60480)
    F12 = F12.with_meta(source="F12 from the Leech expression")
    times["F12"] = time.perf_counter() - t0

    gens = GeneratorSet(E4, E6, chi8, F10, F12, E8, E12, psi12, leech, c, kappa(), times)
    _validate(gens)
    log.info("generators built to trace %d: %s", T, {k: round(v, 2) for k, v in times.items()})
    return gens


def _validate(g: GeneratorSet) -> None:
    for name in ("chi8", "F10", "F12"):
        F = getattr(g, name)
        if not is_cusp(F):
            raise GeneratorError(f"{name} is not cuspidal")
    for name in ("chi8", "F10", "F12", "leech"):
        F = getattr(g, name)
        bad = [H for H, v in F.items() if Fraction(v).denominator != 1]
        if bad:
            raise GeneratorError(f"{name} has a non-integral coefficient at {bad[0]}")
    if any(restrict_siegel(g.chi8).values()):
        raise GeneratorError("chi8 does not vanish on the Siegel half-space")
    if g.chi8[HermIndex.gauss(1, 1, 1, 1)] != 1:
        raise GeneratorError("chi8 normalization failed")
    if siegel_phi(g.leech) != leech_phi_expected(g.trace_bound):
        raise GeneratorError("Phi(theta_Leech) differs from E4^3 - 720 Delta")


def elliptic_eisenstein(k: int, B: int) -> EllipticQExp:
    from .krieg import elliptic_eisenstein_coeff

    return EllipticQExp(k, B, {t: elliptic_eisenstein_coeff(k, t) for t in range(B + 1)})


def delta(B: int) -> EllipticQExp:
    E4, E6 = elliptic_eisenstein(4, B), elliptic_eisenstein(6, B)
    return (E4 * E4 * E4).combine(Fraction(1, 1728), E6 * E6, Fraction(-1, 1728))


def leech_phi_expected(B: int) -> EllipticQExp:
    """E4^3 - 720 Delta, the theta series of the Leech lattice."""
    E4 = elliptic_eisenstein(4, B)
    return (E4 * E4 * E4).combine(1, delta(B), -720)


# monomials and linear algebra -------------------------------------------------

WEIGHTS = {"E4": 4, "E6": 6, "chi8": 8, "F10": 10, "F12": 12}


def monomial_exponents(k: int) -> list[tuple[int, int, int, int, int]]:
    """Exponent vectors (a, b, c, d, e) with 4a + 6b + 8c + 10d + 12e = k."""
    if k % 2:
        raise ValueError("weight must be even")
    out = []
    w = list(WEIGHTS.values())

    def rec(i, rest, acc):
        if i == len(w):
            if rest == 0:
                out.append(tuple(acc))
            return
        for e in range(rest // w[i] + 1):
            rec(i + 1, rest - e * w[i], acc + [e])

    rec(0, k, [])
    return sorted(out, reverse=True)


def monomial_name(exps) -> str:
    parts = []
    for (name, _), e in zip(WEIGHTS.items(), exps):
        if e:
            parts.append(name if e == 1 else f"{name}^{e}")
    return "*".join(parts) or "1"


def monomial_basis(k: int, T: int, gens: GeneratorSet | None = None) -> list[FourierExpansion]:
    if k > 24:
        raise ValueError("weights above 24 are not supported")
    gens = gens or build_generators(max(T, 1))
    g = gens.as_dict()
    out = []
    for exps in monomial_exponents(k):
        F = None
        for (name, _), e in zip(WEIGHTS.items(), exps):
            for _ in range(e):
                F = g[name] if F is None else mul(F, g[name])
        out.append(F.truncate(min(T, F.trace_bound)).with_meta(source=monomial_name(exps)))
    return out


def express(F: FourierExpansion, basis: list[FourierExpansion]) -> list[Fraction] | NoSolution:
    """Exact coefficients x with F = sum x_i basis_i on every index up to the common bound.

    Integer fraction-free elimination on the full overdetermined system; a
    solution is only returned if it fits all equations.
    """
    if not basis:
        raise ValueError("empty basis")
    T = min([F.trace_bound] + [B.trace_bound for B in basis])
    K = F.field
    if any(B.field != K for B in basis):
        raise ValueError("basis expansions over different fields")
    if any(B.weight != F.weight for B in basis):
        raise ValueError("weights differ")
    indices = sorted(set().union(F.coeffs, *(B.coeffs for B in basis)), key=lex_key)
    indices = [H for H in indices if H.trace <= T]
    n = len(basis)
    rows: list[list[int]] = []
    for H in indices:
        vals = [Fraction(B[H]) for B in basis] + [Fraction(F[H])]
        den = lcm(*(v.denominator for v in vals))
        rows.append([int(v * den) for v in vals])
    tags = list(indices)
    # fraction-free forward elimination with gcd normalization
    piv_cols = []
    r = 0
    for col in range(n):
        p = next((i for i in range(r, len(rows)) if rows[i][col]), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        tags[r], tags[p] = tags[p], tags[r]
        pr = rows[r]
        for i in range(len(rows)):
            if i != r and rows[i][col]:
                a, b = pr[col], rows[i][col]
                new = [a * x - b * y for x, y in zip(rows[i], pr)]
                g = 0
                for v in new:
                    g = gcd(g, v)
                rows[i] = [v // g for v in new] if g > 1 else new
        piv_cols.append(col)
        r += 1
    for i in range(r, len(rows)):
        if rows[i][n]:
            return NoSolution(tags[i])
    if len(piv_cols) < n:
        raise ValueError("basis is linearly dependent on the available indices")
    x = [Fraction(0)] * n
    for i, col in enumerate(piv_cols):
        x[col] = Fraction(rows[i][n], rows[i][col])
    return x


def rank_on(basis: list[FourierExpansion], T: int) -> int:
    """Rank of the coefficient matrix of ``basis`` on indices of trace <= T."""
    indices = [H for H in enumerate_psd(basis[0].field, T)]
    M = [[Fraction(B[H]) for H in indices] for B in basis]
    rk = 0
    cols = len(indices)
    for c in range(cols):
        p = next((i for i in range(rk, len(M)) if M[i][c]), None)
        if p is None:
            continue
        M[rk], M[p] = M[p], M[rk]
        for i in range(rk + 1, len(M)):
            if M[i][c]:
                f = M[i][c] / M[rk][c]
                M[i] = [a - f * b for a, b in zip(M[i], M[rk])]
        rk += 1
    return rk


# golden tables ------------------------------------------------------------------

@dataclass(frozen=True)
class GoldenRow:
    index: HermIndex
    ndet: int
    values: tuple[int, ...]


class GoldenTableError(ValueError):
    pass


def load_golden(which: int, text: str | None = None) -> list[GoldenRow]:
    """Rows of golden table 1 or 2; the checksum line must match the body."""
    import hashlib

    if text is None:
        text = resources.files("hermtheta.data").joinpath(f"table{which}.txt").read_text()
    body_lines, checksum = [], None
    for line in text.splitlines():
        if line.startswith("#") or not line.strip():
            continue
        if line.startswith("checksum "):
            checksum = line.split()[1]
            continue
        body_lines.append(line)
    body = "".join(ln + "\n" for ln in body_lines)
    if checksum is not None and hashlib.sha256(body.encode()).hexdigest() != checksum:
        raise GoldenTableError(f"golden table {which}: checksum mismatch")
    rows = []
    for line in body_lines:
        parts = line.split()
        rows.append(GoldenRow(parse_gauss(parts[0]), int(parts[1]), tuple(int(v) for v in parts[2:])))
    return rows


@dataclass(frozen=True)
class TableComparison:
    which: int
    rows: list[tuple[GoldenRow, tuple]]   # golden row and computed values
    unlisted: list[HermIndex]
    columns: tuple[str, ...]

    @property
    def mismatches(self) -> list[GoldenRow]:
        return [r for r, vals in self.rows if tuple(vals) != r.values]

    @property
    def ok(self) -> bool:
        return not self.mismatches and not self.unlisted


def compare_table(which: int, rows: list[GoldenRow] | None = None,
                  gens: GeneratorSet | None = None) -> TableComparison:
    """Recompute golden table 1 (rank-8 columns from chi8 combinations) or 2 (Leech)."""
    rows = load_golden(which) if rows is None else rows
    T = max(r.index.trace for r in rows)
    if which == 1:
        cols = ("E4^2 - 5760 chi8", "E4^2 - 3072 chi8")
        series = [rank8_theta("H1", T), rank8_theta("H2", T)]
        out = [(r, tuple(F[r.index] for F in series)) for r in rows]
        return TableComparison(1, out, [], cols)
    if which != 2:
        raise ValueError("tables are numbered 1 and 2")
    g = gens or build_generators(max(T, 6))
    out = [(r, (g.leech[r.index],)) for r in rows]
    return TableComparison(2, out, table2_unlisted_violations(g.leech, rows), ("theta_Leech via psi_12",))


def table2_unlisted_violations(leech: FourierExpansion, rows: list[GoldenRow]) -> list[HermIndex]:
    """Rank-2 indices of trace <= 6 with a nonzero coefficient whose class has no listed row."""
    classes = gauss_classes(6)
    listed = {classes[r.index] for r in rows}
    return [H for H in enumerate_psd(GAUSS, 6)
            if rank(H) == 2 and leech[H] != 0 and classes[H] not in listed]


# caching ---------------------------------------------------------------------------

CACHE_FILES = ("E4", "E6", "chi8", "F10", "F12", "E8", "E12", "psi12", "leech")


def save_generators(g: GeneratorSet, directory) -> None:
    """One expansion file per series plus a manifest with the calibration data."""
    from pathlib import Path

    from .qseries import FORMAT_VERSION, dumps

    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    for name in CACHE_FILES:
        (d / f"{name}.qexp").write_text(dumps(getattr(g, name)))
    manifest = [f"format {FORMAT_VERSION}", "disc -4", f"trace_bound {g.trace_bound}",
                f"kappa {g.kappa}", f"chi8_normalizer {g.chi8_normalizer}"]
    (d / "manifest.txt").write_text("\n".join(manifest) + "\n")


def load_generators(directory, T: int) -> GeneratorSet | None:
    """Cached generators, or None unless format, field, bound and kappa all match."""
    from pathlib import Path

    from .qseries import FORMAT_VERSION, loads

    d = Path(directory)
    try:
        manifest = dict(line.split(" ", 1) for line in (d / "manifest.txt").read_text().splitlines() if line)
    except (OSError, ValueError):
        return None
    expected = {"format": str(FORMAT_VERSION), "disc": "-4", "trace_bound": str(T), "kappa": str(kappa())}
    if any(manifest.get(k) != v for k, v in expected.items()):
        return None
    try:
        series = {name: loads((d / f"{name}.qexp").read_text()) for name in CACHE_FILES}
    except (OSError, ValueError, KeyError):
        return None
    g = GeneratorSet(series["E4"], series["E6"], series["chi8"], series["F10"], series["F12"], series["E8"],
                     series["E12"], series["psi12"], series["leech"], Fraction(manifest["chi8_normalizer"]),
                     kappa(), {"cache": 0.0})
    _validate(g)
    return g
