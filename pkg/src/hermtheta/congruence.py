"""Congruence verification: Sturm bounds, theta kernels, mod-p singularity.

A :class:`Verdict` is one of

* ``ProvedViaSturm``: every coefficient up to the Sturm trace bound vanishes
  mod p and the field/character hypotheses of the Sturm theorem hold, so the
  whole form vanishes mod p;
* ``CheckedToBound``: coefficients vanish up to the available trace bound but
  no Sturm theorem applies;
* ``Refuted``: some coefficient is nonzero mod p (witness attached).
"""

from __future__ import annotations

import logging
import os
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Callable

from .krieg import KriegParams, eisenstein, gk_product, krieg_expansion, prefactor, rank1_factor
from .lambda2 import HermIndex, lex_key, rank
from .number_theory import QuadField, bernoulli, gen_bernoulli, is_prime, mod_p, p_valuation
from .qseries import FourierExpansion, linear_combine, mul, reduce_mod, siegel_phi, theta_op

log = logging.getLogger(__name__)

PROVED = "ProvedViaSturm"
CHECKED = "CheckedToBound"
REFUTED = "Refuted"

DEFAULT_BOUND = 6


class UnsupportedField(ValueError):
    """No Sturm theorem is available for this field."""


class InsufficientBound(ValueError):
    def __init__(self, required: int, available: int):
        super().__init__(f"trace bound {available} is below the required bound {required}")
        self.required, self.available = required, available


@dataclass(frozen=True)
class Verdict:
    status: str
    prime: int
    bound_used: int
    checked_to: int
    witness: HermIndex | None = None
    residue: int | None = None
    failures: tuple[tuple[HermIndex, int], ...] = ()
    note: str = ""

    def __post_init__(self):
        if self.status == REFUTED and (self.witness is None or not self.residue):
            raise ValueError("a refutation needs a witness with a nonzero residue")

    @property
    def ok(self) -> bool:
        return self.status != REFUTED

    def residue_at(self, H: HermIndex) -> int:
        return dict(self.failures).get(H, 0)

    def __str__(self) -> str:
        if self.status == REFUTED:
            return f"{REFUTED} (p={self.prime}, witness {self.witness}, residue {self.residue})"
        if self.status == PROVED:
            return f"{PROVED} (p={self.prime}, Sturm bound {self.bound_used}, checked to {self.checked_to})"
        return f"{CHECKED} (p={self.prime}, trace <= {self.checked_to}){' ' + self.note if self.note else ''}"


def sturm_trace_bound(k: int, K: QuadField) -> int:
    if k % 2:
        raise ValueError("weight must be even")
    if K.d == -4:
        return 2 * (k // 8)
    if K.d == -3:
        return 2 * (k // 9)
    raise UnsupportedField(f"no Sturm bound is known over {K}; only CheckedToBound is possible")


def _check_prime(p: int) -> None:
    if not is_prime(p) or p < 5:
        raise ValueError(f"p must be a prime >= 5, got {p}")


def _refutation(residues: dict, p: int, bound: int, checked: int) -> Verdict:
    fails = tuple(sorted(residues.items(), key=lambda kv: lex_key(kv[0])))
    H, r = fails[0]
    return Verdict(REFUTED, p, bound, checked, H, r, fails)


def verify_zero_mod_p(F: FourierExpansion, p: int, k_eff: int | None = None) -> Verdict:
    """Decide F = 0 mod p as far as the data and the Sturm theorem allow."""
    _check_prime(p)
    k_eff = F.weight if k_eff is None else k_eff
    residues = reduce_mod(F, p)
    try:
        bound = sturm_trace_bound(k_eff, F.field)
    except UnsupportedField:
        bound = None
    if residues:
        return _refutation(residues, p, F.trace_bound if bound is None else bound, F.trace_bound)
    if bound is None:
        return Verdict(CHECKED, p, F.trace_bound, F.trace_bound, note="(no Sturm theorem for this field)")
    if F.char_tag is None or not F.symmetric:
        return Verdict(CHECKED, p, F.trace_bound, F.trace_bound, note="(character or symmetry unknown)")
    if F.trace_bound < bound:
        return Verdict(CHECKED, p, F.trace_bound, F.trace_bound, note=f"(Sturm bound {bound} not reached)")
    return Verdict(PROVED, p, bound, F.trace_bound)




def theta_kernel_verify(F: FourierExpansion, p: int) -> Verdict:
    """Is Theta(F) = 0 mod p?  The image is treated at weight k + p + 1."""
    _check_prime(p)
    K = F.field
    if K.D % p == 0:
        raise ValueError(f"p = {p} divides D_K = {K.D}; the integral determinant test is invalid")
    k_eff = F.weight + p + 1
    try:
        need = sturm_trace_bound(k_eff, K)
    except UnsupportedField:
        need = 0
    if F.trace_bound < need:
        raise InsufficientBound(need, F.trace_bound)
    # det(H) = ndet(H)/D_K is p-integral because p does not divide D_K
    return verify_zero_mod_p(theta_op(F), p, k_eff)


def mod_p_singular_verify(F: FourierExpansion, p: int) -> Verdict:
    """All rank-2 coefficients vanish mod p (up to the trace bound)."""
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    residues = {H: r for H, r in reduce_mod(F, p).items() if rank(H) == 2}
    if residues:
        return _refutation(residues, p, F.trace_bound, F.trace_bound)
    return Verdict(CHECKED, p, F.trace_bound, F.trace_bound, note="(rank-2 coefficients)")


# arithmetic side conditions ------------------------------------------------------

def starstar_failures(K: QuadField, p: int, Nmax: int) -> list[int]:
    """N <= Nmax with p not dividing N, chi_K(N) in {0, -1}, but G_K(p-1; N) != 0 mod p."""
    bad = []
    for N in range(1, Nmax + 1):
        if N % p == 0 or K.chi(N) == 1:
            continue
        if mod_p(gk_product(K, p - 1, N), p):
            bad.append(N)
    return bad


@dataclass(frozen=True)
class SingularPrefactorReport:
    p: int
    bernoulli_unit: bool          # B_{(p+1)/2} is a p-adic unit
    staudt_clausen: bool          # p * B_{(p-1)/2, chi} = -1 mod p
    prefactor_valuation: int

    @property
    def ok(self) -> bool:
        return self.bernoulli_unit and self.staudt_clausen and self.prefactor_valuation >= 1


def singular_prefactor(p: int) -> SingularPrefactorReport:
    """The rank-2 prefactor of F_{(p+1)/2} over Q(sqrt(-p)) is divisible by p."""
    if p % 4 != 3 or p <= 3:
        raise ValueError("needs p > 3 with p = 3 mod 4")
    K = QuadField(-p)
    k = (p + 1) // 2
    b = bernoulli(k)
    unit = p_valuation(b, p) == 0
    gb = p * gen_bernoulli(k - 1, K.chi)
    sc = p_valuation(gb, p) == 0 and mod_p(gb, p) == p - 1
    return SingularPrefactorReport(p, unit, sc, int(p_valuation(prefactor(K, k), p)))


def first_inert_prime(K: QuadField, start: int = 5) -> int:
    p = start
    while not (is_prime(p) and K.chi(p) == -1 and K.h % p):
        p += 1
    return p


# named checks ---------------------------------------------------------------------

@dataclass
class CheckResult:
    check_id: str
    description: str
    passed: bool
    verdicts: list[Verdict] = field(default_factory=list)
    detail: str = ""
    skipped: bool = False
    seconds: float = 0.0

    @property
    def status(self) -> str:
        if self.skipped:
            return "SKIP"
        return "PASS" if self.passed else "FAIL"

    def record(self) -> dict:
        v = self.verdicts[0] if self.verdicts else None
        return {
            "check": self.check_id,
            "status": self.status,
            "verdicts": [x.status for x in self.verdicts],
            "witness": str(v.witness) if v and v.witness else None,
            "bound": v.bound_used if v else None,
            "checked_to": v.checked_to if v else None,
            "prime": v.prime if v else None,
            "seconds": round(self.seconds, 3),
            "detail": self.detail,
        }


@dataclass
class CheckContext:
    trace: int = DEFAULT_BOUND
    external: bool = True
    gram_dir: Path | None = None
    _gens: object = None

    @property
    def gens(self):
        if self._gens is None:
            from .graded_ring import build_generators

            self._gens = build_generators(self.trace)
        return self._gens

    def gram_path(self, label: str) -> Path | None:
        if not self.external:
            return None
        base = self.gram_dir or (Path(os.environ["HERMTHETA_GRAM_DIR"]) if "HERMTHETA_GRAM_DIR" in os.environ else None)
        if base is None:
            return None
        path = Path(base) / f"{label}.gram"
        return path if path.exists() else None


def _all(verdicts, status=PROVED) -> bool:
    return all(v.status == status for v in verdicts)


def check_mod7(ctx: CheckContext):
    vs = [theta_kernel_verify(ctx.gens.rank8(lbl), 7) for lbl in ("H1", "H2")]
    return _all(vs) and all(v.bound_used == 4 for v in vs), vs, "Theta(theta_H1), Theta(theta_H2) mod 7"


def check_mod11cong_1(ctx):
    v = theta_kernel_verify(ctx.gens.leech, 11)
    return v.status == PROVED and v.bound_used == 6, [v], "Theta(theta_Leech) mod 11"


def check_mod11cong_2(ctx):
    g = ctx.gens
    v = verify_zero_mod_p(linear_combine([(1, g.leech), (-1, g.E12)]), 13, 12)
    # E12 = 1 mod 13: both the rank-one and the rank-two leading factors are divisible by 13
    structural = p_valuation(rank1_factor(12), 13) >= 1 and p_valuation(prefactor(QuadField(-4), 12), 13) >= 1
    E12_minus_1 = linear_combine([(1, g.E12), (-1, FourierExpansion(g.E12.field, 12, g.E12.trace_bound,
                                                                   {HermIndex(0, 0, 0, 0): 1}, char_tag=6))])
    data = not reduce_mod(E12_minus_1, 13)
    from .graded_ring import leech_phi_expected

    phi_ok = siegel_phi(g.leech) == leech_phi_expected(g.leech.trace_bound)
    phi8 = _phi_leech_to(8)
    ok = v.status == PROVED and structural and data and phi_ok and phi8
    detail = (f"theta_Leech - E12 = 0 mod 13 [{v.status}]; E12 = 1 mod 13 structurally {structural}, "
              f"on data {data}; Phi(theta_Leech) = E4^3 - 720 Delta to q^8: {phi8}")
    return ok, [v], detail


def _phi_leech_to(B: int) -> bool:
    """Phi(theta_Leech) = E4^3 - 720 Delta to q^B, through the psi_12 relation."""
    from .graded_ring import LEECH_PSI_RELATION, elliptic_eisenstein, leech_phi_expected
    from .qseries import EllipticQExp

    E4, E8, E12 = (elliptic_eisenstein(k, B) for k in (4, 8, 12))
    psi = phi_psi12(B)
    a1, a2, a3, a4 = LEECH_PSI_RELATION
    cube, e48 = E4 * E4 * E4, E4 * E8
    phi = EllipticQExp(12, B, {t: a1 * psi[t] + a2 * cube[t] + a3 * e48[t] + a4 * E12[t] for t in range(B + 1)})
    return phi == leech_phi_expected(B)


def phi_psi12(B: int) -> list[int]:
    """Coefficients of Phi(psi_12) up to q^B.

    Only characteristics with a2 = 0 survive Phi, leaving
    (theta_00^12 + theta_01^12 + theta_10^12) / 2 in one variable, where the
    exponent of g in Z[i] is |2g + (1+i)a|^2 / 8.
    """
    n = 8 * B + 1

    def one_var(a: int, b: int) -> list[int]:
        out = [0] * n
        R = int((8 * B) ** 0.5) // 2 + 2
        for s in range(-R, R + 1):
            for t in range(-R, R + 1):
                u = (2 * s + a, 2 * t + a)
                e = u[0] ** 2 + u[1] ** 2
                if e < n:
                    out[e] += -1 if b and ((u[0] - u[1]) // 2) % 2 else 1
        return out

    def times(f, g):
        h = [0] * n
        for i, x in enumerate(f):
            if x:
                for j in range(n - i):
                    h[i + j] += x * g[j]
        return h

    total = [0] * n
    for a, b in ((0, 0), (0, 1), (1, 0)):
        th = one_var(a, b)
        acc = th
        for _ in range(11):
            acc = times(acc, th)
        total = [x + y for x, y in zip(total, acc)]
    if any(total[e] for e in range(n) if e % 8):
        raise AssertionError("Phi(psi_12) has non-integral exponents")
    return [Fraction(total[8 * t], 2) for t in range(B + 1)]


def check_thetaconstant(ctx):
    from .theta import psi_series

    v8 = theta_kernel_verify(psi_series(8, ctx.trace), 7)
    v12 = theta_kernel_verify(psi_series(12, ctx.trace), 11)
    return _all([v8, v12]), [v8, v12], "Theta(psi_8) mod 7, Theta(psi_12) mod 11"


def check_cor1(ctx):
    v = theta_kernel_verify(eisenstein(8, ctx.trace), 7)
    return v.status == PROVED, [v], "Theta(E8) mod 7 over Q(i)"


def check_main1(ctx):
    K3 = QuadField(-3)
    v3 = theta_kernel_verify(krieg_expansion(KriegParams(K3, 12), ctx.trace), 11)
    K5 = QuadField(-20)
    p = first_inert_prime(K5)
    T5 = min(ctx.trace, 4)
    v5 = theta_kernel_verify(krieg_expansion(KriegParams(K5, p + 1), T5), p)
    ok = v3.status == PROVED and v5.status == CHECKED and v5.checked_to >= 4
    return ok, [v3, v5], f"Theta(F12) mod 11 over Q(sqrt(3) i); Theta(F{p + 1}) mod {p} over Q(sqrt(5) i), h = {K5.h}"


def check_modpsingular(ctx):
    v11 = mod_p_singular_verify(krieg_expansion(KriegParams(QuadField(-11), 6), min(ctx.trace, 6)), 11)
    v19 = mod_p_singular_verify(krieg_expansion(KriegParams(QuadField(-19), 10), min(ctx.trace, 4)), 19)
    reps = [singular_prefactor(p) for p in (11, 19)]
    ok = _all([v11, v19], CHECKED) and v11.checked_to >= 6 and v19.checked_to >= 4 and all(r.ok for r in reps)
    detail = "F6 over Q(sqrt(11) i) mod 11, F10 over Q(sqrt(19) i) mod 19; prefactor valuations " + \
        ", ".join(f"p={r.p}: {r.prefactor_valuation}" for r in reps)
    return ok, [v11, v19], detail


def check_starstar(ctx):
    bad = {}
    for d in (-4, -3, -20, -8, -7):
        K = QuadField(d)
        for p in (7, 11):
            if K.chi(p) == -1 and K.h % p:
                b = starstar_failures(K, p, 300)
                if b:
                    bad[(d, p)] = b[:5]
    return not bad, [], "G_K(p-1; N) = 0 mod p for chi_K(N) in {0, -1}, N <= 300" + (f"; failures {bad}" if bad else "")


def check_ex1(ctx):
    g = ctx.gens
    T = min(ctx.trace, 4) if ctx.trace >= 4 else ctx.trace
    lhs = theta_op(g.E4.truncate(T))
    rhs = linear_combine([(5, mul(g.E4, g.chi8)), (2, g.F12)]).truncate(T)
    diff = linear_combine([(1, lhs), (-1, rhs)], allow_mixed=True)
    diff = FourierExpansion(diff.field, 12, T, diff.coeffs, char_tag=6)
    v = verify_zero_mod_p(diff, 7, 12)
    return v.status == PROVED and v.checked_to >= 4, [v], "Theta(E4) - 5 E4 chi8 - 2 F12 mod 7"


def check_mass(ctx):
    from .graded_ring import RANK8_AUT, RANK8_MASS
    from .theta import load_gram, theta_series

    g = ctx.gens
    T = min(ctx.trace, 4)
    paths = {lbl: ctx.gram_path(lbl) for lbl in RANK8_AUT}
    if all(paths.values()):
        series = {lbl: theta_series(load_gram(p), T) for lbl, p in paths.items()}
        how = "enumerated Gram matrices"
    else:
        series = {lbl: g.rank8(lbl).truncate(T) for lbl in RANK8_AUT}
        how = "chi8 combinations"
    lhs = linear_combine([(Fraction(1, RANK8_AUT[l]), s) for l, s in series.items()])
    ok = lhs == g.E8.truncate(T) * RANK8_MASS
    return ok, [], f"genus mass identity to trace {T} from {how}"


def check_negative_kernel(ctx):
    v = theta_kernel_verify(eisenstein(4, ctx.trace), 7)
    target = HermIndex.gauss(1, 1, 1, 1)
    ok = v.status == REFUTED and v.residue_at(target) == 5
    return ok, [v], f"Theta(E4) mod 7 must fail; residue at {target} is {v.residue_at(target)}"


def check_negative_singular(ctx):
    v = mod_p_singular_verify(eisenstein(4, ctx.trace), 7)
    target = HermIndex.gauss(1, 0, 0, 1)
    ok = v.status == REFUTED and v.residue_at(target) == 1
    return ok, [v], f"E4 is not singular mod 7; residue at {target} is {v.residue_at(target)}"


def check_h2_enumeration(ctx):
    from .theta import load_gram, theta_series

    path = ctx.gram_path("H2")
    if path is None:
        return None
    th = theta_series(load_gram(path), 2)
    ok = th[HermIndex.gauss(1, 1, 1, 1)] == 2688 and th == ctx.gens.rank8("H2").truncate(2)
    return ok, [], "theta_H2 enumerated to trace 2"


REGISTRY: dict[str, tuple[str, Callable]] = {
    "mod7": ("Theta kernel mod 7 of the rank-8 theta series", check_mod7),
    "mod11cong-1": ("Theta kernel mod 11 of the Leech theta series", check_mod11cong_1),
    "mod11cong-2": ("Leech theta series is 1 mod 13", check_mod11cong_2),
    "thetaconstantth": ("Theta kernels of psi_8 and psi_12", check_thetaconstant),
    "cor1": ("Theta kernel of E8 mod 7", check_cor1),
    "main1": ("Theta kernel of F_{p+1} for inert p", check_main1),
    "modpsingular": ("Mod p singular Krieg forms", check_modpsingular),
    "starstar": ("Divisor-sum congruence behind the Eisenstein case", check_starstar),
    "ex1": ("Theta(E4) modulo 7 in terms of generators", check_ex1),
    "mass": ("Genus mass identity for rank 8", check_mass),
    "neg-kernel": ("Negative control: E4 is not in the mod 7 kernel", check_negative_kernel),
    "neg-singular": ("Negative control: E4 is not singular mod 7", check_negative_singular),
    "h2-enum": ("Enumerated rank-8 theta series (external Gram data)", check_h2_enumeration),
}


def run_check(check_id: str, ctx: CheckContext) -> CheckResult:
    desc, fn = REGISTRY[check_id]
    t0 = time.perf_counter()
    try:
        out = fn(ctx)
    except Exception as exc:  # failures are report entries
        log.exception("check %s raised", check_id)
        return CheckResult(check_id, desc, False, detail=f"error: {exc}", seconds=time.perf_counter() - t0)
    if out is None:
        return CheckResult(check_id, desc, True, skipped=True, detail="external data not available",
                           seconds=time.perf_counter() - t0)
    ok, verdicts, detail = out
    return CheckResult(check_id, desc, bool(ok), verdicts, detail, seconds=time.perf_counter() - t0)


def run_named_checks(ids=None, ctx: CheckContext | None = None) -> list[CheckResult]:
    ctx = ctx or CheckContext()
    return [run_check(c, ctx) for c in (ids or list(REGISTRY))]


def format_report(results: list[CheckResult]) -> str:
    w = max(len(r.check_id) for r in results)
    lines = [f"{'check':<{w}}  status  time    verdicts"]
    for r in results:
        vs = "; ".join(str(v) for v in r.verdicts) or r.detail
        lines.append(f"{r.check_id:<{w}}  {r.status:<6}  {r.seconds:6.2f}  {vs}")
        if r.verdicts and r.detail:
            lines.append(f"{'':<{w}}                  {r.detail}")
    if any(v.status == CHECKED for r in results for v in r.verdicts):
        lines.append("note: CheckedToBound verdicts are finite checks, not proofs")
    return "\n".join(lines)
