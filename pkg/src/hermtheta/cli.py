"""Command-line front end.

Exit codes: 0 success, 1 verification failure, 2 usage error,
3 mathematical precondition failure (e.g. a Gram matrix that is not even
or not positive definite).
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import dataclass
from pathlib import Path

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_MATH = 0, 1, 2, 3

log = logging.getLogger("hermtheta")


class UsageError(Exception):
    pass


@dataclass
class JobConfig:
    disc: int = -4
    weight: int | None = None
    trace: int = 8
    prime: int | None = None
    out: Path | None = None
    fmt: str = "table"
    cache_dir: Path | None = None
    external: bool = True
    gram_dir: Path | None = None
    build: bool = False

    @classmethod
    def from_args(cls, a: argparse.Namespace) -> "JobConfig":
        cache = a.cache_dir or os.environ.get("HERMTHETA_CACHE")
        return cls(
            disc=getattr(a, "disc", -4),
            weight=getattr(a, "weight", None),
            trace=a.trace if a.trace is not None else (8 if a.command == "eisenstein" else 6),
            prime=getattr(a, "prime", None),
            out=Path(a.out) if a.out else None,
            fmt=a.format or ("records" if a.command in ("eisenstein", "theta") else "table"),
            cache_dir=Path(cache) if cache else None,
            external=not a.no_external_data,
            gram_dir=Path(a.gram_dir) if getattr(a, "gram_dir", None) else None,
            build=getattr(a, "build_generators", False),
        )


def _emit(cfg: JobConfig, text: str) -> None:
    if cfg.out:
        cfg.out.write_text(text)
    else:
        sys.stdout.write(text)


def _generators(cfg: JobConfig, T: int):
    from .graded_ring import build_generators, load_generators, save_generators

    if cfg.cache_dir and not cfg.build:
        g = load_generators(cfg.cache_dir / f"generators-T{T}", T)
        if g is not None:
            log.info("using cached generators from %s", cfg.cache_dir)
            return g
    if not cfg.build:
        print(f"note: no generator cache for trace {T}; building", file=sys.stderr)
    g = build_generators(T)
    if cfg.cache_dir:
        save_generators(g, cfg.cache_dir / f"generators-T{T}")
    return g


# commands ---------------------------------------------------------------------

def cmd_eisenstein(cfg: JobConfig) -> int:
    from .krieg import KriegParams, krieg_expansion
    from .lambda2 import ndet
    from .number_theory import QuadField
    from .qseries import dumps

    try:
        K = QuadField(cfg.disc)
        P = KriegParams(K, cfg.weight)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    F = krieg_expansion(P, cfg.trace)
    print(f"F_{P.k} over {K}: in_theorem_range={P.in_theorem_range}", file=sys.stderr)
    if cfg.fmt == "records":
        _emit(cfg, dumps(F))
    else:
        lines = [f"{'H':<16} {'ndet':>6}  a(H)"]
        lines += [f"{str(H):<16} {ndet(H):>6}  {v}" for H, v in F.items()]
        _emit(cfg, "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_table(cfg: JobConfig, which: int, golden: str | None) -> int:
    from .graded_ring import GoldenTableError, compare_table, load_golden

    try:
        rows = load_golden(which, Path(golden).read_text() if golden else None)
    except (GoldenTableError, OSError, ValueError) as exc:
        print(f"golden table {which}: {exc}", file=sys.stderr)
        return EXIT_FAIL
    gens = _generators(cfg, 6) if which == 2 else None
    cmp = compare_table(which, rows, gens)
    enumerated = _enumerated_rank8(cfg) if which == 1 else {}
    out = []
    if cfg.fmt == "records":
        for r, vals in cmp.rows:
            out.append(json.dumps({"index": str(r.index), "ndet": r.ndet, "golden": list(r.values),
                                   "computed": [str(v) for v in vals], "equal": tuple(vals) == r.values}))
        for H in cmp.unlisted:
            out.append(json.dumps({"index": str(H), "unlisted_nonzero": True}))
    else:
        out.append(f"table {which}: columns {', '.join(cmp.columns)}")
        for r, vals in cmp.rows:
            flag = "ok" if tuple(vals) == r.values else "MISMATCH"
            line = f"{str(r.index):<14} {r.ndet:>4}  " + "  ".join(str(v) for v in vals)
            if flag != "ok":
                line += "   golden " + "  ".join(str(v) for v in r.values)
            out.append(f"{line}   {flag}")
        for H in cmp.unlisted:
            out.append(f"{str(H):<14} nonzero but unlisted   MISMATCH")
        out.append(f"{len(cmp.rows) - len(cmp.mismatches)}/{len(cmp.rows)} rows equal")
    bad_enum = []
    for label, th in enumerated.items():
        col = 0 if label == "H1" else 1
        for r, _ in cmp.rows:
            if r.index.trace <= th.trace_bound and th[r.index] != r.values[col]:
                bad_enum.append((label, r.index))
        out.append(f"enumerated {label} to trace {th.trace_bound}: "
                   f"{'ok' if not any(l == label for l, _ in bad_enum) else 'MISMATCH'}")
    if which == 1 and not enumerated:
        out.append("(columns derived from the chi8 combinations; no Gram data for enumeration)")
    _emit(cfg, "\n".join(out) + "\n")
    return EXIT_OK if cmp.ok and not bad_enum else EXIT_FAIL


def _enumerated_rank8(cfg: JobConfig) -> dict:
    from .congruence import CheckContext
    from .theta import load_gram, theta_series

    ctx = CheckContext(cfg.trace, cfg.external, cfg.gram_dir)
    out = {}
    for label in ("H1", "H2"):
        p = ctx.gram_path(label)
        if p is not None:
            out[label] = theta_series(load_gram(p), 2)
    return out


def cmd_verify(cfg: JobConfig, check: str) -> int:
    from .congruence import REGISTRY, CheckContext, format_report, run_named_checks

    ids = list(REGISTRY) if check == "all" else [check]
    unknown = [c for c in ids if c not in REGISTRY]
    if unknown:
        raise UsageError(f"unknown check {unknown[0]!r}; choose from {', '.join(REGISTRY)} or 'all'")
    if cfg.trace < 6:
        raise UsageError("verification needs --trace >= 6 (largest Sturm bound used)")
    ctx = CheckContext(cfg.trace, cfg.external, cfg.gram_dir)
    ctx._gens = _generators(cfg, cfg.trace)
    results = run_named_checks(ids, ctx)
    if cfg.fmt == "records":
        _emit(cfg, "".join(json.dumps(r.record()) + "\n" for r in results))
    else:
        _emit(cfg, format_report(results) + "\n")
    return EXIT_OK if all(r.passed for r in results) else EXIT_FAIL


def cmd_theta(cfg: JobConfig, gram: str) -> int:
    from .qseries import dumps
    from .theta import GramError, NotEven, NotPositiveDefinite, load_gram, short_vectors, theta_series

    try:
        G = load_gram(gram)
    except OSError as exc:
        raise UsageError(str(exc)) from None
    except GramError as exc:
        print(f"malformed Gram file: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NotPositiveDefinite as exc:
        print(f"not positive definite: {exc}", file=sys.stderr)
        return EXIT_MATH
    try:
        buckets = short_vectors(G, cfg.trace)
        F = theta_series(G, cfg.trace)
    except (NotEven, NotPositiveDefinite) as exc:
        print(f"precondition failed: {exc}", file=sys.stderr)
        return EXIT_MATH
    for t, vs in buckets.items():
        print(f"half-norm {t}: {len(vs)} vectors", file=sys.stderr)
    if cfg.fmt == "records":
        _emit(cfg, dumps(F))
    else:
        _emit(cfg, "".join(f"{str(H):<16} {v}\n" for H, v in F.items()))
    return EXIT_OK


def cmd_conjecture_scan(cfg: JobConfig) -> int:
    """Exploratory: rank p+1 theta series in the mod p kernel of Theta."""
    from .congruence import theta_kernel_verify
    from .graded_ring import monomial_basis, monomial_exponents, monomial_name, rank8_theta
    from .lambda2 import ndet
    from .number_theory import is_prime, mod_p

    primes = [cfg.prime] if cfg.prime else [7, 11]
    lines = []
    for p in primes:
        if not is_prime(p) or p % 4 != 3 or p < 7:
            raise UsageError(f"conjecture-scan needs a prime p = 3 mod 4, p >= 7 (got {p})")
        k = p + 1
        if k > 24:
            lines.append(f"p={p}: weight {k} is beyond the supported monomial range")
            continue
        T = max(cfg.trace, 6)
        g = _generators(cfg, T)
        basis = monomial_basis(k, T, g)
        # F_p-dimension of the Theta kernel inside the monomial span
        indices = sorted({H for B in basis for H in B.coeffs}, key=lambda H: (H.trace, H.m, H.x, H.y))
        rows = [[mod_p(ndet(H) * B[H], p) for H in indices] for B in basis]
        rk = _rank_mod_p(rows, p)
        lines.append(f"p={p}: weight {k}, {len(basis)} monomials "
                     f"({', '.join(monomial_name(e) for e in monomial_exponents(k))}); "
                     f"Theta-kernel dimension mod {p} at trace <= {T}: {len(basis) - rk}")
        known = {}
        if k == 8:
            known = {f"theta_{lbl}": rank8_theta(lbl, T) for lbl in ("H1", "H2", "H3")}
        elif k == 12:
            known = {"theta_Leech": g.leech}
        for name, F in known.items():
            lines.append(f"    {name}: {theta_kernel_verify(F, p)}")
    _emit(cfg, "\n".join(lines) + "\n")
    return EXIT_OK


def _rank_mod_p(rows: list[list[int]], p: int) -> int:
    rows = [r[:] for r in rows]
    rk = 0
    for c in range(len(rows[0]) if rows else 0):
        piv = next((i for i in range(rk, len(rows)) if rows[i][c] % p), None)
        if piv is None:
            continue
        rows[rk], rows[piv] = rows[piv], rows[rk]
        inv = pow(rows[rk][c], -1, p)
        rows[rk] = [v * inv % p for v in rows[rk]]
        for i in range(len(rows)):
            if i != rk and rows[i][c]:
                f = rows[i][c]
                rows[i] = [(a - f * b) % p for a, b in zip(rows[i], rows[rk])]
        rk += 1
    return rk


# parser -------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--trace", type=int, default=None, help="trace bound (default 8 for eisenstein, 6 otherwise)")
    common.add_argument("--out", help="write the result to this file instead of stdout")
    common.add_argument("--format", choices=("table", "records"),
                        help="records (the expansion file format) is the default for eisenstein and theta")
    common.add_argument("--cache-dir", help="generator cache directory (env HERMTHETA_CACHE)")
    common.add_argument("--no-external-data", action="store_true", help="ignore external Gram files")
    common.add_argument("--gram-dir", help="directory with H1.gram, H2.gram, H3.gram (env HERMTHETA_GRAM_DIR)")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="hermtheta", description="Degree-2 Hermitian modular forms: "
                                "coefficients, tables and mod-p congruence checks.")
    sub = p.add_subparsers(dest="command", required=True)

    e = sub.add_parser("eisenstein", parents=[common], help="Krieg expansion F_{k,K}")
    e.add_argument("--disc", type=int, default=-4, help="fundamental discriminant d_K < 0")
    e.add_argument("--weight", type=int, required=True)

    t = sub.add_parser("table", parents=[common], help="reproduce a golden coefficient table")
    t.add_argument("which", type=int, choices=(1, 2))
    t.add_argument("--golden", help="alternative golden table file")

    v = sub.add_parser("verify", parents=[common], help="run named congruence checks")
    v.add_argument("check", help="check id or 'all'")
    v.add_argument("--build-generators", action="store_true", help="rebuild generators even if cached")

    th = sub.add_parser("theta", parents=[common], help="theta series of a Gram matrix file")
    th.add_argument("gram")

    c = sub.add_parser("conjecture-scan", parents=[common], help="exploratory Theta-kernel scan in weight p+1")
    c.add_argument("--prime", type=int)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        a = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if a.verbose else logging.WARNING, format="%(name)s: %(message)s")
    cfg = JobConfig.from_args(a)
    if cfg.trace < 0:
        print("error: --trace must be nonnegative", file=sys.stderr)
        return EXIT_USAGE
    try:
        if a.command == "eisenstein":
            return cmd_eisenstein(cfg)
        if a.command == "table":
            return cmd_table(cfg, a.which, a.golden)
        if a.command == "verify":
            return cmd_verify(cfg, a.check)
        if a.command == "theta":
            return cmd_theta(cfg, a.gram)
        return cmd_conjecture_scan(cfg)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
