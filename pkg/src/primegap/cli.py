"""``primegap`` command line: subcommand dispatch over the library.

Exit codes: 0 success, 1 validation failure, 2 identity-check failure,
3 I/O failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from fractions import Fraction
from pathlib import Path

from . import arith, equidist, sums, tuples, variational, weights
from .config import RunConfig, parse_config, validate
from .errors import ConfigError, PrimeGapError, ReportIOError
from .report import emit_report

EXIT_OK, EXIT_INVALID, EXIT_CHECK, EXIT_IO = 0, 1, 2, 3


class CheckFailure(Exception):
    """Carries a report whose identity checks did not all pass."""

    def __init__(self, report):
        super().__init__("identity check failed")
        self.report = report


# --- helpers ------------------------------------------------------------------


def _table(limit: int, cfg: RunConfig) -> arith.PrimeTable:
    return arith.cached_prime_table(max(limit, 16), cfg.cache_dir)


def _threads(cfg: RunConfig) -> int:
    return cfg.threads or os.cpu_count() or 1


def _tuple_from(cfg: RunConfig, default_k: int | None = None) -> tuples.Tuple:
    if cfg.tuple is not None:
        return tuples.Tuple(tuple(cfg.tuple))
    if cfg.tuple_file is not None:
        try:
            return tuples.Tuple.load(cfg.tuple_file)
        except OSError as exc:
            raise ReportIOError(f"cannot read tuple file {cfg.tuple_file}: {exc}") from exc
    k = cfg.k or default_k
    if k is None:
        raise ConfigError([(None, "need a tuple or k")])
    if k == 2:
        return tuples.Tuple((0, 2))
    return tuples.shifted_primes_tuple(k, _table(max(20 * k * int(math.log(k + 2)) + 100, 1000), cfg))


def _spec(cfg: RunConfig) -> weights.WeightSpec:
    kind = cfg.kind or "GPY"
    t = tuples.Tuple((0, 2)) if kind == "SelbergTwin" and cfg.tuple is None else _tuple_from(cfg, 2)
    presift = tuples.build_presift(t, cfg.Y or 3.0) if kind == "Maynard" else None
    return weights.WeightSpec(
        kind=kind, tuple=t, D=cfg.D or 100, ell=cfg.ell or 0, omega=cfg.omega, presift=presift
    )


# --- subcommands ------------------------------------------------------------------


def run_tuples(cfg: RunConfig) -> dict:
    if cfg.verify:
        try:
            t = tuples.Tuple.load(cfg.verify)
        except OSError as exc:
            raise ReportIOError(f"cannot read tuple file {cfg.verify}: {exc}") from exc
        table = _table(t.k + 2, cfg)
        bad = tuples.obstruction(t, table)
        report = {"source": cfg.verify, "k": t.k, "diameter": t.diameter, "admissible": bad is None, "obstruction": bad}
        if bad is not None:
            raise CheckFailure(report)
        return report
    k = cfg.k or 105
    window = cfg.window or 1500
    table = _table(max(window, 50 * k) + 2, cfg)
    g = tuples.greedy_tuple(k, window, table)
    s = tuples.shifted_primes_tuple(k, table)
    return {
        "k": k,
        "window": window,
        "greedy": {"h": list(g.h), "diameter": g.diameter, "admissible": tuples.is_admissible(g, table)},
        "shifted_primes": {"h": list(s.h), "diameter": s.diameter, "admissible": tuples.is_admissible(s, table)},
    }


def run_weights(cfg: RunConfig) -> weights.LambdaTable:
    spec = _spec(cfg)
    if spec.kind == "Maynard":
        return weights.lambda_from_eta(weights.eta_from_F(spec))
    return weights.scalar_lambda_table(spec, _table(max(spec.D, 100) + 1, cfg))


def _spec_from_file(path: str, cfg: RunConfig) -> RunConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ReportIOError(f"cannot read spec file {path}: {exc}") from exc
    return parse_config(text, require_command=False).merged(**{k: v for k, v in cfg.as_dict().items() if k != "command"})


def run_sums(cfg: RunConfig) -> sums.SumReport:
    if cfg.spec_file:
        cfg = _spec_from_file(cfg.spec_file, cfg)
    spec = _spec(cfg)
    if cfg.range is not None:
        rng = (cfg.range[0], cfg.range[1])
    else:
        N = cfg.N or 10**4
        rng = (N, 2 * N)
    table = _table(rng[1] + max(spec.tuple.h) + 2, cfg)
    return sums.sum_T2(
        rng,
        spec,
        None,
        table,
        theta=cfg.theta if cfg.theta is not None else 0.5,
        rho=cfg.rho if cfg.rho is not None else 1.0,
        parts=cfg.parts or max(1, _threads(cfg)),
        threads=_threads(cfg),
    )


def run_equidist(cfg: RunConfig) -> equidist.EquidistReport:
    x = cfg.x or 10**5
    table = _table(x + 1, cfg)
    if cfg.omega is not None:
        t = tuples.Tuple(tuple(cfg.tuple)) if cfg.tuple else tuples.Tuple((0, 2))
        return equidist.smooth_moduli_scan(x, cfg.theta or 0.5, cfg.omega, t, table, _threads(cfg))
    if cfg.Q is not None:
        Q = cfg.Q
    else:
        Q = max(1, math.floor(x ** (cfg.theta if cfg.theta is not None else 0.5)))
    return equidist.error_sum_El(x, Q, cfg.l or 1, table, _threads(cfg))


def run_mk(cfg: RunConfig) -> dict:
    cert = variational.mk_lower_bound(cfg.k or 105, cfg.degree if cfg.degree is not None else 11)
    out = {"certificate": cert.to_dict()}
    if cfg.theta is not None:
        m, rho = variational.primes_count_threshold(cfg.theta, cert.bound)
        out["threshold"] = {"theta": cfg.theta, "m": m, "rho": rho}
    return out


def run_verify_appendix(cfg: RunConfig, mutate: bool = False) -> tuple[int, dict]:
    """Run the k = 2 identity suite; returns ``(exit_status, report)``.

    ``mutate`` flips the sign of one lambda before the direct sides are
    evaluated, to confirm that the suite notices a corrupted table.
    """
    t = tuples.Tuple(tuple(cfg.tuple)) if cfg.tuple else tuples.Tuple((0, 2))
    if t.k != 2:
        raise ConfigError([(None, "verify-appendix works with k = 2 tuples")])
    D = cfg.D or 30
    if D > 200:
        raise ConfigError([(None, f"verify-appendix needs D <= 200, got {D}")])
    presift = tuples.build_presift(t, cfg.Y or 3.0)
    spec = weights.WeightSpec("Maynard", t, D, ell=cfg.ell if cfg.ell is not None else 1, presift=presift)
    eta = weights.eta_from_F(spec)
    lam = weights.lambda_from_eta(eta)
    if mutate and lam.entries:
        key = max(lam.entries)
        entries = dict(lam.entries)
        entries[key] = -entries[key]
        lam = weights.LambdaTable(entries, D=lam.D, k=lam.k, Z=lam.Z)

    checks = []

    def check(name, passed, **detail):
        checks.append({"name": name, "passed": bool(passed), "detail": json.dumps(_plain(detail), sort_keys=True)})

    viol = lam.support_violations()
    check("support", not viol, violations=[list(v) for v in viol])

    s0d = sums.s0_direct(lam)
    s0 = sums.s0_eta(eta, presift)
    check("S0 direct = S0 eta", s0d == s0.full, direct=s0d, eta=s0.full)

    back = weights.eta_from_lambda(lam)
    check("eta -> lambda -> eta", back.entries == eta.entries, entries=len(eta.entries))
    again = weights.lambda_from_eta(back)
    check("lambda -> eta -> lambda", again.entries == lam.entries, entries=len(lam.entries))

    s1d = sums.s1_direct(lam)
    eta1 = weights.eta1_table(eta, presift)
    s1e = sums.s1_eta(eta1)
    check("S1 direct = S1 eta", s1d == s1e, direct=s1d, eta=s1e)

    odd = [n for n in range(1, max(D, 50) + 1, 2) if arith.is_squarefree(n)]
    bad = [(d, f) for d in odd for f in odd if (lambda p: p[0] != p[1])(arith.phi_lcm_identity(d, f))]
    check("phi(d)phi(f) = phi([d,f]) sum gamma(u)", not bad, pairs=len(odd) ** 2, failures=bad[:5])

    check(
        "S0 truncation defect <= bound",
        s0.defect <= s0.bound,
        defect=float(s0.defect),
        bound=float(s0.bound),
        measured_constant=s0.measured_constant,
    )
    worst = max(eta1.values(), key=lambda v: v.measured_constant, default=None)
    check(
        "eta1 defect <= bound",
        all(v.discrepancy <= v.bound for v in eta1.values()),
        rows=len(eta1),
        max_measured_constant=worst.measured_constant if worst else 0.0,
        worst_u=worst.u if worst else None,
    )
    status = EXIT_OK if all(c["passed"] for c in checks) else EXIT_CHECK
    report = {"D": D, "Y": presift.Y, "Z": presift.Z, "c0": presift.c0, "tuple": list(t.h), "mutated": mutate, "checks": checks}
    return status, report


def _plain(obj):
    if isinstance(obj, Fraction):
        return f"{obj.numerator}/{obj.denominator}"
    if isinstance(obj, float):
        return float(f"{obj:.12g}")
    if isinstance(obj, dict):
        return {k: _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    return obj


# --- argument parsing ----------------------------------------------------------------


def _int_list(text: str) -> list[int]:
    text = text.strip()
    if text.startswith("["):
        return [int(v) for v in json.loads(text)]
    return [int(v) for v in text.replace(",", " ").split()]


def build_parser() -> argparse.ArgumentParser:
    # global flags may appear before or after the subcommand; SUPPRESS keeps
    # the subparser from overwriting a value given at the top level
    common = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    common.add_argument("--config", help="key = value run configuration")
    common.add_argument("--out", help="output directory")
    common.add_argument("--threads", type=int)
    common.add_argument("--format", choices=["json", "csv"])

    p = argparse.ArgumentParser(prog="primegap", parents=[common], description="Bounded-gap sieve experiments.")
    sub = p.add_subparsers(dest="command")

    s = sub.add_parser("tuples", parents=[common], help="build or verify admissible tuples")
    s.add_argument("--k", type=int)
    s.add_argument("--window", type=int)
    s.add_argument("--verify", help="JSON array file to verify")

    s = sub.add_parser("weights", parents=[common], help="dump a lambda table")
    s.add_argument("--kind", choices=list(weights.KINDS))
    s.add_argument("--k", type=int)
    s.add_argument("--ell", type=int)
    s.add_argument("--D", type=int)
    s.add_argument("--omega", type=float)
    s.add_argument("--tuple", type=_int_list)
    s.add_argument("--Y", type=float)

    s = sub.add_parser("sums", parents=[common], help="weighted sums T1, T2")
    s.add_argument("--range", type=_int_list)
    s.add_argument("--spec-file", dest="spec_file")
    s.add_argument("--rho", type=float)
    s.add_argument("--theta", type=float)

    s = sub.add_parser("equidist", parents=[common], help="primes in progressions error sums")
    s.add_argument("--x", type=int)
    g = s.add_mutually_exclusive_group()
    g.add_argument("--Q", type=int)
    g.add_argument("--theta", type=float)
    s.add_argument("--l", type=int)
    s.add_argument("--omega", type=float)
    s.add_argument("--tuple", type=_int_list)

    s = sub.add_parser("mk", parents=[common], help="certified M_k lower bound")
    s.add_argument("--k", type=int)
    s.add_argument("--degree", type=int)
    s.add_argument("--theta", type=float)

    s = sub.add_parser("verify-appendix", parents=[common], help="k = 2 exact identity suite")
    s.add_argument("--D", type=int)
    s.add_argument("--Y", type=float)
    s.add_argument("--tuple", type=_int_list)
    s.add_argument("--mutate", action="store_true", help="flip one lambda sign (fault injection)")
    return p


def _load_config(path: str | None) -> RunConfig:
    if path is None:
        return RunConfig()
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ReportIOError(f"cannot read config {path}: {exc}") from exc
    return parse_config(text, require_command=False)


RUNNERS = {
    "tuples": run_tuples,
    "weights": run_weights,
    "sums": run_sums,
    "equidist": run_equidist,
    "mk": run_mk,
}


def _emit(name: str, report, cfg: RunConfig, fmt: str) -> list[Path]:
    out = Path(cfg.out or ".")
    echo = cfg.as_dict()
    paths = [emit_report(report, fmt, out / f"{name}.{fmt}", echo)]
    if isinstance(report, sums.SumReport) and fmt == "json":
        paths.append(emit_report(report, "csv", out / f"{name}-partials.csv", echo))
    return paths


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _load_config(getattr(args, "config", None))
        overrides = {k: v for k, v in vars(args).items() if k not in ("config", "mutate")}
        cfg = cfg.merged(**overrides)
        problems = validate(cfg)
        if problems:
            raise ConfigError(problems)
        fmt = cfg.format or ("csv" if cfg.command in ("weights", "equidist") else "json")
        if cfg.command == "verify-appendix":
            status, report = run_verify_appendix(cfg, mutate=getattr(args, "mutate", False))
        else:
            status = EXIT_OK
            try:
                report = RUNNERS[cfg.command](cfg)
            except CheckFailure as exc:
                status, report = EXIT_CHECK, exc.report
        paths = _emit(cfg.command, report, cfg, fmt)
        for path in paths:
            print(path)
        if status == EXIT_CHECK:
            print("identity check failed", file=sys.stderr)
        return status
    except ConfigError as exc:
        print(f"invalid configuration: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except ReportIOError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except PrimeGapError as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
