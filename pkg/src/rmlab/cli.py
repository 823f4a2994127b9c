"""Command-line interface.

Every command emits a single JSON report (schema "rmlab/1") to stdout or
--out.  Exit codes: 0 success, 1 computational failure, 2 invalid instance,
3 a requested certification criterion failed.

Configuration comes from flags, optionally defaulted by a TOML file
(--config); flags always win.  Stabilized series coefficients are cached as
JSON lines keyed by (disc, p, n, code version, precision, depth).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor

from . import __version__
from .eisenstein import (IdealDivisorEngine, LogCache,
                         accelerated_ordinary_projection, diag_coefficient)
from .gsunits import (recognize, unit_from_constant_term,
                      valuation_predictions)
from .lattice import algdep_padic
from .modforms import QSeries, basis_for_level, fit_to_basis
from .padic import PadicContext, PadicScalar, iwasawa_log
from .quadfield import NarrowClassGroup, RMPoint, splitting_type
from .siegelmeasure import phi_DR, poisson_JDR
from .winding import log_Tn_Jw

SCHEMA = "rmlab/1"

EXIT_OK = 0
EXIT_COMPUTE = 1
EXIT_INVALID = 2
EXIT_CRITERION = 3


# --------------------------------------------------------------------------
# config
# --------------------------------------------------------------------------

def read_toml_subset(path: str) -> dict:
    """Minimal TOML reader: top-level (or flattened [section]) key = value
    pairs with integer, string, or bare-word values; comments with #."""
    out = {}
    with open(path) as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line or line.startswith("["):
                continue
            if "=" not in line:
                raise ValueError(f"unparseable config line: {raw.rstrip()}")
            key, val = (s.strip() for s in line.split("=", 1))
            if val.startswith('"') and val.endswith('"'):
                out[key] = val[1:-1]
            else:
                try:
                    out[key] = int(val)
                except ValueError:
                    out[key] = val
    return out


# global-flag defaults; the parser leaves these unset (None) so that an
# explicit flag is distinguishable from a --config value
DEFAULTS = {
    "disc": 12, "p": 5, "form": None, "prec": 32, "nmax": 30,
    "depth": 4, "out": None, "cache_dir": None, "threads": 1, "seed": 0,
}


def apply_config(args: argparse.Namespace):
    """Resolve the global flags: explicit flag, then --config, then the
    built-in default."""
    config = getattr(args, "config", None)
    conf = read_toml_subset(config) if config else {}
    for dest, default in DEFAULTS.items():
        if getattr(args, dest, None) is None:
            setattr(args, dest, conf.get(dest.replace("_", "-"),
                                         conf.get(dest, default)))


# --------------------------------------------------------------------------
# coefficient cache
# --------------------------------------------------------------------------

def cache_path(cache_dir: str) -> str:
    return os.path.join(cache_dir, "coefficients.jsonl")


def cache_load(cache_dir: str | None, D: int, p: int, prec: int,
               depth: int) -> dict:
    found = {}
    if not cache_dir:
        return found
    path = cache_path(cache_dir)
    if not os.path.exists(path):
        return found
    with open(path) as fh:
        for line in fh:
            entry = json.loads(line)
            if (entry["disc"], entry["p"], entry["version"],
                    entry["prec"], entry["depth"]) == \
                    (D, p, __version__, prec, depth):
                found[entry["n"]] = entry["value"]
    return found


def cache_append(cache_dir: str | None, D: int, p: int, prec: int,
                 depth: int, items: dict):
    if not cache_dir or not items:
        return
    os.makedirs(cache_dir, exist_ok=True)
    with open(cache_path(cache_dir), "a") as fh:
        for n, value in sorted(items.items()):
            fh.write(json.dumps({
                "disc": D, "p": p, "n": n, "version": __version__,
                "prec": prec, "depth": depth, "value": value}) + "\n")


# --------------------------------------------------------------------------
# shared pieces
# --------------------------------------------------------------------------

def parse_form(text: str, D: int) -> RMPoint:
    parts = [int(s) for s in text.split(",")]
    if len(parts) != 3:
        raise ValueError("--form must be three comma-separated integers")
    tau = RMPoint(*parts)
    if tau.disc != D:
        raise ValueError(f"form discriminant {tau.disc} != --disc {D}")
    return tau


def parse_matrix(text: str):
    parts = [int(s) for s in text.split(",")]
    if len(parts) != 4:
        raise ValueError("--gamma must be four comma-separated integers")
    return ((parts[0], parts[1]), (parts[2], parts[3]))


def scalar_json(x: PadicScalar) -> dict:
    return x.to_json()


def _coeff_worker(task):
    """Stabilized coefficient for one index, self-contained for process
    pools."""
    D, p, prec, depth, n0 = task
    ctx = PadicContext(p, prec)
    group = NarrowClassGroup(D)
    chi = group.odd_characters()[0]
    engine = IdealDivisorEngine(group, p)
    logs = LogCache(ctx)
    val, cert = accelerated_ordinary_projection(
        lambda k: diag_coefficient(k, chi, engine, ctx, logs),
        n0, p, depth, ctx)
    return n0, val.to_json(), cert.stabilized_at


def stabilized_coefficients(args) -> tuple:
    """(dict n0 -> PadicScalar as JSON, dict n0 -> stabilized_at) for all
    n0 <= nmax coprime to p, using the cache and the process pool."""
    D, p, prec, depth = args.disc, args.p, args.prec, args.depth
    cached = cache_load(args.cache_dir, D, p, prec, depth)
    wanted = [n for n in range(1, args.nmax + 1)
              if n % p and n not in cached]
    stab = {}
    fresh = {}
    if wanted:
        tasks = [(D, p, prec, depth, n0) for n0 in wanted]
        if args.threads > 1:
            with ProcessPoolExecutor(max_workers=args.threads) as pool:
                results = list(pool.map(_coeff_worker, tasks))
        else:
            results = [_coeff_worker(t) for t in tasks]
        for n0, value, at in results:
            fresh[n0] = value
            stab[n0] = at
        cache_append(args.cache_dir, D, p, prec, depth, fresh)
    cached.update(fresh)
    return cached, stab


def series_from_args(args):
    """Generating series, fit, and certificate summary for the instance."""
    ctx = PadicContext(args.p, args.prec)
    group = NarrowClassGroup(args.disc)
    tau = parse_form(args.form, args.disc) if args.form \
        else group.rm_representative(group.identity)
    if splitting_type(args.disc, args.p) != "inert":
        raise ValueError(f"p = {args.p} is not inert in "
                         f"Q(sqrt({args.disc}))")
    if not group.odd_characters():
        zero = QSeries((None,) + (ctx.zero(),) * args.nmax, args.p)
        fit = fit_to_basis(zero, basis_for_level(args.p, args.nmax), ctx)
        return ctx, group, tau, zero, fit, {}
    if group.h != 2:
        raise ValueError("only narrow class number 1 or 2 supported")
    chi = group.odd_characters()[0]
    coeffs_json, stab = stabilized_coefficients(args)
    sign = -chi[group.class_of_rm_point(tau)]
    coeffs = [None] * (args.nmax + 1)
    for n in range(1, args.nmax + 1):
        n0 = n
        while n0 % args.p == 0:
            n0 //= args.p
        coeffs[n] = PadicScalar.from_json(coeffs_json[n0]) * sign
    series = QSeries(tuple(coeffs), args.p)
    fit = fit_to_basis(series, basis_for_level(args.p, args.nmax), ctx)
    return ctx, group, tau, series, fit, stab


def fit_report(fit) -> dict:
    return {
        "a0": scalar_json(fit.a0),
        "basis_coefficients": [scalar_json(c) for c in fit.coefficients],
        "solve_indices": list(fit.solve_indices),
        "residual_valuations": {str(n): v for n, v in fit.residuals.items()},
        "min_residual_valuation": fit.min_residual_valuation,
        "certified": fit.certified,
    }


# --------------------------------------------------------------------------
# commands
# --------------------------------------------------------------------------

def cmd_gtau(args) -> tuple:
    ctx, group, tau, series, fit, stab = series_from_args(args)
    report = {
        "form": list(tau.form),
        "coefficients": {str(n): scalar_json(series.coeffs[n])
                         for n in range(1, args.nmax + 1)},
        "stabilized_at": {str(n): v for n, v in stab.items()},
        "fit": fit_report(fit),
    }
    return report, EXIT_OK


def cmd_verify(args) -> tuple:
    ctx, group, tau, series, fit, stab = series_from_args(args)
    bar = args.threshold if args.threshold is not None else args.prec - 5
    ok = fit.min_residual_valuation is None \
        or fit.min_residual_valuation >= bar
    report = {
        "form": list(tau.form),
        "fit": fit_report(fit),
        "threshold": bar,
        "passed": ok,
    }
    return report, EXIT_OK if ok else EXIT_CRITERION


def cmd_recognize(args) -> tuple:
    ctx, group, tau, series, fit, stab = series_from_args(args)
    tau_class = group.class_of_rm_point(tau)
    candidates = unit_from_constant_term(fit.a0, group, tau_class, ctx)
    rec = recognize(candidates, group, tau_class, ctx,
                    degree=args.degree, budget=args.budget)
    report = {
        "form": list(tau.form),
        "a0": scalar_json(fit.a0),
        "predicted_valuations": {
            str(s): [v.numerator, v.denominator]
            for s, v in valuation_predictions(group, tau_class).items()},
        "polynomial": list(rec.polynomial) if rec.polynomial else None,
        "twist": rec.twist,
        "newton_ok": rec.newton_ok,
        "reciprocal_ok": rec.reciprocal_ok,
        "split_fraction": rec.split_fraction,
        "matches": [[t, list(c)] for t, c in rec.matches],
        "recognized": rec.recognized,
    }
    return report, EXIT_OK if rec.recognized else EXIT_CRITERION


def cmd_winding(args) -> tuple:
    ctx = PadicContext(args.p, args.prec)
    group = NarrowClassGroup(args.disc)
    tau = parse_form(args.form, args.disc) if args.form \
        else group.rm_representative(group.identity)
    value = log_Tn_Jw(tau, args.n, args.p, ctx, group)
    report = {"form": list(tau.form), "n": args.n,
              "log_TnJw": scalar_json(value)}
    return report, EXIT_OK


def cmd_phi_dr(args) -> tuple:
    gamma = parse_matrix(args.gamma)
    report = {"gamma": [list(r) for r in gamma],
              "phi_DR": phi_DR(gamma, args.p)}
    return report, EXIT_OK


def cmd_jdr(args) -> tuple:
    ctx = PadicContext(args.p, args.prec)
    group = NarrowClassGroup(args.disc)
    tau = parse_form(args.form, args.disc) if args.form \
        else group.rm_representative(group.identity)
    value = poisson_JDR(tau, args.level, ctx)
    report = {"form": list(tau.form), "level": args.level,
              "JDR": scalar_json(value),
              "log_JDR": scalar_json(iwasawa_log(value))}
    return report, EXIT_OK


def cmd_fit(args) -> tuple:
    ctx = PadicContext(args.p, args.prec)
    if args.series:
        with open(args.series) as fh:
            data = json.load(fh)
    else:
        data = json.load(sys.stdin)
    coeffs = [None if c is None else PadicScalar.from_json(c)
              for c in data["coefficients"]]
    series = QSeries(tuple(coeffs), args.p)
    fit = fit_to_basis(series, basis_for_level(args.p, series.n_max), ctx)
    return {"fit": fit_report(fit)}, EXIT_OK


def cmd_algdep(args) -> tuple:
    ctx = PadicContext(args.p, args.prec)
    a0, a1, v = (int(s) for s in args.value.split(","))
    x = ctx.from_coords(a0, a1, v)
    res = algdep_padic(x, args.degree, args.budget)
    poly = list(res.coefficients) if res.found else None
    while poly and poly[-1] == 0:
        poly.pop()
    report = {
        "value": scalar_json(x),
        "polynomial": poly,
        "height": res.height,
        "margin": res.margin,
        "found": res.found,
    }
    return report, EXIT_OK if res.found else EXIT_CRITERION


# --------------------------------------------------------------------------
# entry point
# --------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    # the global flags live on a parent parser with SUPPRESS defaults so
    # they are accepted both before and after the subcommand without the
    # subparser's defaults clobbering values parsed by the main parser
    common = argparse.ArgumentParser(add_help=False,
                                     argument_default=argparse.SUPPRESS)
    common.add_argument("--config", help="TOML file with flag defaults")
    common.add_argument("--disc", type=int,
                        help="fundamental discriminant D > 0 (default 12)")
    common.add_argument("--p", type=int,
                        help="prime, inert in Q(sqrt(D)) (default 5)")
    common.add_argument("--form", help="RM point as A,B,C")
    common.add_argument("--prec", type=int,
                        help="working p-adic precision (default 32)")
    common.add_argument("--nmax", type=int,
                        help="q-expansion truncation (default 30)")
    common.add_argument("--depth", type=int,
                        help="extrapolation depth for ordinary projection "
                             "(default 4)")
    common.add_argument("--out", help="write the JSON report here")
    common.add_argument("--cache-dir", dest="cache_dir",
                        help="coefficient cache directory")
    common.add_argument("--threads", type=int)
    common.add_argument("--seed", type=int,
                        help="seed for randomized subroutines")

    parser = argparse.ArgumentParser(
        prog="rmlab",
        description="p-adic generating series at RM points and the units "
                    "they encode",
        parents=[common])

    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("gtau", parents=[common],
                   help="generating series and its modular fit")
    verify = sub.add_parser("verify", parents=[common],
                            help="certify the overdetermined fit")
    verify.add_argument("--threshold", type=int,
                        help="required residual valuation (default prec-5)")
    rec = sub.add_parser("recognize-unit", parents=[common],
                         help="minimal polynomial of the encoded unit")
    rec.add_argument("--degree", type=int, default=4)
    rec.add_argument("--budget", type=int, default=20)
    winding = sub.add_parser("winding", parents=[common],
                             help="one RM value of the winding cocycle")
    winding.add_argument("--n", type=int, default=1)
    phi = sub.add_parser("phi-dr", parents=[common],
                         help="the homomorphism phi_DR on Gamma_0(p)")
    phi.add_argument("--gamma", required=True, help="matrix as a,b,c,d")
    jdr = sub.add_parser("jdr", parents=[common],
                         help="Poisson-product value of J_DR")
    jdr.add_argument("--level", type=int, default=3)
    fit = sub.add_parser("fit", parents=[common],
                         help="fit a stored series to the modular basis")
    fit.add_argument("--series", help="JSON file (default: stdin)")
    alg = sub.add_parser("algdep", parents=[common],
                         help="integer polynomial vanishing at a p-adic "
                              "value")
    alg.add_argument("--value", required=True, help="scalar as u0,u1,val")
    alg.add_argument("--degree", type=int, default=4)
    alg.add_argument("--budget", type=int, default=20)
    return parser


HANDLERS = {
    "gtau": cmd_gtau,
    "verify": cmd_verify,
    "recognize-unit": cmd_recognize,
    "winding": cmd_winding,
    "phi-dr": cmd_phi_dr,
    "jdr": cmd_jdr,
    "fit": cmd_fit,
    "algdep": cmd_algdep,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        apply_config(args)
    except (OSError, ValueError) as exc:
        print(json.dumps({"schema": SCHEMA, "error": str(exc),
                          "exit_code": EXIT_INVALID}))
        return EXIT_INVALID
    base = {
        "schema": SCHEMA,
        "version": __version__,
        "command": args.command,
        "disc": args.disc,
        "p": args.p,
        "prec": args.prec,
        "nmax": args.nmax,
        "seed": args.seed,
    }
    try:
        report, code = HANDLERS[args.command](args)
    except (ValueError, NotImplementedError) as exc:
        report, code = {"error": str(exc)}, EXIT_INVALID
    except (ArithmeticError, OverflowError) as exc:
        report, code = {"error": str(exc)}, EXIT_COMPUTE
    base.update(report)
    base["exit_code"] = code
    text = json.dumps(base, indent=2, sort_keys=True)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
