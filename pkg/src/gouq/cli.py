"""Command-line front end: ``gouq <subcommand> [flags]``.

Verdicts and reports are JSON, grids and samples CSV. Every output carries
a metadata header (version, subcommand, parameters, seed) and is written only
after the computation succeeded.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile
from fractions import Fraction

import numpy as np

from . import __version__
from .continuity import (
    catalog_certificate,
    certify_pisot,
    classify_continuity,
    dim_bound,
    power_singularity_threshold,
    trace_identity_check,
)
from .divisibility import classify_mu_id, classify_rho_id, classify_sym_id, katti
from .errors import GouqError, NotPisot, UncertifiedRoots
from .mu import SeriesSampler, certify_negative_atom, mu_cf, mu_levy_measure, mu_sample
from .params import CValue, ModelParams, RawRates, as_c, normalize
from .rho import rho_entropy, rho_pmf, rho_power_entropy
from .simulate import simulate_path, validate_innovation_law, validate_series_equivalence

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_STOCHASTIC = 3


class UsageError(Exception):
    pass


def _parse_poly(text):
    try:
        return [int(x) for x in text.replace(" ", "").split(",") if x]
    except ValueError:
        raise UsageError(f"--pisot-poly must be comma-separated integers, got {text!r}")


def resolve_c(args, required=True):
    if args.c_num is not None:
        return CValue.rational(int(args.c_num), int(args.c_den or 1))
    if args.c is None:
        if required:
            raise UsageError("--c (or --c-num/--c-den) is required")
        return None
    if args.pisot_poly:
        c = as_c(args.c)
        if c.kind == "float":
            return CValue.algebraic(c.value, _parse_poly(args.pisot_poly))
        return c
    return as_c(args.c)


def resolve_params(args, c_required=True) -> ModelParams:
    c = resolve_c(args, required=c_required)
    if c is None:
        c = CValue.rational(2)  # placeholder for c-independent quantities
    if any(x is not None for x in (args.u, args.v, args.w)):
        raw = RawRates(*(Fraction(x) if x is not None else 0 for x in (args.u, args.v, args.w)))
        return normalize(raw, c)
    vals = {k: getattr(args, k) for k in ("p", "q", "r")}
    if sum(v is not None for v in vals.values()) < 2:
        raise UsageError("give two of --p/--q/--r, or --u/--v/--w")
    return ModelParams.create(c, **{k: Fraction(v) if v is not None else None for k, v in vals.items()})


def resolve_raw(args) -> RawRates:
    if any(x is not None for x in (args.u, args.v, args.w)):
        return RawRates(*(Fraction(x) if x is not None else 0 for x in (args.u, args.v, args.w)))
    params = resolve_params(args)
    return RawRates(*params.exact) if params.exact else RawRates(params.p, params.q, params.r)


def resolve_seed(args) -> int:
    if args.seed is not None:
        return int(args.seed)
    env = os.environ.get("GOUQ_SEED")
    return int(env) if env else 0


def _meta(args, params=None, seed=None):
    out = {"tool": "gouq", "version": __version__, "subcommand": args.cmd}
    if params is not None:
        out["params"] = params.to_dict()
        if args.c is None and args.c_num is None:
            out["params"]["c"] = None
    if seed is not None:
        out["seed"] = seed
    return out


def _jsonable(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        return str(obj)
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.generic):
        return _jsonable(obj.item())
    return obj


def render_json(meta, body) -> str:
    return json.dumps(_jsonable({"meta": meta, **body}), indent=2, sort_keys=False) + "\n"


def render_csv(meta, header, rows) -> str:
    lines = [f"# {json.dumps(_jsonable(meta), sort_keys=True)}", ",".join(header)]
    for row in rows:
        lines.append(",".join(repr(float(x)) if isinstance(x, (float, np.floating)) else str(x) for x in row))
    return "\n".join(lines) + "\n"


def emit(text: str, out):
    if not out or out == "-":
        sys.stdout.write(text)
        return
    directory = os.path.dirname(os.path.abspath(out))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".gouq-")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, out)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# --- subcommands -------------------------------------------------------------

def cmd_classify(args):
    params = resolve_params(args)
    cert = None
    if args.pisot_poly:
        try:
            cert = certify_pisot(params.c, _parse_poly(args.pisot_poly))
        except (NotPisot, UncertifiedRoots):
            cert = None
    verdicts = {
        "id_rho": classify_rho_id(params),
        "id_mu": classify_mu_id(params),
        "id_sym": classify_sym_id(params),
    }
    cont = classify_continuity(params, cert, ps_assumption=args.ps_assumption)
    body = {k: v.decision.value for k, v in verdicts.items()}
    body["continuity"] = cont.decision.value
    body["dim_bound"] = dim_bound(params) if params.q > 0 else None
    body["reasons"] = {k: v.to_dict() for k, v in verdicts.items()}
    body["reasons"]["continuity"] = cont.to_dict()
    return render_json(_meta(args, params), body), EXIT_OK


def cmd_cf(args):
    params = resolve_params(args)
    lo, hi, steps = args.zmin, args.zmax, args.steps
    if not (math.isfinite(lo) and math.isfinite(hi)) or hi < lo or steps < 1:
        raise UsageError("need finite --zmin <= --zmax and --steps >= 1")
    z = np.linspace(lo, hi, steps)
    vals = mu_cf(params, z, tol=args.tol)
    rows = [(zz, v.real, v.imag, abs(v)) for zz, v in zip(z, vals)]
    meta = _meta(args, params)
    if args.format == "json":
        return render_json(meta, {"rows": [list(r) for r in rows]}), EXIT_OK
    return render_csv(meta, ["z", "re", "im", "abs"], rows), EXIT_OK


def cmd_sample(args):
    params = resolve_params(args)
    seed = resolve_seed(args)
    sampler = SeriesSampler(params, args.depth, seed, args.stream)
    x = mu_sample(sampler, args.n)
    meta = _meta(args, params, seed)
    meta["truncation_bound"] = sampler.truncation_bound()
    if args.format == "json":
        return render_json(meta, {"samples": x.tolist()}), EXIT_OK
    return render_csv(meta, ["x"], [(v,) for v in x]), EXIT_OK


def cmd_simulate(args):
    raw = resolve_raw(args)
    c = resolve_c(args)
    seed = resolve_seed(args)
    meta = _meta(args, seed=seed)
    meta["rates"] = [str(raw.u), str(raw.v), str(raw.w)]
    meta["c"] = c.to_dict()
    if args.validate == "innovation":
        rep = validate_innovation_law(raw, c, args.n, seed)
    elif args.validate == "series":
        rep = validate_series_equivalence(raw, c, args.n, seed)
    else:
        res = simulate_path(raw, c, args.horizon, seed)
        if args.format == "json":
            body = {
                "y_at_T": res.y_at_T,
                "partial_integral": res.partial_integral,
                "jumps_used": res.jumps_used,
                "truncation_bound": res.truncation_bound,
            }
            return render_json(meta, body), EXIT_OK
        return f"# {json.dumps(_jsonable(meta), sort_keys=True)}\n" + res.to_csv(c), EXIT_OK
    return render_json(meta, {"report": rep.to_dict()}), EXIT_OK if rep.passed else EXIT_STOCHASTIC


def cmd_katti(args):
    params = resolve_params(args, c_required=False)
    nmax = args.n
    seq = katti(rho_pmf(params, max(nmax, 1)), nmax)
    meta = _meta(args, params)
    if args.format == "csv":
        return render_csv(meta, ["k", "q_k"], [(k + 1, v) for k, v in enumerate(seq.coefficients)]), EXIT_OK
    return render_json(meta, seq.to_dict()), EXIT_OK


def cmd_levy(args):
    params = resolve_params(args)
    measure = mu_levy_measure(params, args.nmax, args.mmax)
    body = {"mode": measure.mode, "atoms": measure.to_records()}
    if args.location is not None:
        cert = certify_negative_atom(params, Fraction(args.location), args.nmax, args.mmax, strict=False)
        body["certificate"] = cert.to_dict()
    return render_json(_meta(args, params), body), EXIT_OK


def cmd_entropy(args):
    params = resolve_params(args, c_required=False)
    body = {"entropy": rho_entropy(params)}
    if args.t is not None:
        pe = rho_power_entropy(params, args.t)
        body["t"] = args.t
        body["power_entropy"] = pe.entropy
        body["power_entropy_bound"] = pe.bound
    return render_json(_meta(args, params), body), EXIT_OK


def cmd_tevolution(args):
    params = resolve_params(args)
    cert = None
    if args.pisot_poly:
        cert = certify_pisot(params.c, _parse_poly(args.pisot_poly))
    res = power_singularity_threshold(params, cert)
    return render_json(_meta(args, params), res.to_dict()), EXIT_OK


def cmd_pisot(args):
    c = resolve_c(args)
    if args.pisot_poly:
        poly = _parse_poly(args.pisot_poly)
        try:
            cert = certify_pisot(c, poly)
        except (NotPisot, UncertifiedRoots) as exc:
            return render_json(_meta(args), {"pisot": False, "error": type(exc).__name__, "reason": str(exc)}), EXIT_OK
    else:
        cert = catalog_certificate(c)
        if cert is None:
            return render_json(_meta(args), {"pisot": False, "error": "NoCertificate",
                                             "reason": "not in the built-in catalog; pass --pisot-poly"}), EXIT_OK
    rows = trace_identity_check(cert, args.n)
    body = {
        "pisot": True,
        "certificate": cert.to_dict(),
        "trace_check": [{"n": n, "exact": e, "numeric": v.real, "bound": b, "ok": ok} for n, e, v, b, ok in rows],
    }
    return render_json(_meta(args), body), EXIT_OK


COMMANDS = {
    "classify": cmd_classify,
    "cf": cmd_cf,
    "sample": cmd_sample,
    "simulate": cmd_simulate,
    "katti": cmd_katti,
    "levy": cmd_levy,
    "entropy": cmd_entropy,
    "tevolution": cmd_tevolution,
    "pisot": cmd_pisot,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("model")
    g.add_argument("--c", help="scale c > 1 (integer strings are exact, decimals are floats)")
    g.add_argument("--c-num", type=int, help="numerator of a rational c")
    g.add_argument("--c-den", type=int, help="denominator of a rational c")
    g.add_argument("--pisot-poly", help='monic integer polynomial for c, e.g. "1,-1,-1"')
    for name in ("p", "q", "r", "u", "v", "w"):
        g.add_argument(f"--{name}", type=str)
    o = common.add_argument_group("run")
    o.add_argument("--tol", type=float, default=1e-12)
    o.add_argument("--seed", type=int, help="falls back to $GOUQ_SEED, then 0")
    o.add_argument("--n", type=int, default=None)
    o.add_argument("--out", help="output file (default stdout)")
    o.add_argument("--format", choices=("csv", "json"), default=None)

    parser = argparse.ArgumentParser(prog="gouq", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("classify", parents=[common], help="infinite divisibility and continuity verdicts")
    p.add_argument("--ps-assumption", action="store_true")
    p = sub.add_parser("cf", parents=[common], help="characteristic function of mu on a grid")
    p.add_argument("--zmin", type=float, default=-20.0)
    p.add_argument("--zmax", type=float, default=20.0)
    p.add_argument("--steps", type=int, default=401)
    p = sub.add_parser("sample", parents=[common], help="Monte Carlo draws of mu")
    p.add_argument("--depth", type=int, default=None)
    p.add_argument("--stream", type=int, default=0)
    p = sub.add_parser("simulate", parents=[common], help="process paths and validations")
    p.add_argument("--horizon", type=int, default=20, help="N-jumps per path")
    p.add_argument("--validate", choices=("path", "innovation", "series"), default="path")
    sub.add_parser("katti", parents=[common], help="Katti coefficients of rho")
    p = sub.add_parser("levy", parents=[common], help="signed Levy measure of mu")
    p.add_argument("--nmax", type=int, default=30)
    p.add_argument("--mmax", type=int, default=200)
    p.add_argument("--location", help="certify the sign of the atom at this (rational) location")
    p = sub.add_parser("entropy", parents=[common], help="entropy of rho (and of rho^{t*})")
    p.add_argument("--t", type=float, default=None)
    sub.add_parser("tevolution", parents=[common], help="time threshold for singular mu^{t*}")
    sub.add_parser("pisot", parents=[common], help="Pisot certificate for c")
    return parser


_DEFAULTS = {
    "classify": {"format": "json"},
    "cf": {"format": "csv"},
    "sample": {"format": "csv", "n": 1000},
    "simulate": {"format": "csv", "n": 10 ** 5},
    "katti": {"format": "json", "n": 20},
    "levy": {"format": "json"},
    "entropy": {"format": "json"},
    "tevolution": {"format": "json"},
    "pisot": {"format": "json", "n": 30},
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    for key, val in _DEFAULTS[args.cmd].items():
        if getattr(args, key, None) is None:
            setattr(args, key, val)
    try:
        text, code = COMMANDS[args.cmd](args)
    except (UsageError, GouqError, ValueError, ZeroDivisionError) as exc:
        print(f"gouq {args.cmd}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INVALID
    emit(text, args.out)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())


def main_entry():  # console-script hook
    sys.exit(main())
