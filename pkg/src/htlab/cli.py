"""Command-line front end.

Every subcommand is turned into an experiment config (``{"kind", "params",
"out", "seed"}``) and handed to :func:`run`, so ``htlab run --config FILE``
and the flag-driven subcommands go through the same code.

Exit codes: 0 ok, 1 invalid config, 2 numerical failure, 3 resource bound.
"""

from __future__ import annotations

import argparse
import copy
import csv
import io
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .besov import norm_with_error
from .dixmier import (
    DISCLAIMER,
    JUW_CONSTANTS,
    extrapolated_trace_bracket,
    juw_trace,
    log_grid,
    measurability_report,
    trace_bracket,
)
from .errors import NumericalError, ResourceError
from .hankel import SingularSpectrum, hankel_matrix, schatten_norm, singular_values
from .lorentz import PsiFunction, default_h_grid, extrapolation_functional, harmonic_norm_curve, spectrum_norm_curve
from .symbols import FourierSymbol, lacunary, monomial
from .witness import H0Spec, oscillation_report, witness_coefficients, witness_symbol

KINDS = ("besov", "hankel", "juw-check", "extrapolate", "dixmier", "witness")
JUW_TOL = 1e-5


class ConfigError(ValueError):
    pass


# ---------------------------------------------------------------------------
# input resolution


def resolve_symbol(spec, rng: np.random.Generator) -> FourierSymbol:
    """Symbol from a config value.

    Accepts a path to symbol JSON, an inline ``{"coeffs": ...}`` object,
    ``{"monomial": n}``, ``{"lacunary": {"p": .., "c": [..]}}`` or
    ``{"random": {"degree": d}}`` (real coefficients in [-1, 1], seeded).
    """
    if spec is None:
        raise ConfigError("a symbol is required")
    if isinstance(spec, str):
        return FourierSymbol.from_json(json.loads(Path(spec).read_text()))
    if "coeffs" in spec:
        return FourierSymbol.from_json(spec)
    if "monomial" in spec:
        return monomial(int(spec["monomial"]))
    if "lacunary" in spec:
        lac = spec["lacunary"]
        return lacunary(float(lac["p"]), lac["c"], lac.get("J"))
    if "random" in spec:
        d = int(spec["random"]["degree"])
        return FourierSymbol.from_real(rng.uniform(-1.0, 1.0, d), start=1)
    raise ConfigError(f"unrecognized symbol spec {spec!r}")


def read_spectrum_csv(path: str) -> np.ndarray:
    """Singular values from CSV: one value per row, or ``k,mu`` rows; headers skipped."""
    vals = []
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            if not row or row[0].startswith("#"):
                continue
            try:
                vals.append(float(row[-1]))
            except ValueError:
                continue  # header
    return np.asarray(vals, dtype=float)


def resolve_spectrum(spec, exact: bool) -> SingularSpectrum:
    if isinstance(spec, str):
        vals = read_spectrum_csv(spec)
    elif isinstance(spec, dict) and "harmonic" in spec:
        vals = 1.0 / np.arange(1, int(spec["harmonic"]) + 1)
    else:
        vals = np.asarray(spec, dtype=float)
    return SingularSpectrum(np.sort(vals)[::-1], exact=exact)


# ---------------------------------------------------------------------------
# experiments; each returns (result dict, {csv name: (header, rows)})


def _exp_besov(p, rng):
    f = resolve_symbol(p.get("symbol"), rng)
    norm = p.get("norm", "lp")
    q = float(p.get("q", 2.0))
    value, err = norm_with_error(norm, f, q, p.get("grid"))
    return {"norm": norm, "q": q, "norm_value": value, "quadrature_error_estimate": err}, {}


def _exp_hankel(p, rng):
    f = resolve_symbol(p.get("symbol"), rng)
    N = int(p.get("dim") or max(f.degree, 1))
    s = singular_values(hankel_matrix(f, N))
    qs = p.get("q", [1.0, 2.0])
    schatten = {f"{float(q):g}": schatten_norm(s, float(q)) for q in qs}
    rows = [(k, float(mu)) for k, mu in enumerate(s.values)]
    return {"dim": N, "exact": s.exact, "schatten": schatten}, {"hankel_spectrum.csv": (("k", "mu"), rows)}


def _exp_juw(p, rng):
    f = resolve_symbol(p.get("symbol"), rng)
    power = p.get("p", 2)
    if power not in JUW_CONSTANTS:
        raise ConfigError(
            f"juw-check p={power}: the identity holds only for p in {{2, 4, 6}}, the only possible values"
        )
    grid = p.get("grid")
    s = singular_values(hankel_matrix(f, max(f.degree, 1)))
    lhs = s.power_sum(float(power))
    rhs = juw_trace(f, power, grid)
    relerr = abs(lhs - rhs) / max(1.0, abs(lhs))
    out = {"p": power, "lhs": lhs, "rhs": rhs, "relerr": relerr, "tol": JUW_TOL}
    if relerr > JUW_TOL:
        raise NumericalError(f"trace identity mismatch {relerr:.3g} > {JUW_TOL}: {out}")
    return out, {}


def _exp_extrapolate(p, rng):
    psi = PsiFunction.parse(p.get("psi", "log"))
    power = float(p.get("p", 1.0))
    h_grid = default_h_grid(float(p.get("hmin", 2.0**-16)))
    if p.get("harmonic"):
        curve = harmonic_norm_curve()
    else:
        curve = spectrum_norm_curve(resolve_spectrum(p.get("spectrum"), bool(p.get("exact", False))))
    res = extrapolation_functional(curve, psi, power, h_grid)
    return res.to_dict(), {"extrapolation.csv": (("h", "v"), res.to_dict()["per_h"])}


def _exp_dixmier(p, rng):
    psi = PsiFunction.parse(p.get("psi", "log"))
    power = float(p.get("p", 1.0))
    method = p.get("method", "spectrum")
    tol = float(p.get("tol", 0.05))
    if method == "juw":
        f = resolve_symbol(p.get("symbol"), rng)
        if int(power) not in JUW_CONSTANTS or power != int(power):
            raise ConfigError(f"method juw needs p in {{2, 4, 6}}, the only possible values; got {power}")
        from .besov import _si_integral, default_nodes

        grid = int(p.get("grid") or default_nodes(f))
        cp = JUW_CONSTANTS[int(power)]

        def curve(q):
            return (cp * _si_integral(f, q, grid)) ** (1.0 / q) if not f.is_zero else 0.0

        b = extrapolated_trace_bracket(curve, psi, power, default_h_grid(float(p.get("hmin", 2.0**-16))), tol)
    else:
        if "symbol" in p:
            f = resolve_symbol(p["symbol"], rng)
            s = singular_values(hankel_matrix(f, int(p.get("dim") or max(f.degree, 1))))
        elif p.get("harmonic"):
            s = None
        else:
            s = resolve_spectrum(p.get("spectrum"), bool(p.get("exact", False)))
        if method == "spectrum":
            if s is None:
                s = resolve_spectrum({"harmonic": p["harmonic"]}, False)
            b = trace_bracket(s, psi, power, log_t=log_grid(int(p.get("grid_depth", 8))), tol=tol)
        elif method == "extrapolate":
            curve = harmonic_norm_curve() if s is None else s
            b = extrapolated_trace_bracket(curve, psi, power, default_h_grid(float(p.get("hmin", 2.0**-16))), tol)
        else:
            raise ConfigError(f"unknown dixmier method {method!r}")
    rep = measurability_report(b)
    return {
        "bracket": [b.lo, b.hi],
        "verdict": rep["verdict"],
        "gap": rep["gap"],
        "grid": b.grid_description(),
        "trend": b.trend,
        "details": b.to_dict(),
    }, {}


def _exp_witness(p, rng):
    psi = PsiFunction.parse(p.get("psi", "log"))
    power = float(p.get("p", 1.0))
    h0 = H0Spec(
        p.get("h0", "sin"),
        float(p.get("amplitude", 1.0)),
        float(p.get("phase", 0.0)),
        float(p.get("offset", 0.0)),
    )
    rep = oscillation_report(psi, h0, power, tmax=float(p.get("tmax", 1e6)))
    out = rep.to_dict()
    J = p.get("J")
    if J:
        f = witness_symbol(psi, h0, power, int(J))
        out["symbol"] = f.to_json()
        out["coefficients"] = witness_coefficients(psi, h0, power, int(J)).tolist()
    return out, {"witness.csv": (("t", "R", "h_plus_C", "residual"), list(rep.rows()))}


_DISPATCH = {
    "besov": _exp_besov,
    "hankel": _exp_hankel,
    "juw-check": _exp_juw,
    "extrapolate": _exp_extrapolate,
    "dixmier": _exp_dixmier,
    "witness": _exp_witness,
}


# ---------------------------------------------------------------------------
# reports


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else repr(v)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def dumps(obj) -> str:
    return json.dumps(_clean(obj), sort_keys=True, indent=2) + "\n"


def format_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(float(x)) if isinstance(x, float) else x for x in row])
    return buf.getvalue()


def validate(config: dict) -> dict:
    if not isinstance(config, dict):
        raise ConfigError("config must be a JSON object")
    kind = config.get("kind")
    if kind not in KINDS:
        raise ConfigError(f"kind must be one of {KINDS}, got {kind!r}")
    params = config.get("params", {})
    if not isinstance(params, dict):
        raise ConfigError("params must be an object")
    return {
        "kind": kind,
        "params": copy.deepcopy(params),
        "out": config.get("out"),
        "seed": int(config.get("seed", 0)),
    }


def run(config: dict, stdout=None) -> int:
    """Run one experiment; write ``<kind>.json`` (+ CSV series) under ``out``."""
    stdout = sys.stdout if stdout is None else stdout
    try:
        cfg = validate(config)
        rng = np.random.default_rng(cfg["seed"])
        result, series = _DISPATCH[cfg["kind"]](cfg["params"], rng)
        code, status = 0, "ok"
    except (ConfigError, ValueError, KeyError, TypeError, FileNotFoundError, json.JSONDecodeError) as exc:
        print(f"htlab: invalid config: {exc}", file=sys.stderr)
        return 1
    except NumericalError as exc:
        print(f"htlab: numerical failure: {exc}", file=sys.stderr)
        return 2
    except (ResourceError, MemoryError) as exc:
        print(f"htlab: resource bound exceeded: {exc}", file=sys.stderr)
        return 3
    report = {
        "tool": "htlab",
        "version": __version__,
        "config": cfg,
        "status": status,
        "disclaimer": DISCLAIMER,
        "result": result,
    }
    text = dumps(report)
    stdout.write(text)
    if cfg["out"]:
        out = Path(cfg["out"])
        out.mkdir(parents=True, exist_ok=True)
        (out / f"{cfg['kind']}.json").write_text(text)
        for name, (header, rows) in series.items():
            (out / name).write_text(format_csv(header, rows))
    return code


# ---------------------------------------------------------------------------
# argument parsing


def _symbol_arg(value: str):
    """``--symbol`` takes a JSON file path or inline JSON."""
    value = value.strip()
    return json.loads(value) if value.startswith("{") else value


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="htlab", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"htlab {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--out", help="directory for report files")
        p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("run", help="run an experiment from a JSON config")
    p.add_argument("--config", required=True)
    p.add_argument("--out")

    p = sub.add_parser("besov", help="Besov norm of a symbol")
    p.add_argument("--symbol", type=_symbol_arg, required=True)
    p.add_argument("--norm", choices=("lp", "disc", "si"), default="lp")
    p.add_argument("--q", type=float, default=2.0)
    p.add_argument("--grid", type=int)
    common(p)

    p = sub.add_parser("hankel", help="Hankel singular values and Schatten norms")
    p.add_argument("--symbol", type=_symbol_arg, required=True)
    p.add_argument("--dim", type=int)
    p.add_argument("--q", type=float, nargs="+", default=[1.0, 2.0])
    common(p)

    p = sub.add_parser("juw-check", help="exact trace identity for p = 2, 4, 6")
    p.add_argument("--symbol", type=_symbol_arg, required=True)
    p.add_argument("--p", type=int, default=2)
    p.add_argument("--grid", type=int)
    common(p)

    def psi_args(p):
        p.add_argument("--psi", default="log", help="'log' or 'logpow:BETA'")
        p.add_argument("--p", type=float, default=1.0)
        p.add_argument("--hmin", type=float, default=2.0**-16)

    p = sub.add_parser("extrapolate", help="extrapolation functional of a spectrum")
    psi_args(p)
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--spectrum", help="CSV of singular values")
    src.add_argument("--harmonic", action="store_true", help="use diag(1/(k+1))")
    p.add_argument("--exact", action="store_true", help="spectrum is the complete spectrum")
    common(p)

    p = sub.add_parser("dixmier", help="Dixmier-trace bracket and measurability verdict")
    p.add_argument("--method", choices=("spectrum", "extrapolate", "juw"), default="spectrum")
    psi_args(p)
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--symbol", type=_symbol_arg)
    src.add_argument("--spectrum")
    src.add_argument("--harmonic", type=int, metavar="N", help="diag(1/(k+1)) with N terms")
    p.add_argument("--exact", action="store_true")
    p.add_argument("--grid-depth", type=int, default=8)
    p.add_argument("--grid", type=int, help="torus grid for --method juw")
    p.add_argument("--tol", type=float, default=0.05)
    common(p)

    p = sub.add_parser("witness", help="non-measurable witness certificate")
    p.add_argument("--h0", choices=("sin", "cos", "const"), default="sin")
    p.add_argument("--amplitude", type=float, default=1.0)
    p.add_argument("--phase", type=float, default=0.0)
    p.add_argument("--offset", type=float, default=0.0)
    p.add_argument("--psi", default="log")
    p.add_argument("--p", type=float, default=1.0)
    p.add_argument("--tmax", type=float, default=1e6)
    p.add_argument("--J", type=int)
    common(p)
    return ap


_NON_PARAMS = {"command", "out", "seed", "config"}


def args_to_config(args: argparse.Namespace) -> dict:
    params = {k: v for k, v in vars(args).items() if k not in _NON_PARAMS and v is not None}
    if args.command == "dixmier":
        params["grid_depth"] = params.pop("grid_depth")
        if not params.get("harmonic"):
            params.pop("harmonic", None)
    if args.command == "extrapolate" and not params.get("harmonic"):
        params.pop("harmonic", None)
    if "exact" in params and not params["exact"]:
        params.pop("exact")
    return {"kind": args.command, "params": params, "out": args.out, "seed": args.seed}


def _limit_threads():
    n = os.environ.get("HTL_THREADS")
    if not n:
        return None
    try:
        from threadpoolctl import threadpool_limits
    except ImportError:
        return None
    return threadpool_limits(int(n))


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    _limit_threads()
    if args.command == "run":
        try:
            config = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            print(f"htlab: invalid config: {exc}", file=sys.stderr)
            return 1
        if args.out:
            config["out"] = args.out
        return run(config)
    return run(args_to_config(args))


if __name__ == "__main__":
    sys.exit(main())
