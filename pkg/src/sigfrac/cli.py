"""Command-line front end.

Subcommands compute exact curves, approximations, simulations,
path-loss-process statistics, the arcsine-comparison report, and unit
conversions, serialized as CSV (header ``arg_unit,arg,value[,flag]``)
or JSON (schemas shipped in ``schemas/``).  Floats are emitted with 12
significant digits; any command taking ``--seed`` is reproducible
byte-for-byte, independent of ``SIGFRAC_THREADS``.

Exit codes: 0 success, 2 usage or domain error, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import approx, montecarlo, plp, rayleigh, transforms
from .montecarlo import (AssociationRule, FadingModel, SimConfig,
                         SimulationError, empirical_ccdf)
from .rayleigh import NetworkParams
from .specfun import BracketError, NumericError
from .transforms import AxisUnit

_CONJ_MOMENT_TOL = 3e-4          # 0.03 percent
_CONJ_KS_TOL = 1.0 / 3000.0
_CONJ_GATE_SAMPLES = 20_000_000


class UsageError(ValueError):
    pass


def _fmt(x) -> str:
    return f"{float(x):.12g}"


def _round12(x) -> float:
    return float(_fmt(x))


def parse_params(alpha, delta) -> NetworkParams:
    if alpha is None and delta is None:
        raise UsageError("one of --alpha or --delta is required")
    if alpha is not None and delta is not None:
        p = NetworkParams.from_alpha(alpha)
        if abs(p.delta - delta) > 1e-12:
            raise UsageError(
                f"--alpha {alpha} and --delta {delta} disagree (2/alpha = {p.delta})")
        return p
    if alpha is not None:
        if alpha <= 2.0:
            raise UsageError(f"alpha must exceed 2 (so that 0 < delta < 1), got {alpha}")
        return NetworkParams.from_alpha(alpha)
    if not 0.0 < delta < 1.0:
        raise UsageError(f"delta must satisfy 0 < delta < 1, got {delta}")
    return NetworkParams.from_delta(delta)


def parse_grid(spec: str) -> np.ndarray:
    """Grid syntax: 'min:max:count' (inclusive endpoints) or 'a,b,c,...'."""
    if ":" in spec:
        parts = spec.split(":")
        if len(parts) != 3:
            raise UsageError(f"grid must be min:max:count, got {spec!r}")
        lo, hi = float(parts[0]), float(parts[1])
        n = int(parts[2])
        if n < 2:
            raise UsageError(f"grid needs at least 2 points, got {n}")
        if not lo < hi:
            raise UsageError(f"grid needs min < max, got {spec!r}")
        return np.linspace(lo, hi, n)
    vals = np.array([float(v) for v in spec.split(",")])
    if vals.size < 1 or np.any(np.diff(vals) <= 0):
        raise UsageError("explicit grid values must be strictly increasing")
    return vals


def _open_out(path):
    if path in (None, "-"):
        return sys.stdout, False
    return open(path, "w", encoding="utf-8", newline="\n"), True


def write_rows(fh, unit: str, rows, flags=None):
    if flags is None or all(f == "" for f in flags):
        fh.write("arg_unit,arg,value\n")
        for arg, val in rows:
            fh.write(f"{unit},{_fmt(arg)},{_fmt(val)}\n")
    else:
        fh.write("arg_unit,arg,value,flag\n")
        for (arg, val), f in zip(rows, flags):
            fh.write(f"{unit},{_fmt(arg)},{_fmt(val)},{f}\n")


def curve_doc(variable, kind, unit, rows, flags=None, **extra):
    points = []
    for i, (arg, val) in enumerate(rows):
        pt = {"arg": _round12(arg), "value": _round12(val)}
        if flags is not None and flags[i]:
            pt["flag"] = flags[i]
        points.append(pt)
    doc = {"schema": "curve", "variable": variable, "kind": kind,
           "arg_unit": unit, "points": points}
    doc.update(extra)
    return doc


def emit_curve(args, variable, kind, rows, flags=None, sidecars=None):
    """Write a curve as CSV or JSON.

    sidecars is a dict name -> json-able payload; in JSON format they
    are embedded, in CSV format they go to '<out>.<name>.json' (or to
    stderr when writing CSV to stdout).
    """
    unit = getattr(args, "unit", "linear") or "linear"
    fh, close = _open_out(args.out)
    try:
        if args.format == "json":
            doc = curve_doc(variable, kind, unit, rows, flags,
                            **(sidecars or {}))
            json.dump(doc, fh, indent=2)
            fh.write("\n")
        else:
            write_rows(fh, unit, rows, flags)
            for name, payload in (sidecars or {}).items():
                data = json.dumps(payload, indent=2) + "\n"
                if close:
                    with open(f"{args.out}.{name}.json", "w",
                              encoding="utf-8", newline="\n") as side:
                        side.write(data)
                else:
                    sys.stderr.write(data)
    finally:
        if close:
            fh.close()


def emit_json(args, doc):
    fh, close = _open_out(args.out)
    try:
        json.dump(doc, fh, indent=2)
        fh.write("\n")
    finally:
        if close:
            fh.close()


def _sir_grid_to_linear(grid, unit):
    if unit == "dB":
        return np.array([transforms.db_to_linear(g) for g in grid])
    if unit == "MH":
        if grid[-1] >= 1.0:
            raise UsageError("MH-unit grid arguments must lie in [0, 1)")
        return np.array([transforms.mh_to_linear(g) for g in grid])
    if grid[0] < 0.0:
        raise UsageError("linear SIR grid must be non-negative")
    return grid


def cmd_exact(args):
    params = parse_params(args.alpha, args.delta)
    grid = parse_grid(args.grid)
    if args.var == "SF":
        if args.unit not in (None, "linear"):
            raise UsageError("SF curves use the linear unit (t in [0, 1])")
        if grid[0] < 0.0 or grid[-1] > 1.0:
            raise UsageError("SF grid must lie within [0, 1]")
        rows = [(t, rayleigh.sf_ccdf_exact(params, float(t))) for t in grid]
    else:
        theta = _sir_grid_to_linear(grid, args.unit or "linear")
        rows = [(g, rayleigh.sir_ccdf_exact(params, float(th)))
                for g, th in zip(grid, theta)]
    emit_curve(args, args.var, "ccdf", rows)
    return 0


def _parse_method(spec: str):
    name, _, arg = spec.partition(":")
    return name, arg


def cmd_approx(args):
    params = parse_params(args.alpha, args.delta)
    grid = parse_grid(args.grid)
    if grid[0] < 0.0 or grid[-1] > 1.0:
        raise UsageError("approximation grids live on the SF axis [0, 1]")
    name, arg = _parse_method(args.method)
    sidecars = None
    if name == "rational":
        s = int(arg or 2)
        pts = [t for t in grid if t < 1.0]
        rows = [(t, approx.rational_ccdf(params, s, float(t))) for t in pts]
    elif name == "poly":
        order = int(arg or 1)
        rows = [(t, approx.poly_ccdf(params, order, float(t))) for t in grid]
    elif name == "tail":
        order = int(arg or 2)
        pts = [t for t in grid if t > 0.0]
        rows = [(t, approx.tail_ccdf(params, order, float(t))) for t in pts]
    elif name == "best":
        rows = [(t, approx.best_sf_ccdf(params, float(t))) for t in grid]
    elif name == "markov":
        pts = [t for t in grid if t < 1.0 - params.delta]
        rows = [(t, approx.markov_lower_bound(params, float(t))) for t in pts]
    elif name == "nba-m":
        m = int(arg or 2)
        rows = [(t, approx.nba_m_cdf_asymptote(params, m, float(t))) for t in grid]
    elif name == "gb-fit":
        fit = approx.gb_fit(params)
        gbp = fit.params
        rows = [(t, 1.0 - approx.gb_cdf(gbp, float(t))) for t in grid]
        sidecars = {"fit": {
            "schema": "fit",
            "alpha": _round12(params.alpha),
            "delta": _round12(params.delta),
            "a": _round12(gbp.a), "b": _round12(gbp.b),
            "p": _round12(gbp.p), "q": _round12(gbp.q),
            "target_moments": [_round12(v) for v in fit.target_moments],
            "achieved_moments": [_round12(v) for v in fit.achieved_moments],
            "residual": _round12(fit.residual),
        }}
    else:
        raise UsageError(
            f"unknown method {args.method!r}; available: rational:s, poly:1, "
            "poly:2, tail:1, tail:2, best, gb-fit, markov, nba-m:2")
    emit_curve(args, "SF", "ccdf", rows, sidecars=sidecars)
    return 0


def _parse_fading(spec: str) -> FadingModel:
    name, _, arg = spec.partition(":")
    if name == "none":
        return FadingModel.none()
    if name == "nakagami":
        if not arg:
            raise UsageError("nakagami fading needs a parameter, e.g. nakagami:1")
        return FadingModel.nakagami(float(arg))
    raise UsageError(f"unknown fading {spec!r}; use none or nakagami:m")


def _parse_assoc(spec: str) -> AssociationRule:
    name, _, arg = spec.partition(":")
    if name == "nba":
        return AssociationRule.nba()
    if name == "isba":
        return AssociationRule.isba()
    if name == "rba":
        return AssociationRule.rba()
    if name == "kth":
        if not arg:
            raise UsageError("kth association needs an index, e.g. kth:2")
        return AssociationRule.kth_strongest(int(arg))
    raise UsageError(f"unknown association {spec!r}; use nba, isba, rba, or kth:n")


def cmd_simulate(args):
    params = parse_params(args.alpha, args.delta)
    try:
        config = SimConfig(params=params,
                           fading=_parse_fading(args.fading),
                           assoc=_parse_assoc(args.assoc),
                           samples=args.samples,
                           point_budget=args.point_budget,
                           tail_eps=args.tail_eps,
                           seed=args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    res = montecarlo.sample_sf(config)
    grid = parse_grid(args.grid)
    if grid[0] < 0.0 or grid[-1] > 1.0:
        raise UsageError("simulation grids live on the SF axis [0, 1]")
    rows = [(t, empirical_ccdf(res.dist, float(t))) for t in grid]
    x = res.dist.samples
    summary = {
        "schema": "summary",
        "mean": _round12(x.mean()),
        "variance": _round12(x.var()),
        "count": int(x.size),
        "flagged": int(res.flagged),
        "seed": int(args.seed),
    }
    emit_curve(args, "SF", "ccdf", rows, sidecars={"summary": summary})
    return 0


def _parse_stat(spec: str):
    name, _, arg = spec.partition(":")
    return name, arg


def cmd_plp(args):
    params = parse_params(args.alpha, args.delta)
    name, arg = _parse_stat(args.stat)
    if name == "gn":
        n = int(arg or 1)
        if args.t is not None:
            val = plp.g_n(params, n, args.t)
            doc = {"stat": f"gn:{n}", "delta": _round12(params.delta),
                   "t": _round12(args.t), "value": _round12(val)}
            if not plp.g_n_is_exact(args.t):
                doc["flag"] = "ub-only"
            emit_json(args, doc)
            return 0
        grid = parse_grid(args.grid)
        pts = [t for t in grid if 0.0 < t < 1.0]
        rows = [(t, plp.g_n(params, n, float(t))) for t in pts]
        flags = ["" if plp.g_n_is_exact(t) else "ub-only" for t, _ in rows]
        emit_curve(args, "SF", "ccdf" if all(f == "" for f in flags) else "bound",
                   rows, flags=flags)
        return 0
    if name == "sfirat":
        i = int(arg or 1)
        emit_json(args, {"stat": f"sfirat:{i}", "delta": _round12(params.delta),
                         "value": _round12(plp.mean_sf_ratio(params, i))})
        return 0
    if name == "loggap":
        i = int(arg or 1)
        emit_json(args, {"stat": f"loggap:{i}", "delta": _round12(params.delta),
                         "value": _round12(plp.log_sf_gap(params, i))})
        return 0
    if name == "sf1-bound":
        emit_json(args, {"stat": "sf1-bound", "delta": _round12(params.delta),
                         "value": _round12(plp.mean_sf1_upper_bound(params))})
        return 0
    if name == "sstar":
        emit_json(args, {"stat": "sstar", "delta": _round12(params.delta),
                         "value": _round12(plp.flatness_rate(params))})
        return 0
    if name == "rba-curve":
        grid = parse_grid(args.grid)
        pts = [t for t in grid if 0.0 < t < 1.0]
        if args.kind == "pdf":
            rows = [(t, plp.rba_pdf(params, float(t))) for t in pts]
        else:
            rows = [(t, plp.rba_cdf(params, float(t))) for t in pts]
        emit_curve(args, "SF", args.kind, rows)
        return 0
    raise UsageError(
        f"unknown stat {args.stat!r}; available: gn:n, sfirat:i, loggap:i, "
        "sf1-bound, rba-curve, sstar")


def cmd_conjecture(args):
    if args.samples < 10_000:
        raise UsageError(f"conjecture report needs >= 10000 samples, got {args.samples}")
    rep = montecarlo.conjecture_report(args.samples, args.seed,
                                       point_budget=args.point_budget,
                                       tail_eps=args.tail_eps)
    doc = {"schema": "conjecture"}
    doc.update(rep.to_dict())
    for row in doc["moments"]:
        for key in ("empirical", "arcsine", "rel_diff"):
            row[key] = _round12(row[key])
    doc["ks_distance"] = _round12(doc["ks_distance"])
    doc["moment_threshold"] = _CONJ_MOMENT_TOL
    doc["ks_threshold"] = _round12(_CONJ_KS_TOL)
    if args.samples >= _CONJ_GATE_SAMPLES:
        doc["thresholds_evaluated"] = True
        doc["moments_pass"] = bool(
            max(rep.rel_moment_diffs) < _CONJ_MOMENT_TOL)
        doc["ks_pass"] = bool(rep.ks_distance < _CONJ_KS_TOL)
    else:
        doc["thresholds_evaluated"] = False
        doc["note"] = "not evaluated (insufficient samples)"
    emit_json(args, doc)
    return 0


def cmd_convert(args):
    to_lin = {"linear": lambda x: x,
              "dB": transforms.db_to_linear,
              "MH": transforms.mh_to_linear}
    from_lin = {"linear": lambda x: x,
                "dB": transforms.linear_to_db,
                "MH": transforms.linear_to_mh}
    lin = to_lin[args.src](args.value)
    out = from_lin[args.dst](lin)
    emit_json(args, {"value": _round12(args.value), "from": args.src,
                     "to": args.dst, "result": _round12(out)})
    return 0


def _add_common(p, grid_default=None, unit=False):
    p.add_argument("--alpha", type=float, default=None,
                   help="path loss exponent (> 2)")
    p.add_argument("--delta", type=float, default=None,
                   help="2/alpha, in (0, 1); give either this or --alpha")
    if grid_default is not None:
        p.add_argument("--grid", default=grid_default,
                       help="output grid, min:max:count or comma list")
    if unit:
        p.add_argument("--unit", choices=[u.value for u in AxisUnit],
                       default=None, help="argument axis unit")
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--out", default="-", help="output path ('-' = stdout)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="sigfrac",
        description="Signal-fraction and SIR distributions for Poisson "
                    "cellular networks")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("exact", help="exact ccdf under Rayleigh fading")
    _add_common(p, grid_default="0:1:101", unit=True)
    p.add_argument("--var", choices=["SF", "SIR"], default="SF")
    p.set_defaults(fn=cmd_exact)

    p = sub.add_parser("approx", help="closed-form approximations and bounds")
    _add_common(p, grid_default="0:1:101")
    p.add_argument("--method", required=True,
                   help="rational:s | poly:1 | poly:2 | tail:1 | tail:2 | "
                        "best | gb-fit | markov | nba-m:2")
    p.set_defaults(fn=cmd_approx)

    p = sub.add_parser("simulate", help="Monte Carlo signal fractions")
    _add_common(p, grid_default="0:1:101")
    p.add_argument("--fading", default="none", help="none | nakagami:m")
    p.add_argument("--assoc", default="nba", help="nba | isba | rba | kth:n")
    p.add_argument("--samples", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--point-budget", type=int, default=1_000_000)
    p.add_argument("--tail-eps", type=float, default=1e-4)
    p.set_defaults(fn=cmd_simulate)

    p = sub.add_parser("plp", help="no-fading path-loss-process statistics")
    _add_common(p, grid_default="0.01:0.99:99")
    p.add_argument("--stat", required=True,
                   help="gn:n | sfirat:i | loggap:i | sf1-bound | rba-curve | sstar")
    p.add_argument("--t", type=float, default=None,
                   help="evaluate gn at a single t instead of a grid")
    p.add_argument("--kind", choices=["cdf", "pdf"], default="cdf",
                   help="curve kind for rba-curve")
    p.set_defaults(fn=cmd_plp)

    p = sub.add_parser("conjecture",
                       help="arcsine comparison for Nakagami-1/2, alpha = 4")
    p.add_argument("--samples", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--point-budget", type=int, default=1_000_000)
    p.add_argument("--tail-eps", type=float, default=1e-4)
    p.add_argument("--format", choices=["csv", "json"], default="json")
    p.add_argument("--out", default="-")
    p.set_defaults(fn=cmd_conjecture)

    p = sub.add_parser("convert", help="convert between linear, dB, and MH units")
    p.add_argument("--value", type=float, required=True)
    p.add_argument("--from", dest="src", choices=["linear", "dB", "MH"],
                   required=True)
    p.add_argument("--to", dest="dst", choices=["linear", "dB", "MH"],
                   required=True)
    p.add_argument("--format", choices=["json"], default="json")
    p.add_argument("--out", default="-")
    p.set_defaults(fn=cmd_convert)
    return ap


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    # grids like "-20:20:81" read as options to argparse; fold them in
    i = 0
    while i < len(argv) - 1:
        if argv[i] == "--grid":
            argv[i:i + 2] = [f"--grid={argv[i + 1]}"]
        i += 1
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.fn(args)
    except (UsageError, BracketError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (NumericError, SimulationError, approx.FitError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
