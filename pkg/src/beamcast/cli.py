"""Command-line front end: ``beamcast {check,optimize,simulate,sweep,verify}``.

Exit codes: 0 success, 1 verification failure, 2 usage error,
3 internal inconsistency.
"""

import argparse
import csv
import io
import json
import math
import sys

import numpy as np

from . import __version__
from .channel import RayleighModel
from .conditions import schur_condition_numeric, schur_condition_rayleigh
from .montecarlo import simulate
from .numerics import QuadratureError
from .optimizer import exhaustive_two_user, homogeneous_policy, optimize
from .rate import ThresholdPolicy, feedback_load, policy_from_probs, sum_rate
from .verify import run_battery

EXIT_OK, EXIT_VERIFY, EXIT_USAGE, EXIT_INCONSISTENT = 0, 1, 2, 3

NATS_PER_BIT = math.log(2.0)


class UsageError(ValueError):
    pass


# ---------------------------------------------------------------------------
# rendering
# ---------------------------------------------------------------------------
def _json_safe(obj):
    if isinstance(obj, dict):
        return {str(k): _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [_json_safe(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    return obj


def _csv_cell(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        x = float(v)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return format(x, ".17g")
    return str(v)


def _flatten(record):
    flat = {}
    for key, value in record.items():
        if isinstance(value, (list, tuple, np.ndarray)):
            for i, v in enumerate(value, start=1):
                flat[f"{key}_{i}"] = v
        else:
            flat[key] = value
    return flat


def render(payload, fmt, rows=None):
    """Serialise ``payload`` as JSON, or ``rows`` (else the payload) as CSV."""
    if fmt == "json":
        return json.dumps(_json_safe(payload), sort_keys=True, indent=2,
                          allow_nan=False) + "\n"
    table = rows if rows is not None else [_flatten(payload)]
    buf = io.StringIO()
    header = list(table[0].keys()) if table else []
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(header)
    for row in table:
        writer.writerow([_csv_cell(row[h]) for h in header])
    return buf.getvalue()


def _emit(text, out):
    if out in (None, "-"):
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        with open(out, "w", newline="", encoding="utf-8") as fh:
            fh.write(text)


# ---------------------------------------------------------------------------
# argument helpers
# ---------------------------------------------------------------------------
def _model(args):
    try:
        return RayleighModel(args.beams, args.snr)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _unit(args):
    return (1.0 / NATS_PER_BIT, "bits") if args.bits else (1.0, "nats")


def _policy_from_args(model, args):
    given = [x is not None for x in (args.thresholds, args.probs, args.lam)]
    if sum(given) != 1:
        raise UsageError("give exactly one of --thresholds, --probs or --lam")
    if args.thresholds is not None:
        if any(t < 0 or math.isnan(t) for t in args.thresholds):
            raise UsageError("thresholds must be >= 0")
        return ThresholdPolicy(tuple(args.thresholds))
    if args.probs is not None:
        if any(not 0.0 <= p <= 1.0 for p in args.probs):
            raise UsageError("probabilities must lie in [0, 1]")
        return policy_from_probs(model, args.probs)
    if args.users is None:
        raise UsageError("--lam needs --users")
    if not 0 < args.lam <= args.users:
        raise UsageError("--lam must satisfy 0 < lam <= users")
    return homogeneous_policy(model, args.users, args.lam)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------
def cmd_check(args):
    model = _model(args)
    if args.grid_size < 100:
        raise UsageError("--grid-size must be >= 100")
    closed = schur_condition_rayleigh(model.beams, model.snr)
    report = schur_condition_numeric(model, args.grid_size)
    agree = closed == report.holds
    payload = {"command": "check", "beams": model.beams, "snr": model.snr,
               "holds": report.holds, "closed_form_holds": closed,
               "numeric_holds": report.holds, "worst_margin": report.worst_margin,
               "witness_x": report.witness_x, "grid_size": report.grid_size,
               "agree": agree}
    _emit(render(payload, args.format), args.out)
    return EXIT_OK if agree else EXIT_INCONSISTENT


def cmd_optimize(args):
    model = _model(args)
    if args.users < 1 or not 0 < args.lam <= args.users:
        raise UsageError("need users >= 1 and 0 < lam <= users")
    if args.starts < 1:
        raise UsageError("--starts must be >= 1")
    scale, unit = _unit(args)
    res = optimize(model, args.users, args.lam, starts=args.starts,
                   step_tol=args.step_tol, seed=args.seed)
    homog = homogeneous_policy(model, args.users, args.lam)
    gain = res.best_rate - res.homogeneous_rate
    payload = {"command": "optimize", "beams": model.beams, "snr": model.snr,
               "users": args.users, "lambda": args.lam, "unit": unit,
               "best_p": list(res.best_p),
               "best_thresholds": list(res.best_thresholds.thresholds),
               "best_rate": res.best_rate * scale, "load": res.load,
               "homogeneous_rate": res.homogeneous_rate * scale,
               "homogeneous_threshold": homog.thresholds[0],
               "heterogeneous_gain": gain * scale,
               "heterogeneous": bool(gain > 3.0 * args.step_tol * abs(res.best_rate) + 1e-9),
               "converged": res.converged, "iterations": res.iterations}
    _emit(render(payload, args.format), args.out)
    return EXIT_OK


def cmd_simulate(args):
    model = _model(args)
    if args.samples < 1:
        raise UsageError("--samples must be >= 1")
    policy = _policy_from_args(model, args)
    scale, unit = _unit(args)
    est = simulate(model, policy, args.samples, seed=args.seed, reporting=args.reporting)
    analytic = sum_rate(model, policy)
    diff = est.mean_rate - analytic
    sigma = diff / est.std_error if est.std_error > 0 else (0.0 if diff == 0 else math.inf)
    payload = {"command": "simulate", "beams": model.beams, "snr": model.snr,
               "users": policy.n_users, "thresholds": list(policy.thresholds),
               "unit": unit, "seed": args.seed, "samples": est.samples,
               "reporting": args.reporting,
               "mc_rate": est.mean_rate * scale, "mc_std_error": est.std_error * scale,
               "analytic_rate": analytic * scale, "discrepancy_sigma": sigma,
               "mc_load": est.mean_load, "mc_load_std_error": est.load_std_error,
               "analytic_load": feedback_load(model, policy)}
    _emit(render(payload, args.format), args.out)
    return EXIT_OK


def _parse_range(spec):
    start, stop, num = spec
    try:
        start, stop, num = float(start), float(stop), int(num)
    except ValueError:
        raise UsageError(f"malformed --range {spec}") from None
    if num < 1 or not (math.isfinite(start) and math.isfinite(stop)):
        raise UsageError(f"malformed --range {spec}")
    return np.linspace(start, stop, num)


def _mc_columns(model, policy, args, scale):
    if args.mc_samples <= 0:
        return {}
    est = simulate(model, policy, args.mc_samples, seed=args.seed)
    return {"mc_rate": est.mean_rate * scale, "mc_std_error": est.std_error * scale}


def cmd_sweep(args):
    scale, unit = _unit(args)
    rows = []
    if args.axis == "q":
        model = _model(args)
        if args.lam is None or not 0 < args.lam <= 2:
            raise UsageError("axis q needs 0 < --lam <= 2 (two users)")
        if args.grid_points < 11:
            raise UsageError("--grid-points must be >= 11")
        search = exhaustive_two_user(model, args.lam, args.grid_points)
        for q, r in zip(search.q, search.rate):
            row = {"q": float(q), "p_1": args.lam - float(q), "p_2": float(q),
                   "rate": float(r) * scale}
            row.update(_mc_columns(model, policy_from_probs(model, (args.lam - q, q)),
                                   args, scale))
            rows.append(row)
    else:
        if args.range is None:
            raise UsageError(f"axis {args.axis} needs --range START STOP NUM")
        grid = _parse_range(args.range)
        if args.users is None or args.users < 1:
            raise UsageError("--users must be >= 1")
        for value in grid:
            if args.axis == "snr":
                if not value > 0:
                    raise UsageError("snr values must be positive")
                model = RayleighModel(args.beams, float(value))
                lam = args.lam
            else:
                model = _model(args)
                lam = float(value)
            if lam is None or not 0 <= lam <= args.users:
                raise UsageError("lambda must lie in [0, users]")
            if lam == 0:
                policy = ThresholdPolicy((math.inf,) * args.users)
            else:
                policy = homogeneous_policy(model, args.users, lam)
            row = {"snr": model.snr, "beams": model.beams, "users": args.users,
                   "lambda": lam, "threshold": policy.thresholds[0],
                   "rate": sum_rate(model, policy) * scale,
                   "condition_holds": schur_condition_rayleigh(model.beams, model.snr)}
            row.update(_mc_columns(model, policy, args, scale))
            rows.append(row)
    payload = {"command": "sweep", "axis": args.axis, "unit": unit, "rows": rows}
    _emit(render(payload, args.format, rows=rows), args.out)
    return EXIT_OK


def cmd_verify(args):
    if args.samples < 100:
        raise UsageError("--samples must be >= 100")
    passed, checks = run_battery(seed=args.seed, samples=args.samples,
                                 tolerance_scale=args.tolerance_scale)
    payload = {"command": "verify", "passed": passed, "seed": args.seed,
               "samples": args.samples, "checks": [c.as_dict() for c in checks]}
    rows = [c.as_dict() for c in checks]
    _emit(render(payload, args.format, rows=rows), args.out)
    return EXIT_OK if passed else EXIT_VERIFY


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------
def _common(p, model=True):
    if model:
        p.add_argument("--beams", "-M", type=int, default=1, help="number of beams M")
        p.add_argument("--snr", type=float, default=1.0, help="SNR rho (noise power is 1/rho)")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out", default=None, help="output path (default stdout)")
    p.add_argument("--bits", action="store_true", help="report rates in bits")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="beamcast",
        description="Threshold feedback policies for random-beam broadcast channels.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="check the Schur-concavity condition")
    _common(p)
    p.add_argument("--grid-size", type=int, default=1000)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("optimize", help="optimise thresholds under a feedback budget")
    _common(p)
    p.add_argument("--users", "-n", type=int, required=True)
    p.add_argument("--lam", type=float, required=True, help="feedback budget lambda")
    p.add_argument("--starts", type=int, default=8)
    p.add_argument("--step-tol", type=float, default=1e-5)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("simulate", help="Monte Carlo rate next to the analytic rate")
    _common(p)
    p.add_argument("--users", "-n", type=int, default=None)
    p.add_argument("--lam", type=float, default=None, help="homogeneous policy with this load")
    p.add_argument("--thresholds", type=float, nargs="+", default=None)
    p.add_argument("--probs", type=float, nargs="+", default=None)
    p.add_argument("--samples", type=int, default=1_000_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--reporting", choices=("all", "best"), default="all")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", help="tabulate rates along one parameter")
    _common(p)
    p.add_argument("--axis", choices=("snr", "lambda", "q"), required=True)
    p.add_argument("--range", nargs=3, metavar=("START", "STOP", "NUM"), default=None)
    p.add_argument("--users", "-n", type=int, default=2)
    p.add_argument("--lam", type=float, default=None)
    p.add_argument("--grid-points", type=int, default=2001)
    p.add_argument("--mc-samples", type=int, default=0)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_sweep, format="csv")

    p = sub.add_parser("verify", help="run the cross-validation battery")
    _common(p, model=False)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples", type=int, default=200_000)
    p.add_argument("--tolerance-scale", type=float, default=1.0, help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.exit(EXIT_USAGE, f"beamcast {args.command}: error: {exc}\n")
    except QuadratureError as exc:
        payload = {"command": args.command, "error": str(exc),
                   "partial_estimate": exc.estimate, "abserr": exc.abserr}
        sys.stdout.write(render(payload, "json"))
        return EXIT_INCONSISTENT
    except ValueError as exc:
        parser.exit(EXIT_USAGE, f"beamcast {args.command}: error: {exc}\n")


if __name__ == "__main__":
    sys.exit(main())
