"""Command line front end.

Exit codes: 0 when a blow-up verdict fires (or a witness verifies), 2 when
the result is inconclusive, 1 on any error.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from .asymptotics import UnsupportedAsymptotics
from .barrier import build_barrier, check_lower_bound, verify_cauchy
from .criteria import INTEGRALS, THEOREMS, SpecError, classify_integral, decide_theorem
from .eta import build_eta, eta_profiles
from .families import power_log_phi
from .funcdsl import ExpressionError, InversionError, NotMonotoneError, check_monotone
from .radial_verify import verify_example2
from .specfile import SpecFileError, build_spec, load_spec, load_spec_data

EXIT_BLOWUP, EXIT_ERROR, EXIT_INCONCLUSIVE = 0, 1, 2
JOBS_ENV = "BLOWUP_LAB_JOBS"
MAX_VARIED = 3
SWEEP_COLUMNS = list(INTEGRALS) + ["theorem_2_1", "theorem_2_2", "error"]


class CLIError(Exception):
    pass


def _clean(obj):
    """Make ``obj`` strict JSON: numpy scalars to Python, non-finite floats to None."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def _dump(obj, stream=None):
    stream = stream or sys.stdout
    stream.write(json.dumps(_clean(obj), sort_keys=True, indent=2, ensure_ascii=False, allow_nan=False))
    stream.write("\n")


def _theorems(choice):
    return ["2.1", "2.2"] if choice == "both" else [choice]


def _validated(spec):
    # bijectivity first: the remaining checks invert phi
    check_monotone(spec.phi, min_ratio=1.0)
    spec.validate()
    return spec


# ---------------------------------------------------------------------------
# check


def cmd_check(args) -> int:
    data = load_spec_data(args.spec)
    defaults = dict(data.get("check", {}))
    theorem = args.theorem or str(defaults.get("theorem", "both"))
    engine = args.engine or str(defaults.get("engine", "both"))
    if theorem not in ("2.1", "2.2", "both"):
        raise CLIError(f"unknown theorem {theorem!r}")
    spec = _validated(build_spec(data, name=os.path.basename(args.spec)))
    verdicts = {t: decide_theorem(spec, t, engine) for t in _theorems(theorem)}
    _dump({"spec": spec.name, "engine": engine, "verdicts": {t: v.to_dict() for t, v in verdicts.items()}})
    return EXIT_BLOWUP if any(v.blowup for v in verdicts.values()) else EXIT_INCONCLUSIVE


# ---------------------------------------------------------------------------
# sweep


def _parse_vary(text):
    try:
        name, rng = text.split("=", 1)
        start, stop, step = (float(v) for v in rng.split(":"))
    except ValueError:
        raise CLIError(f"--vary expects name=start:stop:step, got {text!r}") from None
    if step <= 0 or stop < start:
        raise CLIError(f"--vary {name}: need step > 0 and stop >= start")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return name.strip(), [round(start + i * step, 12) for i in range(count)]


def _sweep_point(payload):
    data, overrides, theorems, engine = payload
    row = {c: "" for c in SWEEP_COLUMNS}
    try:
        spec = _validated(build_spec(data, overrides))
        needed = sorted({i for t in theorems for i in THEOREMS[t]})
        reports = {i: classify_integral(spec, i, engine) for i in needed}
        for i, rep in reports.items():
            row[i] = rep.classification.value
        for t in theorems:
            row["theorem_" + t.replace(".", "_")] = decide_theorem(spec, t, engine).result.value
    except (SpecError, SpecFileError, ExpressionError, InversionError, NotMonotoneError,
            UnsupportedAsymptotics, ValueError) as exc:
        row["error"] = f"{type(exc).__name__}: {exc}"
    return row


def _default_jobs():
    env = os.environ.get(JOBS_ENV)
    if env is None:
        return 1
    try:
        return max(1, int(env))
    except ValueError:
        raise CLIError(f"{JOBS_ENV} must be an integer, got {env!r}") from None


def cmd_sweep(args) -> int:
    data = load_spec_data(args.spec)
    engine = args.engine or str(data.get("check", {}).get("engine", "both"))
    theorems = _theorems(args.theorem or str(data.get("check", {}).get("theorem", "both")))
    varied = [_parse_vary(v) for v in (args.vary or [])]
    if len(varied) > MAX_VARIED:
        raise CLIError(f"at most {MAX_VARIED} parameters can be varied")
    names = [n for n, _ in varied]
    if len(set(names)) != len(names):
        raise CLIError("a parameter is varied twice")
    known = set(data.get("parameters", {}))
    for n in names:
        if n not in known:
            raise CLIError(f"cannot vary unknown parameter {n!r}")
    grids = np.meshgrid(*[vals for _, vals in varied], indexing="ij") if varied else []
    points = [dict(zip(names, (float(g.flat[i]) for g in grids)))
              for i in range(grids[0].size)] if varied else [{}]
    payloads = [(data, pt, theorems, engine) for pt in points]
    jobs = args.jobs if args.jobs is not None else _default_jobs()
    if jobs > 1 and len(payloads) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_sweep_point, payloads))
    else:
        rows = [_sweep_point(p) for p in payloads]

    out = open(args.out, "w", newline="", encoding="utf-8") if args.out else sys.stdout
    try:
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["index"] + names + SWEEP_COLUMNS)
        for i, (pt, row) in enumerate(zip(points, rows)):
            writer.writerow([i] + [repr(pt[n]) for n in names] + [row[c] for c in SWEEP_COLUMNS])
    finally:
        if args.out:
            out.close()
    return 0


# ---------------------------------------------------------------------------
# barrier


def cmd_barrier(args) -> int:
    spec = load_spec(args.spec)
    n = args.n if args.n is not None else spec.n
    table = build_barrier(args.r1, args.r2, args.F, spec.phi, n, args.nodes)
    summary = {
        "r1": args.r1, "r2": args.r2, "F": args.F, "n": n, "nodes": int(table.grid.size),
        "w_r2": float(table.w[-1]),
        "max_relative_residual": verify_cauchy(table),
    }
    sigma = args.sigma if args.sigma is not None else spec.sigma
    if args.r2 <= sigma * args.r1:
        summary["sigma"] = sigma
        summary["lower_bound_holds"] = check_lower_bound(table, sigma)
    if args.out:
        with open(args.out, "w", newline="", encoding="utf-8") as fh:
            table.write_csv(fh)
    _dump(summary)
    return 0


# ---------------------------------------------------------------------------
# verify-example


def cmd_verify_example(args) -> int:
    report = verify_example2(args.family, args.p, args.nu, args.s, args.n, r0=args.r0)
    if args.out:
        with open(args.out, "w", newline="", encoding="utf-8") as fh:
            report.write_csv(fh)
    _dump(report.to_dict())
    return EXIT_BLOWUP if report.passed else EXIT_INCONCLUSIVE


# ---------------------------------------------------------------------------
# asymptotics


def cmd_asymptotics(args) -> int:
    if args.spec:
        phi = load_spec(args.spec).phi
    elif args.p is not None:
        phi = power_log_phi(args.p, args.nu)
    else:
        raise CLIError("give a spec file or --p/--nu")
    if phi.profile is None:
        raise CLIError("phi has no asymptotic profile on the power-log scale")
    profiles = {"phi": phi.profile.to_dict()}
    profiles.update({k: v.to_dict() for k, v in eta_profiles(phi.profile).items()})
    if args.out:
        with open(args.out, "w", newline="", encoding="utf-8") as fh:
            build_eta(phi).write_csv(fh)
    _dump(profiles)
    return 0


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="blowup-lab",
                                     description="Blow-up criteria for phi-Laplacian inequalities.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="decide the blow-up verdicts for a spec file")
    p.add_argument("spec")
    p.add_argument("--theorem", choices=["2.1", "2.2", "both"])
    p.add_argument("--engine", choices=["symbolic", "numeric", "both"])
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("sweep", help="phase table over a parameter grid (CSV)")
    p.add_argument("spec")
    p.add_argument("--vary", action="append", metavar="NAME=START:STOP:STEP")
    p.add_argument("--theorem", choices=["2.1", "2.2", "both"])
    p.add_argument("--engine", choices=["symbolic", "numeric", "both"])
    p.add_argument("--out")
    p.add_argument("--jobs", type=int, help=f"worker processes (default ${JOBS_ENV} or 1)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("barrier", help="tabulate the radial barrier and check it")
    p.add_argument("spec")
    p.add_argument("--r1", type=float, required=True)
    p.add_argument("--r2", type=float, required=True)
    p.add_argument("--F", type=float, default=1.0)
    p.add_argument("--nodes", type=int, default=1000)
    p.add_argument("--n", type=int, help="dimension (defaults to the spec's n)")
    p.add_argument("--sigma", type=float)
    p.add_argument("--out")
    p.set_defaults(func=cmd_barrier)

    p = sub.add_parser("verify-example", help="check an explicit supersolution witness")
    p.add_argument("--family", choices=["doubly_exponential", "stretched_exponential"], required=True)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--nu", type=float, required=True)
    p.add_argument("--s", type=float, required=True)
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--r0", type=float)
    p.add_argument("--out")
    p.set_defaults(func=cmd_verify_example)

    p = sub.add_parser("asymptotics", help="profiles of phi^-1, eta, eta^-1 and h")
    p.add_argument("spec", nargs="?")
    p.add_argument("--p", type=float)
    p.add_argument("--nu", type=float, default=0.0)
    p.add_argument("--out", help="CSV table of eta, eta^-1 and h")
    p.set_defaults(func=cmd_asymptotics)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (CLIError, SpecError, SpecFileError, ExpressionError, InversionError, NotMonotoneError,
            UnsupportedAsymptotics, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
