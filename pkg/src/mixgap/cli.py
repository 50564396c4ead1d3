"""Command-line surface.  Thin client over the library; all output is JSON-first.

Exit codes: 0 ok, 2 parse failure, 3 non-ergodic input, 4 precondition
violation, 5 solver failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import chain, fileio, reports, trajectory
from .errors import (
    AbsoluteContinuityViolationError,
    ConstraintViolationError,
    DegenerateGapError,
    EigensolverFailureError,
    InvalidDistributionError,
    MissingGapError,
    MixingTimeOverflowError,
    NoConvergenceError,
    NonErgodicError,
    ParseError,
    SkipTooLargeError,
    ZeroCountUnsmoothedError,
    ZeroStationaryEntryError,
)

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_NON_ERGODIC = 3
EXIT_PRECONDITION = 4
EXIT_SOLVER = 5

_PRECONDITION_ERRORS = (
    InvalidDistributionError,
    SkipTooLargeError,
    ZeroCountUnsmoothedError,
    ConstraintViolationError,
    DegenerateGapError,
    MissingGapError,
    ZeroStationaryEntryError,
    AbsoluteContinuityViolationError,
    ValueError,
)
_SOLVER_ERRORS = (NoConvergenceError, EigensolverFailureError, MixingTimeOverflowError)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mixgap",
        description="Mixing-time and spectral-gap estimation for finite Markov chains",
    )
    parser.add_argument("--config", help="JSON file with default flag values")
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("spectrum", help="exact spectral summary of a known chain")
    sp.add_argument("--matrix", required=True)
    sp.add_argument("--kmax", type=int, default=None)
    sp.add_argument("--xi", type=float, default=0.25)
    _output_flags(sp)

    sim = sub.add_parser("simulate", help="sample a trajectory from a known chain")
    sim.add_argument("--matrix", required=True)
    sim.add_argument("--mu", default="stationary",
                     help='"stationary", "uniform", or comma-separated probabilities')
    sim.add_argument("--m", type=int, required=True)
    sim.add_argument("--seed", type=int, required=True)
    sim.add_argument("--out", required=True)

    est = sub.add_parser("estimate", help="estimates and confidence intervals from a trajectory")
    est.add_argument("--traj", required=True)
    est.add_argument("--d", type=int, required=True)
    group = est.add_mutually_exclusive_group(required=True)
    group.add_argument("--K", type=int, default=None)
    group.add_argument("--adaptive-eps", type=float, default=None)
    est.add_argument("--alpha", type=float, default=1.0)
    est.add_argument("--delta", type=float, default=0.05)
    _output_flags(est)

    cov = sub.add_parser("coverage", help="Monte-Carlo interval-coverage experiment")
    cov.add_argument("--matrix", required=True)
    cov.add_argument("--m", type=int, required=True)
    cov.add_argument("--runs", type=int, required=True)
    cov.add_argument("--alpha", type=float, default=1.0)
    cov.add_argument("--delta", type=float, default=0.05)
    cov.add_argument("--seed", type=int, default=0)
    cov.add_argument("--K", type=int, default=3)
    _output_flags(cov)

    fam = sub.add_parser("family", help="emit a hard-instance family matrix")
    fam.add_argument("kind", choices=["star", "symmetric"])
    fam.add_argument("--alpha", type=float, required=True)
    fam.add_argument("--d", type=int, required=True)
    fam.add_argument("--p-bar", default=None,
                     help="comma-separated spoke distribution (star only)")
    fam.add_argument("--out", default=None)
    _output_flags(fam)

    srv = sub.add_parser("serve", help="run the HTTP service")
    srv.add_argument("--host", default="127.0.0.1")
    srv.add_argument("--port", type=int, default=8000)
    return parser


def _output_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--table", action="store_true", help="render a human-readable table")
    sub.add_argument("--csv", action="store_true", help="emit long-format csv rows")
    sub.add_argument("--out", dest="out_json", default=None, help="write JSON here instead of stdout")


def _apply_config(args: argparse.Namespace, parser: argparse.ArgumentParser) -> None:
    if not args.config:
        return
    try:
        defaults = json.loads(Path(args.config).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        parser.error(f"cannot read config file: {exc}")
    if not isinstance(defaults, dict):
        parser.error("config file must hold a JSON object")
    # flags already given on the command line win over config values
    given = {a.split("=")[0].lstrip("-").replace("-", "_") for a in sys.argv if a.startswith("--")}
    for key, value in defaults.items():
        attr = key.replace("-", "_")
        if hasattr(args, attr) and attr not in given and attr != "config":
            setattr(args, attr, value)


def _parse_mu(spec: str):
    if spec in ("stationary", "uniform"):
        return spec
    try:
        return [float(x) for x in spec.split(",")]
    except ValueError as exc:
        raise InvalidDistributionError(f"cannot parse initial law {spec!r}") from exc


def _emit(payload: dict, args: argparse.Namespace, csv_rows=None, table_lines=None) -> None:
    text = json.dumps(payload, indent=2)
    if getattr(args, "out_json", None):
        Path(args.out_json).write_text(text + "\n")
    elif args.csv and csv_rows is not None:
        print("section,key,value")
        for row in csv_rows:
            print(",".join(str(x) for x in row))
    elif args.table and table_lines is not None:
        for line in table_lines:
            print(line)
    else:
        print(text)


def _flatten(payload: dict, prefix: str = "") -> list[tuple[str, str, object]]:
    rows = []
    for key, value in payload.items():
        name = f"{prefix}{key}"
        if isinstance(value, dict):
            rows.extend(_flatten(value, prefix=f"{name}."))
        elif isinstance(value, list):
            rows.append((prefix.rstrip("."), key, json.dumps(value)))
        else:
            rows.append((prefix.rstrip(".") or "-", key, value))
    return rows


def _cmd_spectrum(args) -> int:
    tm = fileio.load_matrix(args.matrix)
    payload = reports.spectrum_report(tm, args.kmax, args.xi)
    rows = _flatten(payload)
    table = [f"{a:<28} {b:<20} {c}" for a, b, c in rows]
    _emit(payload, args, csv_rows=rows, table_lines=table)
    return EXIT_OK


def _cmd_simulate(args) -> int:
    tm = fileio.load_matrix(args.matrix)
    mu = reports.resolve_initial_law(_parse_mu(args.mu), tm)
    traj = trajectory.simulate(tm, mu, args.m, args.seed)
    fileio.save_trajectory(traj, args.out)
    return EXIT_OK


def _cmd_estimate(args) -> int:
    traj = fileio.load_trajectory(args.traj, args.d)
    payload = reports.estimate_report(traj, args.K, args.adaptive_eps, args.alpha, args.delta)
    rows = _flatten(payload)
    table = [f"{a:<36} {b:<18} {c}" for a, b, c in rows]
    _emit(payload, args, csv_rows=rows, table_lines=table)
    return EXIT_OK


def _cmd_coverage(args) -> int:
    tm = fileio.load_matrix(args.matrix)
    payload = reports.coverage_report(
        tm, args.m, args.runs, args.alpha, args.delta, args.seed, K=args.K
    )
    rows = _flatten(payload)
    table = [f"{a:<28} {b:<18} {c}" for a, b, c in rows]
    _emit(payload, args, csv_rows=rows, table_lines=table)
    return EXIT_OK


def _cmd_family(args) -> int:
    p_bar = [float(x) for x in args.p_bar.split(",")] if args.p_bar else None
    payload = reports.family_report(args.kind, args.alpha, args.d, p_bar=p_bar)
    if args.out:
        tm = chain.TransitionMatrix(entries=np.asarray(payload["matrix"]["rows"], dtype=float))
        fileio.save_matrix(tm, args.out)
        return EXIT_OK
    rows = _flatten(payload["meta"])
    table = [f"{a:<20} {b:<16} {c}" for a, b, c in rows]
    _emit(payload, args, csv_rows=rows, table_lines=table)
    return EXIT_OK


def _cmd_serve(args) -> int:  # pragma: no cover - exercised manually
    import uvicorn

    from .service import app

    uvicorn.run(app, host=args.host, port=args.port)
    return EXIT_OK


_DISPATCH = {
    "spectrum": _cmd_spectrum,
    "simulate": _cmd_simulate,
    "estimate": _cmd_estimate,
    "coverage": _cmd_coverage,
    "family": _cmd_family,
    "serve": _cmd_serve,
}


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    _apply_config(args, parser)
    try:
        return _DISPATCH[args.command](args)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except NonErgodicError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NON_ERGODIC
    except _PRECONDITION_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except _SOLVER_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
