"""Report builders shared by the CLI and the HTTP service.

Each builder returns a plain JSON-serializable dict (infinities rendered as
the string "inf") so both surfaces emit byte-identical payloads.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import chain, confidence, estimators, lowerbound, trajectory
from .confidence import _json_float, _json_value

WORKER_ENV_VAR = "MIXGAP_THREADS"


def _finite_or_inf(x: float) -> float | str:
    return _json_float(float(x))


def spectrum_report(tm: chain.TransitionMatrix, k_max: int | None, xi: float) -> dict:
    """Every exact quantity of a known chain plus its three mixing-time sandwiches."""
    pi = chain.stationary_distribution(tm)
    summary = chain.spectral_summary(tm, k_max=k_max, xi=xi)
    reversible = summary.gamma_star is not None
    bounds: dict[str, list] = {}
    if reversible and summary.gamma_star > 0:
        lo, hi = chain.tmix_bounds(summary, pi.pi_min, "reversible")
        bounds["reversible"] = [lo, hi]
    for mode in ("pseudo", "dilated"):
        lo, hi = chain.tmix_bounds(summary, pi.pi_min, mode)
        bounds[mode] = [lo, hi]
    return {
        "d": tm.dim,
        "reversible": reversible,
        "gamma": summary.gamma,
        "gamma_star": summary.gamma_star,
        "gamma_ps": summary.gamma_ps,
        "k_ps": summary.k_ps,
        "gamma_ps_dilated": summary.gamma_ps_dilated,
        "t_mix": summary.t_mix,
        "xi": xi,
        "pi_min": pi.pi_min,
        "balance_beta": summary.balance_beta,
        "tmix_bounds": bounds,
    }


def resolve_initial_law(spec, tm: chain.TransitionMatrix) -> np.ndarray:
    """Initial-law spec: "stationary", "uniform", or an explicit vector."""
    if isinstance(spec, str):
        if spec == "stationary":
            return chain.stationary_distribution(tm).probs
        if spec == "uniform":
            return np.full(tm.dim, 1.0 / tm.dim)
        raise ValueError(f"unknown initial law {spec!r}")
    return np.asarray(spec, dtype=float)


def estimate_report(
    traj: trajectory.Trajectory,
    K: int | None,
    adaptive_eps: float | None,
    alpha: float,
    delta: float,
) -> dict:
    """Point estimates plus the joint confidence intervals, with per-skip diagnostics."""
    if (K is None) == (adaptive_eps is None):
        raise ValueError("exactly one of K and adaptive_eps must be given")
    if K is None:
        K = estimators.adaptive_K(traj, adaptive_eps)
    gap_report = confidence.pssg_interval(traj, K, alpha, delta)
    pimin_report = confidence.pimin_interval(traj, alpha, delta, K=K)
    return {
        "d": traj.d,
        "m": traj.m,
        "K": K,
        "adaptive_eps": adaptive_eps,
        "alpha": alpha,
        "delta": delta,
        "points": {
            "pimin": pimin_report.point,
            "gamma_ps_dilated": gap_report.point,
            "gamma_ps_implied": _json_value(gap_report.extras["gamma_ps_implied"]),
            "tmix_sandwich": _json_value(gap_report.extras["tmix_sandwich"]),
        },
        "intervals": {
            "pssg_dilated": gap_report.to_json_dict(),
            "pimin": pimin_report.to_json_dict(),
        },
    }


def _coverage_run(args: tuple) -> dict:
    rows, m, seed, K, alpha, delta = args
    tm = chain.TransitionMatrix(entries=np.asarray(rows, dtype=float))
    pi = chain.stationary_distribution(tm)
    traj = trajectory.simulate(tm, pi.probs, m, seed)
    gap_report = confidence.pssg_interval(traj, K, alpha, delta)
    pimin_report = confidence.pimin_interval(traj, alpha, delta, K=K)
    return {
        "seed": seed,
        "gap": (gap_report.lower, gap_report.upper, gap_report.half_width),
        "pimin": (pimin_report.lower, pimin_report.upper, pimin_report.half_width),
    }


def _worker_count(n_runs: int) -> int:
    raw = os.environ.get(WORKER_ENV_VAR)
    workers = int(raw) if raw else (os.cpu_count() or 1)
    return max(1, min(workers, n_runs))


def coverage_report(
    tm: chain.TransitionMatrix,
    m: int,
    n_runs: int,
    alpha: float,
    delta: float,
    seed: int,
    K: int = 3,
) -> dict:
    """Monte-Carlo check of interval coverage against the exact chain quantities.

    Simulates n_runs stationary-start trajectories with seeds seed..seed+n_runs-1,
    fans the runs out across processes (capped by MIXGAP_THREADS) and reduces in
    seed order, so the output is independent of the worker count.
    """
    if n_runs < 1:
        raise ValueError("n_runs must be at least 1")
    pi = chain.stationary_distribution(tm)
    truth_gap = chain.dilated_pseudo_spectral_gap(tm, pi)
    truth_pimin = pi.pi_min
    rows = [list(map(float, row)) for row in tm.entries]
    jobs = [(rows, m, seed + i, K, alpha, delta) for i in range(n_runs)]
    workers = _worker_count(n_runs)
    if workers == 1:
        results = [_coverage_run(job) for job in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_coverage_run, jobs, chunksize=max(1, n_runs // (4 * workers))))
    summary = {"d": tm.dim, "m": m, "n_runs": n_runs, "K": K, "alpha": alpha,
               "delta": delta, "seed": seed,
               "truth": {"gamma_ps_dilated": truth_gap, "pimin": truth_pimin}}
    for name, truth in (("pssg_dilated", truth_gap), ("pimin", truth_pimin)):
        key = "gap" if name == "pssg_dilated" else "pimin"
        lowers = np.array([r[key][0] for r in results])
        uppers = np.array([r[key][1] for r in results])
        halves = [r[key][2] for r in results]
        covered = float(np.mean((lowers <= truth) & (truth <= uppers)))
        clamped = float(np.mean(uppers - lowers))
        mean_half = math.inf if any(math.isinf(h) for h in halves) else float(np.mean(halves))
        summary[name] = {
            "coverage": covered,
            "mean_width": clamped,
            "mean_half_width": _finite_or_inf(mean_half),
        }
    return summary


def family_report(family: str, alpha: float, d: int, p_bar=None) -> dict:
    """Family instance as a matrix payload ready for reuse as a simulation input."""
    if family == "star":
        if p_bar is None:
            p = np.full(d, 1.0 / d)
        else:
            p = np.asarray(p_bar, dtype=float)
        member = lowerbound.star_chain(alpha, p)
        meta = {
            "family": "star",
            "alpha": alpha,
            "spoke_dist": [float(x) for x in member.spoke_dist],
            "stationary": [float(x) for x in member.stationary],
        }
        tm = member.matrix
    elif family == "symmetric":
        member = lowerbound.symmetric_family(alpha, d)
        meta = {
            "family": "symmetric",
            "alpha": alpha,
            "gap": lowerbound.symmetric_family_gap(alpha, d),
        }
        tm = member.matrix
    else:
        raise ValueError(f"unknown family {family!r}")
    return {
        "matrix": {"d": tm.dim, "rows": [list(map(float, row)) for row in tm.entries]},
        "meta": meta,
    }
