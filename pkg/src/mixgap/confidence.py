"""Fully empirical confidence intervals for the trajectory-based estimators.

Every quantity here is computable from the observed counts alone.  The driving
scalar is an iterated-logarithm confidence level tau, the infimum t at which
(1 + ceil(ln(2m/t))_+) * d_plus * e^{-t} drops below the failure budget; it
enters a chain of four per-skip terms:

  d_hat  - l-infinity learning error of the smoothed empirical chain,
  a_hat  - spectral-norm error of the rescaled matrix (row-balance factor),
  b_hat  - stationary-law perturbation via the empirical gap divisor,
  c_hat  - relative stationary error, +inf once b_hat swallows some pi_hat entry.

The universal constant in b_hat is fixed at its stated cap 48; larger means
wider, still-valid intervals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateGapError
from .estimators import (
    asg_of_symmetrized,
    empirical_dilated_pssg,
    estimate_pssg_from_counts,
)
from .trajectory import (
    SkippedCounts,
    SmoothedEstimates,
    Trajectory,
    skipped_counts,
    smoothed_estimates,
)

UNIVERSAL_CONSTANT = 48.0


@dataclass(frozen=True)
class IntervalTerms:
    """Per-skip diagnostic terms; c_hat may be +inf when the clamp hits zero."""

    k: int
    a_hat: float
    b_hat: float
    c_hat: float
    d_hat: float
    tau: float
    g_hat: float | None = None


@dataclass(frozen=True)
class ConfidenceReport:
    """Point estimate with a two-sided empirical interval.

    half_width is the raw bound and may be +inf; lower/upper are clamped to
    the target's natural range so the reported interval is always finite.
    """

    target: str
    point: float
    half_width: float
    lower: float
    upper: float
    delta: float
    alpha: float
    k_used: int
    per_k_terms: tuple[IntervalTerms, ...]
    extras: dict = field(default_factory=dict)

    def to_json_dict(self) -> dict:
        return {
            "target": self.target,
            "point": _json_float(self.point),
            "half_width": _json_float(self.half_width),
            "lower": _json_float(self.lower),
            "upper": _json_float(self.upper),
            "delta": self.delta,
            "alpha": self.alpha,
            "K": self.k_used,
            "per_k": [
                {
                    "k": t.k,
                    "a_hat": _json_float(t.a_hat),
                    "b_hat": _json_float(t.b_hat),
                    "c_hat": _json_float(t.c_hat),
                    "d_hat": _json_float(t.d_hat),
                    "tau": _json_float(t.tau),
                    "g_hat": _json_float(t.g_hat) if t.g_hat is not None else None,
                }
                for t in self.per_k_terms
            ],
            "extras": {k: _json_value(v) for k, v in self.extras.items()},
        }


def _json_float(x: float) -> float | str:
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return float(x)


def _json_value(v):
    if isinstance(v, float):
        return _json_float(v)
    if isinstance(v, dict):
        return {k: _json_value(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_json_value(x) for x in v]
    return v


def tau(delta: float, m: int, d_plus: int) -> float:
    """Infimum t > 0 with (1 + ceil(ln(2m/t))_+) * d_plus * e^{-t} <= delta.

    The ceiling is piecewise constant with plateaus n on [2m e^{-n}, 2m e^{-(n-1)});
    within each plateau the defining expression is (1+n) d_plus e^{-t}, solved in
    closed form, and the infimum is the smallest feasible plateau candidate.  No
    bisection across the discontinuities is needed.
    """
    if not 0 < delta < 1:
        raise ValueError("delta must lie in (0, 1)")
    if d_plus < 2:
        raise ValueError("d_plus must be at least 2")
    if m < 0:
        raise ValueError("m must be non-negative")
    base = math.log(d_plus / delta)
    if m == 0:
        # ln(2m/t) is -inf for every t > 0, so the ceiling clamp is always 0
        return base
    # plateau 0 covers t >= 2m
    candidates = [max(base, 2.0 * m)]
    n = 1
    while True:
        right = 2.0 * m * math.exp(-(n - 1))
        if right <= base:
            break
        left = 2.0 * m * math.exp(-n)
        t_star = math.log((1 + n) * d_plus / delta)
        candidate = max(left, t_star)
        if candidate < right:
            candidates.append(candidate)
        n += 1
    result = min(candidates)
    assert _tau_expression(result, m, d_plus) <= delta * (1 + 1e-12)
    return result


def _tau_expression(t: float, m: int, d_plus: int) -> float:
    ceil_part = max(0, math.ceil(math.log(2.0 * m / t))) if m > 0 else 0
    return (1 + ceil_part) * d_plus * math.exp(-t)


def smoothing_deviation_term(tau_value: float, n_min: float, alpha: float, d: int) -> float:
    """d_hat: l-infinity learning bound plus the additive-smoothing bias."""
    denom = n_min + d * alpha
    return 4.0 * tau_value * math.sqrt(d / denom) + 2.0 * alpha * d / denom


def row_norm_term(d_hat: float, n_min: float, n_max: float, alpha: float, d: int) -> float:
    """a_hat: rescaled-matrix spectral error, scaled by the visit-count imbalance."""
    return math.sqrt(d) * (n_max + d * alpha) / (n_min + d * alpha) * d_hat


def stationary_deviation_term(
    d_hat: float, gap: float, n_steps: int, n_min: float, alpha: float, d: int
) -> float:
    """b_hat: stationary-law perturbation bound with the empirical gap as divisor."""
    if gap <= 0:
        raise DegenerateGapError("empirical gap divisor must be positive")
    log_arg = 2.0 * math.sqrt(2.0 * (n_steps + d * d * alpha) / (n_min + d * alpha))
    return UNIVERSAL_CONSTANT / gap * math.log(log_arg) * d_hat


def relative_stationary_term(b_hat: float, pi_hat: np.ndarray) -> float:
    """c_hat: half the worst relative stationary error; +inf when the clamp hits zero."""
    worst = 0.0
    for p in np.asarray(pi_hat, dtype=float):
        worst = max(worst, b_hat / p)
        slack = p - b_hat
        if slack <= 0:
            return math.inf
        worst = max(worst, b_hat / slack)
    return 0.5 * worst


def perturbation_kappa(gap_dilated_emp: float, pimin_emp: float) -> float:
    """Stationary-law sensitivity coefficient (48 / gap) * ln(2 sqrt(2 / pi_min))."""
    if gap_dilated_emp <= 0:
        raise DegenerateGapError("gap must be positive")
    if not 0 < pimin_emp < 1:
        raise ValueError("pimin_emp must lie in (0, 1)")
    return UNIVERSAL_CONSTANT / gap_dilated_emp * math.log(2.0 * math.sqrt(2.0 / pimin_emp))


def empirical_linf_bound(counts: SkippedCounts, delta: float, d: int) -> float:
    """High-confidence l-infinity bound 4 tau sqrt(d / Nmin) for the raw empirical chain."""
    if counts.n_min == 0:
        return math.inf
    t = tau(delta / d, counts.n_steps, d + 1)
    return 4.0 * t * math.sqrt(d / counts.n_min)


def interval_terms(
    counts: SkippedCounts,
    est: SmoothedEstimates,
    gap_emp: float,
    alpha: float,
    delta: float,
    K: int,
    d: int,
    g_hat: float | None = None,
) -> IntervalTerms:
    """All four per-skip terms at skip k, under the joint failure split delta/(4 d K)."""
    tau_value = tau(delta / (4.0 * d * K), counts.n_steps, d + 1)
    d_hat = smoothing_deviation_term(tau_value, counts.n_min, alpha, d)
    a_hat = row_norm_term(d_hat, counts.n_min, counts.n_max, alpha, d)
    b_hat = stationary_deviation_term(d_hat, gap_emp, counts.n_steps, counts.n_min, alpha, d)
    c_hat = relative_stationary_term(b_hat, est.pi_hat)
    return IntervalTerms(
        k=counts.k, a_hat=a_hat, b_hat=b_hat, c_hat=c_hat, d_hat=d_hat,
        tau=tau_value, g_hat=g_hat,
    )


def _per_k_terms(traj: Trajectory, K: int, alpha: float, delta: float):
    counts_by_k = {k: skipped_counts(traj, k) for k in range(1, K + 1)}
    estimate = estimate_pssg_from_counts(counts_by_k, alpha)
    g_by_k = {k: g for k, g, _ in estimate.per_k}
    terms = []
    for k in range(1, K + 1):
        counts = counts_by_k[k]
        est = smoothed_estimates(counts, alpha)
        gap_emp = empirical_dilated_pssg(est.m_hat, k_max=K)
        terms.append(
            interval_terms(counts, est, gap_emp, alpha, delta, K, traj.d, g_hat=g_by_k[k])
        )
    return estimate, tuple(terms)


def pssg_interval(traj: Trajectory, K: int, alpha: float, delta: float) -> ConfidenceReport:
    """Two-sided interval for the dilated pseudo-spectral gap.

    half_width = 1/K + max_k (a_hat + 2 c_hat + c_hat^2) / k.  Whenever some
    c_hat is infinite the interval is reported vacuous on [0, 1] rather than
    erroring.  extras carries the factor-two implied range for the plain
    pseudo-spectral gap and the mixing-time sandwich at the point estimates.
    """
    if alpha <= 0:
        raise ValueError("interval construction requires alpha > 0")
    if K < 1:
        raise ValueError("K must be at least 1")
    estimate, terms = _per_k_terms(traj, K, alpha, delta)
    spread = max((t.a_hat + 2.0 * t.c_hat + t.c_hat**2) / t.k for t in terms)
    half_width = 1.0 / K + spread
    point = estimate.value
    lower = min(max(point - half_width, 0.0), 1.0)
    upper = min(point + half_width, 1.0)
    pimin_point = _smoothed_pimin_point(traj, alpha)
    extras = {
        "gamma_ps_implied": {
            "point_low": point,
            "point_high": min(2.0 * point, 1.0),
            "lower": lower,
            "upper": min(2.0 * upper, 1.0),
        },
        "tmix_sandwich": _tmix_sandwich(point, pimin_point),
        "gap_divisor": "dilated_pseudo_spectral_gap_of_empirical_chain",
    }
    return ConfidenceReport(
        target="pssg_dilated",
        point=point,
        half_width=half_width,
        lower=lower,
        upper=upper,
        delta=delta,
        alpha=alpha,
        k_used=K,
        per_k_terms=terms,
        extras=extras,
    )


def _tmix_sandwich(gamma_dilated: float, pimin: float) -> dict:
    if gamma_dilated <= 0 or not 0 < pimin < 1:
        return {"lower": math.inf, "upper": math.inf}
    upper = (math.log(1.0 / pimin) + 2.0 * math.log(2.0) + 1.0) / gamma_dilated
    return {"lower": 1.0 / (4.0 * gamma_dilated), "upper": upper}


def _smoothed_pimin_point(traj: Trajectory, alpha: float) -> float:
    counts = skipped_counts(traj, 1)
    est = smoothed_estimates(counts, alpha)
    return float(est.pi_hat.min())


def pimin_interval(
    traj: Trajectory, alpha: float, delta: float, K: int = 1
) -> ConfidenceReport:
    """Two-sided interval for the minimum stationary probability.

    The half width is b_hat at skip 1.  The lower endpoint never drops below
    the smoothing floor d alpha / (m - 1 + d^2 alpha), which also bounds the
    point estimate from below; K sets the failure split when the report is
    issued jointly with the gap interval.
    """
    if alpha <= 0:
        raise ValueError("interval construction requires alpha > 0")
    counts = skipped_counts(traj, 1)
    est = smoothed_estimates(counts, alpha)
    d = traj.d
    gap_emp = empirical_dilated_pssg(est.m_hat, k_max=K)
    terms = interval_terms(counts, est, gap_emp, alpha, delta, K, d)
    point = float(est.pi_hat.min())
    half_width = terms.b_hat
    floor = d * alpha / (counts.n_steps + d * d * alpha)
    lower = max(point - half_width, floor)
    upper = min(point + half_width, 1.0)
    return ConfidenceReport(
        target="pimin",
        point=point,
        half_width=half_width,
        lower=lower,
        upper=upper,
        delta=delta,
        alpha=alpha,
        k_used=K,
        per_k_terms=(terms,),
    )


def reversible_intervals(traj: Trajectory, alpha: float, delta: float) -> ConfidenceReport:
    """Absolute-spectral-gap interval for trajectories from a reversible chain.

    Uses the additive-reversiblization estimate as both point and gap divisor
    and the lighter failure split delta/d available in the reversible case.
    The matching stationary-minimum bound b_hat is exposed in extras.
    """
    if alpha <= 0:
        raise ValueError("interval construction requires alpha > 0")
    counts = skipped_counts(traj, 1)
    est = smoothed_estimates(counts, alpha)
    d = traj.d
    point = asg_of_symmetrized(est)
    tau_value = tau(delta / d, counts.n_steps, d + 1)
    d_hat = smoothing_deviation_term(tau_value, counts.n_min, alpha, d)
    a_hat = row_norm_term(d_hat, counts.n_min, counts.n_max, alpha, d)
    b_hat = stationary_deviation_term(
        d_hat, point, counts.n_steps, counts.n_min, alpha, d
    )
    c_hat = relative_stationary_term(b_hat, est.pi_hat)
    terms = IntervalTerms(
        k=1, a_hat=a_hat, b_hat=b_hat, c_hat=c_hat, d_hat=d_hat, tau=tau_value,
        g_hat=point,
    )
    half_width = a_hat + 2.0 * c_hat + c_hat**2
    lower = min(max(point - half_width, 0.0), 1.0)
    upper = min(point + half_width, 1.0)
    pimin_point = float(est.pi_hat.min())
    extras = {
        "pimin_point": pimin_point,
        "pimin_half_width": b_hat,
        "gap_divisor": "asg_of_additive_reversiblization",
    }
    return ConfidenceReport(
        target="asg_reversible",
        point=point,
        half_width=half_width,
        lower=lower,
        upper=upper,
        delta=delta,
        alpha=alpha,
        k_used=1,
        per_k_terms=(terms,),
        extras=extras,
    )
