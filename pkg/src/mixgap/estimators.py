"""Point estimators driven by a single observed trajectory.

The headline estimator targets the dilated pseudo-spectral gap: for each skip
rate k up to K it builds the smoothed rescaled matrix of the k-skipped chain,
removes the known leading +/-1 eigenpair of its symmetric dilation, and takes
1 minus the remaining spectral radius; the estimate is the best ratio g_k / k.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import chain, eigensolver
from .errors import EigensolverFailureError
from .trajectory import SkippedCounts, SmoothedEstimates, Trajectory, skipped_counts, smoothed_estimates


@dataclass(frozen=True)
class PssgEstimate:
    """Estimate of the dilated pseudo-spectral gap with its per-skip diagnostics.

    per_k rows are (k, g_hat_k, g_hat_k / k); argmax_k is the smallest skip
    attaining the maximum ratio.
    """

    value: float
    per_k: tuple[tuple[int, float, float], ...]
    k_used: int
    alpha: float
    argmax_k: int


def estimate_pimin(traj: Trajectory, alpha: float = 0.0) -> float:
    """Minimum entry of the (optionally smoothed) empirical stationary law at skip 1."""
    counts = skipped_counts(traj, 1)
    d = traj.d
    visits = counts.n_visits + d * alpha
    pi_hat = visits / (counts.n_steps + d * d * alpha)
    return float(pi_hat.min())


def spec_gap_dil_rev(counts: SkippedCounts, alpha: float) -> float:
    """Deflated-dilation gap 1 - |lambda_3| of the smoothed empirical chain."""
    if alpha <= 0:
        raise ValueError("the dilation-gap estimator requires alpha > 0")
    est = smoothed_estimates(counts, alpha)
    try:
        radius = eigensolver.spectral_radius_deflated(est.l_hat, est.pi_hat)
    except np.linalg.LinAlgError as exc:  # pragma: no cover
        raise EigensolverFailureError(str(exc)) from exc
    return float(min(max(1.0 - radius, 0.0), 1.0))


def estimate_pssg_from_counts(
    counts_by_k: dict[int, SkippedCounts], alpha: float
) -> PssgEstimate:
    """Best ratio g_k / k over the supplied skipped counts; ties go to the smallest k."""
    per_k = []
    best = 0.0
    argmax = min(counts_by_k)
    for k in sorted(counts_by_k):
        g = spec_gap_dil_rev(counts_by_k[k], alpha)
        ratio = g / k
        per_k.append((k, g, ratio))
        if ratio > best:
            best = ratio
            argmax = k
    return PssgEstimate(
        value=best,
        per_k=tuple(per_k),
        k_used=max(counts_by_k),
        alpha=float(alpha),
        argmax_k=argmax,
    )


def estimate_pssg_dilated(traj: Trajectory, K: int, alpha: float) -> PssgEstimate:
    """Dilated pseudo-spectral gap estimate from skips 1..K of one trajectory."""
    if K < 1:
        raise ValueError("K must be at least 1")
    counts_by_k = {k: skipped_counts(traj, k) for k in range(1, K + 1)}
    return estimate_pssg_from_counts(counts_by_k, alpha)


def adaptive_K(traj: Trajectory, eps: float) -> int:
    """Sample-driven skip budget ceil((Nmin / eps)^(1/3)), clamped to [1, m-1]."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    n_min = skipped_counts(traj, 1).n_min
    # guard against cube roots of exact cubes landing epsilon above the integer
    k = math.ceil((n_min / eps) ** (1.0 / 3.0) - 1e-9)
    return max(1, min(k, traj.m - 1))


def empirical_dilated_pssg(m_hat: np.ndarray, k_max: int) -> float:
    """Dilated pseudo-spectral gap of the smoothed empirical chain itself.

    The smoothed chain is entrywise positive, hence ergodic with a computable
    stationary law; the exact doubled-space machinery applies verbatim.  Used
    as the gap divisor inside the confidence-interval terms.
    """
    tm = chain.TransitionMatrix(entries=m_hat)
    pi = chain.stationary_distribution(tm)
    return chain.dilated_pseudo_spectral_gap(tm, pi, k_max=k_max)


def estimate_asg_reversible(traj: Trajectory, alpha: float = 0.0) -> float:
    """Absolute-gap estimate through the additive reversiblization (M_hat + M_hat*)/2.

    The reversiblization satisfies detailed balance with respect to the
    smoothed empirical law by construction, so its rescaled form is exactly
    the symmetrization of L_hat and the gap reads off a symmetric spectrum.
    """
    counts = skipped_counts(traj, 1)
    est = smoothed_estimates(counts, alpha)
    return asg_of_symmetrized(est)


def asg_of_symmetrized(est: SmoothedEstimates) -> float:
    """1 - max(lambda_2, |lambda_d|) of the symmetrized rescaled empirical matrix."""
    sym = (est.l_hat + est.l_hat.T) / 2.0
    lam = eigensolver.dense_symmetric_spectrum(sym)
    return float(1.0 - max(lam[1], abs(lam[-1])))
