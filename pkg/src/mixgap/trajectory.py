"""Trajectory simulation and skipped-chain sufficient statistics.

Counting convention: a trajectory X_1..X_m observed at skip rate k yields
n = floor((m-1)/k) pairs (X_{1+k(t-1)}, X_{1+kt}).  Visit counts are taken
over the left endpoints only, so transition-count row sums equal the visit
counts exactly (the final skipped state is never counted as a visit).
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass

import numpy as np

from .chain import ROW_SUM_TOL, TransitionMatrix, _readonly
from .errors import (
    InvalidDistributionError,
    SkipTooLargeError,
    ZeroCountUnsmoothedError,
)


@dataclass(frozen=True)
class Trajectory:
    """Observed state sequence with the seed that generated it (if any)."""

    states: np.ndarray
    d: int
    seed: int | None = None

    def __post_init__(self):
        states = np.asarray(self.states, dtype=np.int64)
        if states.ndim != 1 or states.size < 1:
            raise ValueError("trajectory must be a non-empty state sequence")
        if states.min() < 0 or states.max() >= self.d:
            raise ValueError(f"trajectory states must lie in [0, {self.d})")
        states = states.copy()
        states.setflags(write=False)
        object.__setattr__(self, "states", states)

    @property
    def m(self) -> int:
        return self.states.shape[0]


@dataclass(frozen=True)
class SkippedCounts:
    """Visit and transition counts of the k-skipped chain."""

    k: int
    n_visits: np.ndarray
    n_trans: np.ndarray
    n_steps: int

    def __post_init__(self):
        object.__setattr__(self, "n_visits", _readonly(self.n_visits))
        object.__setattr__(self, "n_trans", _readonly(self.n_trans))

    @property
    def d(self) -> int:
        return self.n_visits.shape[0]

    @property
    def n_min(self) -> float:
        return float(self.n_visits.min())

    @property
    def n_max(self) -> float:
        return float(self.n_visits.max())


@dataclass(frozen=True)
class SmoothedEstimates:
    """Additively smoothed empirical chain, stationary law and rescaled matrix."""

    alpha: float
    m_hat: np.ndarray
    pi_hat: np.ndarray
    l_hat: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "m_hat", _readonly(self.m_hat))
        object.__setattr__(self, "pi_hat", _readonly(self.pi_hat))
        object.__setattr__(self, "l_hat", _readonly(self.l_hat))


def _validate_distribution(mu: np.ndarray, d: int) -> np.ndarray:
    mu = np.asarray(mu, dtype=float)
    if mu.shape != (d,):
        raise InvalidDistributionError(f"initial law must have length {d}")
    if np.any(mu < 0):
        raise InvalidDistributionError("initial law has negative entries")
    if abs(mu.sum() - 1.0) > ROW_SUM_TOL:
        raise InvalidDistributionError("initial law must sum to 1 within 1e-12")
    return mu


def simulate(tm: TransitionMatrix, mu: np.ndarray, m: int, seed: int) -> Trajectory:
    """Sample X_1..X_m from (M, mu), bit-reproducibly.

    PRNG contract: the counter-based 64-bit Philox generator (numpy) keyed with
    `seed`; exactly m uniform doubles are drawn up front; the first selects X_1
    from mu and each subsequent one advances the chain by inverse-CDF sampling
    against the precomputed row CDFs.  Identical inputs give identical output
    on every platform.
    """
    if m < 1:
        raise ValueError("trajectory length must be at least 1")
    d = tm.dim
    mu = _validate_distribution(mu, d)
    rng = np.random.Generator(np.random.Philox(key=int(seed) & (2**64 - 1)))
    uniforms = rng.random(m)
    # bisect against the first d-1 cumulative thresholds: u >= last threshold -> d-1
    mu_thresholds = np.cumsum(mu)[:-1].tolist()
    row_thresholds = [np.cumsum(tm.entries[i])[:-1].tolist() for i in range(d)]
    states = np.empty(m, dtype=np.int64)
    x = bisect_right(mu_thresholds, uniforms[0])
    states[0] = x
    u_list = uniforms.tolist()
    for t in range(1, m):
        x = bisect_right(row_thresholds[x], u_list[t])
        states[t] = x
    return Trajectory(states=states, d=d, seed=int(seed))


def skipped_counts(traj: Trajectory, k: int) -> SkippedCounts:
    """Visit and transition counts over the n = floor((m-1)/k) skipped pairs."""
    if k < 1:
        raise ValueError("skip rate must be at least 1")
    if k > traj.m - 1:
        raise SkipTooLargeError(f"skip rate {k} exceeds m-1 = {traj.m - 1}")
    n = (traj.m - 1) // k
    d = traj.d
    left = traj.states[0 : (n - 1) * k + 1 : k]
    right = traj.states[k : n * k + 1 : k]
    flat = left * d + right
    n_trans = np.bincount(flat, minlength=d * d).astype(float).reshape(d, d)
    return SkippedCounts(k=k, n_visits=n_trans.sum(axis=1), n_trans=n_trans, n_steps=n)


def skipped_counts_stream(states_iter, d: int, k_values: list[int]) -> dict[int, SkippedCounts]:
    """Single-pass counting for several skip rates over a streamed trajectory.

    Holds only a ring buffer of the last max(k_values) states, so memory is
    O(d^2 * len(k_values)) no matter how long the stream is.
    """
    ks = sorted(set(int(k) for k in k_values))
    if not ks or ks[0] < 1:
        raise ValueError("skip rates must be positive")
    kmax = ks[-1]
    trans = {k: np.zeros((d, d)) for k in ks}
    buffer = [0] * kmax
    m = 0
    for raw in states_iter:
        x = int(raw)
        if not 0 <= x < d:
            raise ValueError(f"state {x} out of range [0, {d})")
        pos = m
        for k in ks:
            if pos >= k and pos % k == 0:
                trans[k][buffer[(pos - k) % kmax], x] += 1.0
        buffer[pos % kmax] = x
        m += 1
    out = {}
    for k in ks:
        if k > m - 1:
            raise SkipTooLargeError(f"skip rate {k} exceeds m-1 = {m - 1}")
        n = (m - 1) // k
        total = trans[k].sum()
        assert total == n, f"stream counting mismatch at k={k}: {total} vs {n}"
        out[k] = SkippedCounts(
            k=k, n_visits=trans[k].sum(axis=1), n_trans=trans[k], n_steps=n
        )
    return out


def smoothed_estimates(counts: SkippedCounts, alpha: float) -> SmoothedEstimates:
    """Pseudo-count smoothed chain M_hat, stationary law pi_hat and rescaling L_hat.

    M_hat(i,j) = (N_ij + alpha) / (N_i + d alpha) is exactly row-stochastic;
    pi_hat(i) = (N_i + d alpha) / (n + d^2 alpha) sums to one exactly; and
    L_hat(i,j) = (N_ij + alpha) / sqrt((N_i + d alpha)(N_j + d alpha)), which
    coincides with sqrt(pi_hat_i / pi_hat_j) M_hat(i,j).
    alpha = 0 is legal only when every state was visited.
    """
    if alpha < 0:
        raise ValueError("smoothing parameter must be non-negative")
    if alpha == 0 and counts.n_min == 0:
        raise ZeroCountUnsmoothedError("alpha=0 requires every state to be visited")
    d = counts.d
    visits = counts.n_visits + d * alpha
    trans = counts.n_trans + alpha
    m_hat = trans / visits[:, None]
    pi_hat = visits / (counts.n_steps + d * d * alpha)
    l_hat = trans / np.sqrt(np.outer(visits, visits))
    return SmoothedEstimates(alpha=float(alpha), m_hat=m_hat, pi_hat=pi_hat, l_hat=l_hat)
