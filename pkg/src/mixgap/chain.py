"""Exact spectral and mixing quantities for fully known finite-state chains.

Everything here operates on chains given by their full transition matrix and
serves as the ground-truth oracle layer for the trajectory-based estimators.
All types are immutable after construction and all operations are pure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    MissingGapError,
    MixingTimeOverflowError,
    NoConvergenceError,
    NonErgodicError,
    NotReversibleError,
    ZeroStationaryEntryError,
)

ROW_SUM_TOL = 1e-12
STATIONARY_RESIDUAL_TOL = 1e-12
REVERSIBILITY_RTOL = 1e-10
MIXING_TIME_CAP = 10**6

# dimension threshold: direct linear solve below, power iteration above
_DIRECT_SOLVE_MAX_DIM = 2000
# hard stop for the adaptive skip-rate scan; unreachable for genuine ergodic input
_PSSG_SCAN_LIMIT = 100_000


def _readonly(a: np.ndarray) -> np.ndarray:
    out = np.array(a, dtype=float)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class TransitionMatrix:
    """Row-stochastic d x d matrix; rows must sum to 1 within 1e-12."""

    entries: np.ndarray

    def __post_init__(self):
        entries = np.asarray(self.entries, dtype=float)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
            raise ValueError(f"transition matrix must be square, got shape {entries.shape}")
        if entries.shape[0] < 1:
            raise ValueError("transition matrix must have at least one state")
        if np.any(entries < 0):
            raise ValueError("transition matrix entries must be non-negative")
        row_sums = entries.sum(axis=1)
        if np.max(np.abs(row_sums - 1.0)) > ROW_SUM_TOL:
            raise ValueError("transition matrix rows must sum to 1 within 1e-12")
        object.__setattr__(self, "entries", _readonly(entries))

    @property
    def dim(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True)
class StationaryDistribution:
    """Stationary law of a chain; entries sum to 1 within 1e-12."""

    probs: np.ndarray

    def __post_init__(self):
        probs = np.asarray(self.probs, dtype=float)
        if probs.ndim != 1:
            raise ValueError("stationary distribution must be a vector")
        if np.any(probs < 0):
            raise ValueError("stationary distribution entries must be non-negative")
        if abs(probs.sum() - 1.0) > ROW_SUM_TOL:
            raise ValueError("stationary distribution must sum to 1 within 1e-12")
        object.__setattr__(self, "probs", _readonly(probs))

    @property
    def dim(self) -> int:
        return self.probs.shape[0]

    @property
    def pi_min(self) -> float:
        return float(self.probs.min())


@dataclass(frozen=True)
class RescaledMatrix:
    """Similarity transform D^{1/2} M D^{-1/2}; symmetric iff the chain is reversible."""

    entries: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "entries", _readonly(self.entries))

    @property
    def dim(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True)
class DilatedMatrix:
    """2d x 2d block matrix [[0, A], [A_adj, 0]].

    flavor "stochastic": A is the chain, A_adj its time reversal; the result is a
    reversible (periodic) chain on the doubled state space.
    flavor "symmetric": A_adj = A^T; the result is a symmetric matrix whose
    eigenvalues are the singular values of A with both signs.
    """

    entries: np.ndarray
    flavor: str

    def __post_init__(self):
        entries = np.asarray(self.entries, dtype=float)
        if self.flavor not in ("stochastic", "symmetric"):
            raise ValueError(f"unknown dilation flavor {self.flavor!r}")
        n = entries.shape[0]
        if entries.ndim != 2 or entries.shape[1] != n or n % 2 != 0:
            raise ValueError("dilated matrix must be square with even dimension")
        if self.flavor == "stochastic":
            if np.max(np.abs(entries.sum(axis=1) - 1.0)) > ROW_SUM_TOL:
                raise ValueError("stochastic dilation rows must sum to 1")
        else:
            if np.max(np.abs(entries - entries.T)) > 1e-12:
                raise ValueError("symmetric dilation must equal its transpose")
        object.__setattr__(self, "entries", _readonly(entries))

    @property
    def half_dim(self) -> int:
        return self.entries.shape[0] // 2


@dataclass(frozen=True)
class SpectralSummary:
    """Exact spectral quantities of a known chain.

    gamma and gamma_star are populated only for reversible chains.  k_ps is the
    smallest skip rate attaining the pseudo-spectral gap.
    """

    gamma: float | None
    gamma_star: float | None
    gamma_ps: float
    k_ps: int
    gamma_ps_dilated: float
    t_mix: int
    balance_beta: float


def is_ergodic(tm: TransitionMatrix) -> bool:
    """Primitivity test: some power of the chain is entrywise positive.

    Uses boolean matrix powers up to the (d-1)^2 + 1 exponent, which is
    sufficient and necessary for primitive non-negative matrices.
    """
    adj = (tm.entries > 0).astype(float)
    d = tm.dim
    if d == 1:
        return bool(adj[0, 0] > 0)
    exponent = (d - 1) ** 2 + 1
    result = np.eye(d)
    base = adj
    e = exponent
    while e:
        if e & 1:
            result = (result @ base > 0).astype(float)
        base = (base @ base > 0).astype(float)
        e >>= 1
    return bool(np.all(result > 0))


def _solve_stationary_direct(entries: np.ndarray) -> np.ndarray:
    d = entries.shape[0]
    a = entries.T - np.eye(d)
    a[-1, :] = 1.0
    b = np.zeros(d)
    b[-1] = 1.0
    pi = np.linalg.solve(a, b)
    return pi / pi.sum()


def _solve_stationary_power(entries: np.ndarray, max_iter: int = 200_000) -> np.ndarray:
    d = entries.shape[0]
    pi = np.full(d, 1.0 / d)
    for _ in range(max_iter):
        nxt = pi @ entries
        nxt /= nxt.sum()
        if np.abs(nxt - pi).sum() < 1e-15:
            return nxt
        pi = nxt
    return pi


def stationary_distribution(tm: TransitionMatrix) -> StationaryDistribution:
    """Unique stationary law of an ergodic chain, solved to ||pi M - pi||_1 <= 1e-12."""
    if not is_ergodic(tm):
        raise NonErgodicError("chain is not ergodic (primitivity check failed)")
    entries = tm.entries
    if tm.dim <= _DIRECT_SOLVE_MAX_DIM:
        pi = _solve_stationary_direct(entries)
    else:
        pi = _solve_stationary_power(entries)
    # polish with a few fixed-point sweeps if the solve left residual behind
    for _ in range(50):
        residual = np.abs(pi @ entries - pi).sum()
        if residual <= STATIONARY_RESIDUAL_TOL:
            break
        pi = pi @ entries
        pi /= pi.sum()
    else:
        raise NoConvergenceError(
            f"stationary solve stalled at residual {np.abs(pi @ entries - pi).sum():.3e}"
        )
    if np.any(pi <= 0):
        raise NoConvergenceError("stationary solve returned non-positive entries")
    return StationaryDistribution(probs=pi)


def _require_positive(pi: StationaryDistribution) -> np.ndarray:
    probs = pi.probs
    if np.any(probs <= 0):
        raise ZeroStationaryEntryError("operation requires strictly positive stationary law")
    return probs


def time_reversal(tm: TransitionMatrix, pi: StationaryDistribution) -> TransitionMatrix:
    """Adjoint chain M*(i,j) = pi_j M(j,i) / pi_i; equals M exactly when reversible."""
    probs = _require_positive(pi)
    rev = (tm.entries.T * probs[None, :]) / probs[:, None]
    return TransitionMatrix(entries=rev)


def is_reversible(tm: TransitionMatrix, pi: StationaryDistribution) -> bool:
    """Detailed-balance check: pi_i M(i,j) symmetric within a relative 1e-10."""
    q = pi.probs[:, None] * tm.entries
    scale = max(q.max(), 1e-300)
    return bool(np.max(np.abs(q - q.T)) <= REVERSIBILITY_RTOL * scale)


def rescaled_matrix(tm: TransitionMatrix, pi: StationaryDistribution) -> RescaledMatrix:
    """Similarity rescaling L(i,j) = sqrt(pi_i / pi_j) M(i,j)."""
    probs = _require_positive(pi)
    root = np.sqrt(probs)
    return RescaledMatrix(entries=(root[:, None] * tm.entries) / root[None, :])


def _rescale(entries: np.ndarray, probs: np.ndarray) -> np.ndarray:
    root = np.sqrt(probs)
    return (root[:, None] * entries) / root[None, :]


def dilate(tm: TransitionMatrix, pi: StationaryDistribution) -> DilatedMatrix:
    """Doubled-space reversiblization [[0, M], [M*, 0]] with stationary law (pi, pi)/2."""
    probs = _require_positive(pi)
    if np.abs(probs @ tm.entries - probs).sum() > 1e-9:
        raise ValueError("pi is not stationary for the chain being dilated")
    d = tm.dim
    rev = time_reversal(tm, pi).entries
    block = np.zeros((2 * d, 2 * d))
    block[:d, d:] = tm.entries
    block[d:, :d] = rev
    return DilatedMatrix(entries=block, flavor="stochastic")


def dilate_sym(a: np.ndarray) -> DilatedMatrix:
    """Self-adjoint dilation [[0, A], [A^T, 0]] of an arbitrary real square matrix."""
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("dilate_sym expects a square matrix")
    d = a.shape[0]
    block = np.zeros((2 * d, 2 * d))
    block[:d, d:] = a
    block[d:, :d] = a.T
    return DilatedMatrix(entries=block, flavor="symmetric")


def _symmetric_eigenvalues_desc(sym: np.ndarray) -> np.ndarray:
    sym = (sym + sym.T) / 2.0
    return np.linalg.eigvalsh(sym)[::-1]


def spectral_gaps(tm: TransitionMatrix, pi: StationaryDistribution) -> tuple[float, float]:
    """Gap 1 - lambda_2 and absolute gap 1 - max(lambda_2, |lambda_d|) of a reversible chain."""
    if tm.dim < 2:
        raise ValueError("spectral gaps need at least two states")
    if not is_reversible(tm, pi):
        raise NotReversibleError("detailed balance fails beyond tolerance")
    lam = _symmetric_eigenvalues_desc(_rescale(tm.entries, _require_positive(pi)))
    gamma = 1.0 - lam[1]
    gamma_star = 1.0 - max(lam[1], abs(lam[-1]))
    return float(gamma), float(gamma_star)


def _stochastic_power(entries: np.ndarray, k: int) -> np.ndarray:
    """k-th power by repeated multiplication, renormalizing rows if drift exceeds 1e-12."""
    out = np.eye(entries.shape[0])
    for _ in range(k):
        out = out @ entries
        sums = out.sum(axis=1)
        if np.max(np.abs(sums - 1.0)) > 1e-12:
            out = out / sums[:, None]
    return out


def multiplicative_gap(tm: TransitionMatrix, pi: StationaryDistribution, k: int = 1) -> float:
    """Gap of the multiplicative reversiblization (M*)^k M^k."""
    probs = _require_positive(pi)
    rev = time_reversal(tm, pi).entries
    prod = _stochastic_power(rev, k) @ _stochastic_power(tm.entries, k)
    lam = _symmetric_eigenvalues_desc(_rescale(prod, probs))
    return float(1.0 - lam[1])


def dilated_gap(tm: TransitionMatrix, pi: StationaryDistribution, k: int = 1) -> float:
    """Gap of the doubled-space reversiblization of the k-th power of the chain."""
    probs = _require_positive(pi)
    lk = _rescale(_stochastic_power(tm.entries, k), probs)
    lam = _symmetric_eigenvalues_desc(dilate_sym(lk).entries)
    return float(1.0 - lam[1])


def _max_over_skips(per_k_gap, tm, pi, k_max):
    """Scan g(k)/k for k = 1, 2, ...; prune once 1/k cannot beat the incumbent.

    g(k) lies in [0, 1], so g(j)/j <= 1/j; the scan stops at the first k with
    1/k < best.  With k_max=None the cap is 10 * ceil(1 / g(1)) when g(1) > 0,
    re-derived from the first positive ratio otherwise.
    """
    best = 0.0
    best_k = 1
    cap = k_max
    k = 1
    while True:
        ratio = per_k_gap(tm, pi, k) / k
        if ratio > best:
            best = ratio
            best_k = k
        if cap is None and best > 0.0:
            cap = 10 * math.ceil(1.0 / best)
        if cap is not None and k >= cap:
            break
        if best > 0.0 and 1.0 / (k + 1) < best:
            break
        if k >= _PSSG_SCAN_LIMIT:
            raise NoConvergenceError("skip-rate scan exceeded its hard limit")
        k += 1
    return best, best_k


def pseudo_spectral_gap(
    tm: TransitionMatrix, pi: StationaryDistribution, k_max: int | None = None
) -> tuple[float, int]:
    """Max over k of gap((M*)^k M^k) / k, with the smallest attaining k.

    k_max=None uses the adaptive scan: the ratio at skip k is at most 1/k, so
    scanning stops once no larger k can improve on the incumbent.
    """
    if not is_ergodic(tm):
        raise NonErgodicError("pseudo-spectral gap requires an ergodic chain")
    if k_max is not None and k_max < 1:
        raise ValueError("k_max must be at least 1")
    return _max_over_skips(multiplicative_gap, tm, pi, k_max)


def dilated_pseudo_spectral_gap(
    tm: TransitionMatrix, pi: StationaryDistribution, k_max: int | None = None
) -> float:
    """Max over k of the doubled-space reversiblization gap of M^k, divided by k."""
    if not is_ergodic(tm):
        raise NonErgodicError("dilated pseudo-spectral gap requires an ergodic chain")
    if k_max is not None and k_max < 1:
        raise ValueError("k_max must be at least 1")
    best, _ = _max_over_skips(dilated_gap, tm, pi, k_max)
    return best


def mixing_time(tm: TransitionMatrix, xi: float = 0.25, cap: int = MIXING_TIME_CAP) -> int:
    """Smallest t with max_i TV(row_i(M^t), pi) <= xi, TV being half the l1 distance.

    Maximizing over point-mass initial laws suffices because total variation is
    convex in the initial distribution.  Raises past the step cap.
    """
    if not 0 < xi < 0.5:
        raise ValueError("xi must lie in (0, 1/2)")
    if not is_ergodic(tm):
        raise NonErgodicError("mixing time requires an ergodic chain")
    pi = stationary_distribution(tm).probs
    power = tm.entries.copy()
    for t in range(1, cap + 1):
        tv = 0.5 * np.max(np.abs(power - pi[None, :]).sum(axis=1))
        if tv <= xi:
            return t
        power = power @ tm.entries
        sums = power.sum(axis=1)
        if np.max(np.abs(sums - 1.0)) > 1e-12:
            power = power / sums[:, None]
    raise MixingTimeOverflowError(f"mixing time exceeds cap {cap}")


def balance(pi: StationaryDistribution) -> float:
    """Balance coefficient max_ij pi_i / pi_j; 1 for the uniform law."""
    probs = _require_positive(pi)
    return float(probs.max() / probs.min())


def tmix_bounds(
    summary: SpectralSummary, pi_min: float, mode: str
) -> tuple[float, float]:
    """Two-sided mixing-time sandwich from the requested gap.

    mode "reversible" uses the absolute gap, "pseudo" the pseudo-spectral gap,
    "dilated" the doubled-space variant (lower constant 1/4 instead of 1/2).
    """
    if not 0 < pi_min <= 1:
        raise ValueError("pi_min must lie in (0, 1]")
    if mode == "reversible":
        if summary.gamma_star is None:
            raise MissingGapError("summary lacks the absolute spectral gap")
        g = summary.gamma_star
        if g <= 0:
            raise MissingGapError("absolute spectral gap is not positive")
        return ((1.0 / g - 1.0) * math.log(2.0), math.log(4.0 / pi_min) / g)
    if mode == "pseudo":
        g = summary.gamma_ps
        if g <= 0:
            raise MissingGapError("pseudo-spectral gap is not positive")
        return (1.0 / (2.0 * g), (math.log(1.0 / pi_min) + 2.0 * math.log(2.0) + 1.0) / g)
    if mode == "dilated":
        g = summary.gamma_ps_dilated
        if g <= 0:
            raise MissingGapError("dilated pseudo-spectral gap is not positive")
        return (1.0 / (4.0 * g), (math.log(1.0 / pi_min) + 2.0 * math.log(2.0) + 1.0) / g)
    raise ValueError(f"unknown mode {mode!r}")


def spectral_summary(
    tm: TransitionMatrix,
    k_max: int | None = None,
    xi: float = 0.25,
    mixing_cap: int = MIXING_TIME_CAP,
) -> SpectralSummary:
    """Assemble every exact quantity for a known ergodic chain."""
    pi = stationary_distribution(tm)
    reversible = is_reversible(tm, pi)
    gamma = gamma_star = None
    if reversible and tm.dim >= 2:
        gamma, gamma_star = spectral_gaps(tm, pi)
    gamma_ps, k_ps = pseudo_spectral_gap(tm, pi, k_max)
    gamma_dil = dilated_pseudo_spectral_gap(tm, pi, k_max)
    return SpectralSummary(
        gamma=gamma,
        gamma_star=gamma_star,
        gamma_ps=gamma_ps,
        k_ps=k_ps,
        gamma_ps_dilated=gamma_dil,
        t_mix=mixing_time(tm, xi, cap=mixing_cap),
        balance_beta=balance(pi),
    )
