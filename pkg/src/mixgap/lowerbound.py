"""Hard-instance chain families and the information-theoretic oracles over them.

Two parametric families live here: star chains (a hub with self-looping
spokes, used for stationary-minimum lower bounds) and a symmetric
doubly-stochastic family (used for gap lower bounds), together with exact
trajectory-level KL and Hellinger computations between nearby family members.

Conventions pinned by exhaustive-enumeration oracles over all length-m paths:
  * a length-m trajectory applies m-1 transition factors, so the Hellinger
    recursion takes the (m-1)-th power of the entrywise geometric-mean matrix;
  * with both chains started from the l1-normalized Perron left eigenvector u
    of that matrix, 1 - H^2 equals rho^(m-1) exactly;
  * the stationary-start trajectory KL between star chains sharing hub weight
    alpha is (1-alpha) * (1 + (m-1) alpha) * KL(p_eps || p): the initial laws
    contribute (1-alpha) KL and each of the m-1 steps alpha (1-alpha) KL.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .chain import TransitionMatrix
from .errors import (
    AbsoluteContinuityViolationError,
    ConstraintViolationError,
    InvalidDistributionError,
    NoConvergenceError,
)

_SPECTRUM_TOL = 1e-9


@dataclass(frozen=True)
class StarChain:
    """Hub-and-spokes chain: hub returns with probability alpha, spokes self-loop."""

    alpha: float
    spoke_dist: np.ndarray
    matrix: TransitionMatrix

    @property
    def stationary(self) -> np.ndarray:
        return np.concatenate([[self.alpha], (1.0 - self.alpha) * self.spoke_dist])


@dataclass(frozen=True)
class SymmetricFamilyChain:
    """Symmetric doubly-stochastic family member with gap d alpha / (d-1)."""

    alpha: float
    d: int
    matrix: TransitionMatrix


def star_chain(alpha: float, p_bar: np.ndarray) -> StarChain:
    """Star chain on d+1 states: hub row (alpha, (1-alpha) p), spoke rows alpha->hub.

    Construction verifies the closed-form stationary law and the spectrum
    {1, (1-alpha) with multiplicity d-1, 0} to 1e-9.
    """
    if not 0 < alpha < 1:
        raise ConstraintViolationError("alpha must lie in (0, 1)")
    p = np.asarray(p_bar, dtype=float)
    if p.ndim != 1 or p.size < 1 or np.any(p < 0) or abs(p.sum() - 1.0) > 1e-12:
        raise InvalidDistributionError("spoke distribution must be a probability vector")
    d = p.size
    mat = np.zeros((d + 1, d + 1))
    mat[0, 0] = alpha
    mat[0, 1:] = (1.0 - alpha) * p
    for i in range(1, d + 1):
        mat[i, 0] = alpha
        mat[i, i] = 1.0 - alpha
    tm = TransitionMatrix(entries=mat)
    pi = np.concatenate([[alpha], (1.0 - alpha) * p])
    if np.abs(pi @ mat - pi).sum() > 1e-12:
        raise ConstraintViolationError("closed-form stationary law failed verification")
    expected = np.sort(np.concatenate([[1.0, 0.0], np.full(d - 1, 1.0 - alpha)]))
    actual = np.sort(np.linalg.eigvals(mat).real)
    if np.max(np.abs(actual - expected)) > _SPECTRUM_TOL:
        raise ConstraintViolationError("star-chain spectrum failed verification")
    return StarChain(alpha=alpha, spoke_dist=p, matrix=tm)


def perturbed_pair(beta: float, eps: float, d: int) -> tuple[np.ndarray, np.ndarray]:
    """Spoke-distribution pair differing by +/-2 eps on the first two entries."""
    if d < 3:
        raise ConstraintViolationError("need at least 3 spokes")
    if not (2 * eps < beta < 1.0 / d) or eps < 0:
        raise ConstraintViolationError("parameters must satisfy 0 <= 2 eps < beta < 1/d")
    tail = (1.0 - 2.0 * beta) / (d - 2)
    p = np.concatenate([[beta, beta], np.full(d - 2, tail)])
    p_eps = np.concatenate([[beta + 2.0 * eps, beta - 2.0 * eps], np.full(d - 2, tail)])
    return p, p_eps


def kl_divergence(nu0: np.ndarray, nu1: np.ndarray) -> float:
    """KL(nu0 || nu1) with the 0 ln 0 = 0 convention."""
    nu0 = np.asarray(nu0, dtype=float)
    nu1 = np.asarray(nu1, dtype=float)
    if nu0.shape != nu1.shape:
        raise ValueError("distributions must share a support size")
    total = 0.0
    for a, b in zip(nu0, nu1):
        if a == 0:
            continue
        if b == 0:
            raise AbsoluteContinuityViolationError("nu0 is not absolutely continuous wrt nu1")
        total += a * math.log(a / b)
    return total


def kl_trajectory_star(
    alpha: float, p_bar: np.ndarray, p_bar_eps: np.ndarray, m: int
) -> float:
    """Exact KL between stationary length-m trajectory laws of two star chains.

    Only the hub row differs between the chains and every row assigns the hub
    probability alpha, so the divergence telescopes: the initial stationary
    laws contribute (1-alpha) KL(p_eps || p) and each of the m-1 transitions
    contributes alpha (1-alpha) KL(p_eps || p).
    """
    if m < 1:
        raise ValueError("trajectory length must be at least 1")
    if not 0 < alpha < 1:
        raise ConstraintViolationError("alpha must lie in (0, 1)")
    step = kl_divergence(p_bar_eps, p_bar)
    return (1.0 - alpha) * (1.0 + (m - 1) * alpha) * step


def symmetric_family(alpha: float, d: int) -> SymmetricFamilyChain:
    """Symmetric doubly-stochastic chain with eigenvalues
    {1, 1 - d alpha/(d-1), 1 - ((d-1)/(2(d-2)) + alpha/(d-1)) x (d-2)}.

    Constraints d >= 4 and 0 < alpha < 1/8 keep both non-unit eigenvalues
    positive, so the gap equals the absolute gap and is d alpha / (d-1).
    """
    if d < 4:
        raise ConstraintViolationError("family requires d >= 4")
    if not 0 < alpha < 0.125:
        raise ConstraintViolationError("family requires 0 < alpha < 1/8")
    mat = np.full((d, d), 1.0 / (2.0 * (d - 2)))
    mat[0, 0] = 1.0 - alpha
    mat[0, 1:] = alpha / (d - 1)
    mat[1:, 0] = alpha / (d - 1)
    for i in range(1, d):
        mat[i, i] = 0.5 - alpha / (d - 1)
    tm = TransitionMatrix(entries=mat)
    expected = np.sort(
        np.concatenate(
            [
                [1.0, 1.0 - d * alpha / (d - 1)],
                np.full(d - 2, 1.0 - ((d - 1) / (2.0 * (d - 2)) + alpha / (d - 1))),
            ]
        )
    )
    actual = np.linalg.eigvalsh((mat + mat.T) / 2.0)
    if np.max(np.abs(np.sort(actual) - expected)) > _SPECTRUM_TOL:
        raise ConstraintViolationError("symmetric-family spectrum failed verification")
    return SymmetricFamilyChain(alpha=alpha, d=d, matrix=tm)


def symmetric_family_gap(alpha: float, d: int) -> float:
    """Closed-form gap d alpha / (d-1) of the symmetric family (alpha < 1/4)."""
    return d * alpha / (d - 1)


def geometric_mean_pair(
    m0: np.ndarray, m1: np.ndarray, mu0: np.ndarray, mu1: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Entrywise geometric means of two chains and their initial laws.

    Rows of the matrix mean are sub-stochastic by Cauchy-Schwarz.
    """
    m0 = np.asarray(m0, dtype=float)
    m1 = np.asarray(m1, dtype=float)
    if m0.shape != m1.shape:
        raise ValueError("matrices must share a shape")
    return np.sqrt(m0 * m1), np.sqrt(np.asarray(mu0, dtype=float) * np.asarray(mu1, dtype=float))


def hellinger_trajectory(
    m0: np.ndarray, mu0: np.ndarray, m1: np.ndarray, mu1: np.ndarray, m: int
) -> float:
    """Squared Hellinger distance between length-m trajectory laws.

    1 - H^2 = [mu0, mu1]_sqrt (G)^(m-1) 1^T with G the entrywise geometric mean
    of the transition matrices: a length-m path carries m-1 transition factors.
    """
    if m < 1:
        raise ValueError("trajectory length must be at least 1")
    g, mu_sqrt = geometric_mean_pair(m0, m1, mu0, mu1)
    affinity = float(mu_sqrt @ np.linalg.matrix_power(g, m - 1) @ np.ones(g.shape[0]))
    return min(max(1.0 - affinity, 0.0), 1.0)


def rho_closed_form(alpha0: float, alpha1: float, d: int) -> float:
    """Perron value of the geometric-mean matrix of two symmetric-family members.

    rho = ((r + s + 1/2) + sqrt((r - s - 1/2)^2 + 4 alpha0 alpha1/(d-1))) / 2
    with r = sqrt((1-alpha0)(1-alpha1)) and
    s = sqrt((1/2 - alpha0/(d-1)) (1/2 - alpha1/(d-1))).
    """
    if d < 4:
        raise ConstraintViolationError("closed form requires d >= 4")
    if not (0 < alpha0 < 0.25 and 0 < alpha1 < 0.25):
        raise ConstraintViolationError("closed form requires hub weights in (0, 1/4)")
    r = math.sqrt((1.0 - alpha0) * (1.0 - alpha1))
    s = math.sqrt((0.5 - alpha0 / (d - 1)) * (0.5 - alpha1 / (d - 1)))
    disc = (r - s - 0.5) ** 2 + 4.0 * alpha0 * alpha1 / (d - 1)
    return ((r + s + 0.5) + math.sqrt(disc)) / 2.0


def perron_left_eigenvector(
    g: np.ndarray, tol: float = 1e-14, max_iter: int = 100_000
) -> tuple[float, np.ndarray]:
    """Perron value and l1-normalized positive left eigenvector by power iteration."""
    g = np.asarray(g, dtype=float)
    n = g.shape[0]
    u = np.full(n, 1.0 / n)
    rho = 0.0
    for _ in range(max_iter):
        nxt = u @ g
        nxt_rho = nxt.sum()
        nxt = nxt / nxt_rho
        if np.abs(nxt - u).max() < tol:
            u = nxt
            rho = nxt_rho
            break
        u = nxt
        rho = nxt_rho
    else:
        raise NoConvergenceError("power iteration on the geometric-mean matrix stalled")
    if np.any(u <= 1e-14):
        raise NoConvergenceError("Perron vector is not entrywise positive")
    # one Rayleigh-style refinement of the eigenvalue in the l1 sense
    rho = float((u @ g).sum() / u.sum())
    return rho, u
