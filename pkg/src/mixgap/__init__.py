"""mixgap: mixing-time and spectral-gap estimation for finite Markov chains.

The package splits into an exact oracle layer for fully known chains
(`chain`), trajectory simulation and sufficient statistics (`trajectory`),
symmetric eigensolvers with deflation (`eigensolver`), single-trajectory point
estimators (`estimators`), fully empirical confidence intervals
(`confidence`), hard-instance chain families (`lowerbound`), and the CLI/HTTP
surfaces (`cli`, `service`).
"""

from .chain import (
    DilatedMatrix,
    RescaledMatrix,
    SpectralSummary,
    StationaryDistribution,
    TransitionMatrix,
    balance,
    dilate,
    dilate_sym,
    dilated_gap,
    dilated_pseudo_spectral_gap,
    is_ergodic,
    is_reversible,
    mixing_time,
    multiplicative_gap,
    pseudo_spectral_gap,
    rescaled_matrix,
    spectral_gaps,
    spectral_summary,
    stationary_distribution,
    time_reversal,
    tmix_bounds,
)
from .confidence import (
    ConfidenceReport,
    IntervalTerms,
    empirical_linf_bound,
    interval_terms,
    perturbation_kappa,
    pimin_interval,
    pssg_interval,
    reversible_intervals,
    tau,
)
from .estimators import (
    PssgEstimate,
    adaptive_K,
    estimate_asg_reversible,
    estimate_pimin,
    estimate_pssg_dilated,
    spec_gap_dil_rev,
)
from .trajectory import (
    SkippedCounts,
    SmoothedEstimates,
    Trajectory,
    simulate,
    skipped_counts,
    smoothed_estimates,
)

__version__ = "0.1.0"

__all__ = [
    "TransitionMatrix",
    "StationaryDistribution",
    "RescaledMatrix",
    "DilatedMatrix",
    "SpectralSummary",
    "Trajectory",
    "SkippedCounts",
    "SmoothedEstimates",
    "PssgEstimate",
    "ConfidenceReport",
    "IntervalTerms",
    "stationary_distribution",
    "time_reversal",
    "rescaled_matrix",
    "dilate",
    "dilate_sym",
    "spectral_gaps",
    "pseudo_spectral_gap",
    "dilated_pseudo_spectral_gap",
    "multiplicative_gap",
    "dilated_gap",
    "mixing_time",
    "tmix_bounds",
    "balance",
    "is_ergodic",
    "is_reversible",
    "spectral_summary",
    "simulate",
    "skipped_counts",
    "smoothed_estimates",
    "estimate_pimin",
    "spec_gap_dil_rev",
    "estimate_pssg_dilated",
    "adaptive_K",
    "estimate_asg_reversible",
    "tau",
    "empirical_linf_bound",
    "perturbation_kappa",
    "interval_terms",
    "pssg_interval",
    "pimin_interval",
    "reversible_intervals",
    "__version__",
]
