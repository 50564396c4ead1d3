"""Exception hierarchy shared by all mixgap modules."""


class MixgapError(Exception):
    """Base class for all mixgap errors."""


class ParseError(MixgapError):
    """A matrix or trajectory file could not be parsed or validated."""


class NonErgodicError(MixgapError):
    """The chain fails the primitivity (ergodicity) check."""


class NoConvergenceError(MixgapError):
    """An iterative solver did not reach its tolerance."""


class ZeroStationaryEntryError(MixgapError):
    """An operation requiring a strictly positive stationary law got a zero entry."""


class NotReversibleError(MixgapError):
    """Detailed balance fails beyond tolerance for a reversible-only operation."""


class MissingGapError(MixgapError):
    """The requested spectral gap is absent from the summary."""


class MixingTimeOverflowError(MixgapError):
    """Mixing-time iteration exceeded the configured step cap."""


class InvalidDistributionError(MixgapError):
    """A probability vector has negative entries or does not sum to one."""


class SkipTooLargeError(MixgapError):
    """Skip rate k exceeds the number of observed transitions."""


class ZeroCountUnsmoothedError(MixgapError):
    """Unsmoothed (alpha=0) estimates requested while some state was never visited."""


class EigensolverFailureError(MixgapError):
    """The dense or iterative eigensolver failed."""


class DegenerateGapError(MixgapError):
    """A gap used as a divisor is zero or negative."""


class ConstraintViolationError(MixgapError):
    """Family parameters violate their admissible range."""


class AbsoluteContinuityViolationError(MixgapError):
    """KL divergence requested between laws that are not absolutely continuous."""
