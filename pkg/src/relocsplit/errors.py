"""Exception types shared across the package."""


class RelocSplitError(Exception):
    """Base class for all package errors."""


class DomainError(RelocSplitError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class NonPositiveStepsize(DomainError):
    """Stepsize parameters must be strictly positive."""


class NonMonotoneOperator(RelocSplitError, ValueError):
    """The symmetric part of the supplied matrix has a clearly negative eigenvalue."""


class SingularSystem(RelocSplitError):
    """A linear solve failed or the matrix is numerically singular."""


class UnsupportedSet(RelocSplitError, TypeError):
    """The given set does not expose the projection needed by the check."""


class UnsupportedOperator(RelocSplitError, TypeError):
    """The operator lacks the structure (affine, invertible, ...) the operation needs."""


class BadBlockCount(RelocSplitError, ValueError):
    """A block vector has the wrong number of blocks for this family."""


class DivergenceDetected(RelocSplitError):
    """Iterate norm exceeded the divergence guard; the configuration is not contractive."""


class NotAFixedPoint(RelocSplitError):
    """A point claimed to be fixed fails its residual certificate."""


class ChainMismatch(RelocSplitError):
    """The resolvent chain of a certified fixed point is inconsistent (implementation bug)."""


class MissingBlocks(RelocSplitError, KeyError):
    """The trace lacks the named per-iteration blocks."""


class MissingDistances(RelocSplitError):
    """The trace has no dist_to_fix column; compute distances first."""


class NonSingletonFix(RelocSplitError):
    """Exact distances need a certified singleton fixed-point set (contraction marker)."""


class NoConvergence(RelocSplitError):
    """Fixed-point iteration did not reach the requested tolerance."""

    def __init__(self, message, last_residual=None):
        super().__init__(message)
        self.last_residual = last_residual


class CertificationFailed(RelocSplitError):
    """Sampling contradicts a property the structural hypotheses guarantee."""


class TooFewSamples(RelocSplitError, ValueError):
    """Not enough usable entries remain to fit a rate."""


class ConfigError(RelocSplitError, ValueError):
    """Malformed or contradictory experiment configuration."""
