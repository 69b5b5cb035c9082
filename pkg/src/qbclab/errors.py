"""Exception and warning types shared across the package."""

from __future__ import annotations


class QbclabError(Exception):
    """Base class for all package errors."""


class InvariantViolationError(QbclabError):
    """A validated type received data breaking its construction invariant."""


class CrossCheckError(QbclabError):
    """Two independent routes to the same quantity disagreed beyond tolerance.

    Raised by operations that verify their own output (double entry style);
    carries enough context to replay the failing instance.
    """

    def __init__(self, check: str, value: float, bound: float, detail: str = ""):
        self.check = check
        self.value = value
        self.bound = bound
        self.detail = detail
        msg = f"cross check '{check}' failed: value={value!r} bound={bound!r}"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)


class DimMismatchError(QbclabError):
    """Operands live in different dimensions."""


class LengthMismatchError(QbclabError):
    """Classical distributions of different lengths."""


class NotHermitianError(QbclabError):
    """Input matrix is not Hermitian within tolerance."""


class NoConvergenceError(QbclabError):
    """The eigensolver failed to converge."""


class NotPsdError(QbclabError):
    """Matrix has an eigenvalue below the negativity floor."""


class BadRegisterIndexError(QbclabError):
    """Partial trace over an unknown or empty register selection."""


class BadRankError(QbclabError):
    """Requested rank outside 1..dim."""


class InvalidChannelError(QbclabError):
    """Channel action fails the complete positivity or trace checks."""


class DegenerateKError(QbclabError):
    """Measured distributions coincide; the matching channel is undefined."""

    def __init__(self, k: float):
        self.k = k
        super().__init__(f"degenerate distribution gap k={k!r}")


class OutOfRangeError(QbclabError):
    """Scalar parameter outside its documented domain."""


class ConstraintViolatedError(QbclabError):
    """Maximization instance breaks its feasibility constraints."""


class BadDepthError(QbclabError):
    """Composition depth must be a positive integer."""


class CapViolatedError(QbclabError):
    """Adversarial win probability exceeds the allowed cap."""


class StrategySpaceTooLargeError(QbclabError):
    """Deterministic strategy enumeration would exceed the configured cap."""


class NotHonestTranscriptError(QbclabError):
    """Transcript is not produced by any honest execution."""


class EpsTooLargeWarning(UserWarning):
    """Slack parameter outside the regime where the analytic maximizer is proven."""


class EpsOutOfRegimeWarning(UserWarning):
    """Protocol slack outside the regime of the tight cheating analysis."""
