"""Exception types shared across the package."""

from __future__ import annotations


class FracadaptError(Exception):
    """Base class for all package-specific errors."""


class EvaluationError(FracadaptError):
    """A special-function evaluation failed to converge.

    Carries partial-sum diagnostics so callers can report how far the
    evaluation got before giving up.
    """

    def __init__(self, message: str, *, partial: float | None = None,
                 terms: int | None = None, err_estimate: float | None = None):
        super().__init__(message)
        self.partial = partial
        self.terms = terms
        self.err_estimate = err_estimate


class RootNotFoundError(FracadaptError):
    """Bracket expansion failed to locate a sign change."""


class SingularStepError(FracadaptError):
    """A time-level linear solve had a non-positive diagonal (defensive)."""


class StepCollapseError(FracadaptError):
    """The adaptive step shrank below the machine-representable increment."""


class NonterminationError(FracadaptError):
    """The adaptive algorithm exceeded its level cap; carries the trace."""

    def __init__(self, message: str, trace=None):
        super().__init__(message)
        self.trace = trace


class ExponentUndefinedError(FracadaptError):
    """No initial-singularity exponent can be fitted (degenerate data)."""
