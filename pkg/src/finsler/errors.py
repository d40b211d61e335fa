"""Exception types shared across the package.

The distinction that matters operationally: `EvaluationDomainError` marks a
point that simply lies outside a metric's admissible domain (verification
sampling may discard and resample such points), while `ConvexityError` and
`NotPositiveDefiniteError` mark a *defective metric* and must never be
silently skipped.
"""


class FinslerError(Exception):
    """Base class for all errors raised by this package."""


class ExpressionError(FinslerError):
    """Malformed metric expression. Carries the 0-based text offset."""

    def __init__(self, message, position=None):
        self.position = position
        if position is not None:
            message = f"{message} at offset {position}"
        super().__init__(message)


class SpecError(FinslerError):
    """Invalid metric specification (bad family, payload, or dimensions)."""


class EvaluationDomainError(FinslerError):
    """Evaluation requested outside the admissible domain (e.g. sqrt of a
    non-positive argument, or a tangent vector too close to zero)."""


class ConvexityError(FinslerError):
    """Randers strong-convexity violation: the a-norm of b reaches 1."""


class NotPositiveDefiniteError(FinslerError):
    """The fundamental tensor failed its Cholesky factorization."""


class TruncationError(FinslerError):
    """A derivative beyond the truncation order of a jet was requested."""
