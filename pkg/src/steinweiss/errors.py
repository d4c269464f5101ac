"""Exception hierarchy shared by every module.

The CLI maps these onto its exit codes, so keep the classes stable.
"""


class DomainError(ValueError):
    """Argument outside the region where a formula or integral is defined."""


class SingularEvaluationError(DomainError):
    """Pointwise kernel value requested where the kernel is infinite."""


class GridMismatchError(ValueError):
    """Sampled arrays do not live on the same log grid."""


class BoundaryLeakError(ValueError):
    """A sampled function is not negligible at the edge of its grid."""


class QuadratureError(RuntimeError):
    """Numerical integration did not reach the requested tolerance."""

    def __init__(self, message, est_error=float("nan")):
        super().__init__(message)
        self.est_error = est_error


class DivergenceError(QuadratureError):
    """The requested integral diverges for these parameters."""
