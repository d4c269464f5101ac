"""Sharp constants for power- and log-weighted L2 inequalities, with numerical checks."""

from . import constants, kernels, special, verify
from .errors import (
    BoundaryLeakError,
    DivergenceError,
    DomainError,
    GridMismatchError,
    QuadratureError,
    SingularEvaluationError,
)

__all__ = [
    "constants",
    "kernels",
    "special",
    "verify",
    "BoundaryLeakError",
    "DivergenceError",
    "DomainError",
    "GridMismatchError",
    "QuadratureError",
    "SingularEvaluationError",
]
