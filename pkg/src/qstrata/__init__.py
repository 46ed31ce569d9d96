"""Geometry of Hermitian operators and density states, Kraus actions,
rank stratification, and concurrence bounds for composite systems."""

from ._common import (
    DegenerateMapError,
    DimensionError,
    SingularMatrixError,
    ValidationError,
)

__version__ = "0.1.0"

__all__ = [
    "DegenerateMapError",
    "DimensionError",
    "SingularMatrixError",
    "ValidationError",
]
