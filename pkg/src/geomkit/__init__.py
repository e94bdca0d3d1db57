"""Numerical building blocks for geometric deep learning: finite groups and
equivariance, metric geometry, finite-difference calculus, a small
backpropagation engine, sphere geometry, spectral/Fourier analysis and
graph tooling."""

from .errors import (
    AliasingError,
    ConsistencyError,
    DegeneracyError,
    GeomkitError,
    InvalidArgument,
    NonUniqueGeodesicError,
    SizeLimitError,
    TrainingDivergedError,
    UndefinedAggregateError,
)

__version__ = "0.1.0"

__all__ = [
    "AliasingError",
    "ConsistencyError",
    "DegeneracyError",
    "GeomkitError",
    "InvalidArgument",
    "NonUniqueGeodesicError",
    "SizeLimitError",
    "TrainingDivergedError",
    "UndefinedAggregateError",
]
