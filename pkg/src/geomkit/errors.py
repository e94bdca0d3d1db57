"""Exception types shared across geomkit."""


class GeomkitError(Exception):
    """Base class for all library errors."""


class InvalidArgument(GeomkitError, ValueError):
    pass


class SizeLimitError(GeomkitError):
    """Brute-force routine asked to run beyond its supported size."""


class DegeneracyError(GeomkitError):
    """Input is (numerically) linearly dependent or singular."""


class NonUniqueGeodesicError(GeomkitError):
    """Log map requested between (near-)antipodal sphere points."""


class AliasingError(GeomkitError):
    """Grid too coarse for the requested number of Fourier modes."""


class UndefinedAggregateError(GeomkitError):
    """Aggregator has no neutral element for an empty input."""


class TrainingDivergedError(GeomkitError):
    def __init__(self, step: int, loss: float):
        super().__init__(f"loss became {loss} at step {step}")
        self.step = step
        self.loss = loss


class ConsistencyError(GeomkitError):
    """Internal numerical drift exceeded its allowed budget."""
