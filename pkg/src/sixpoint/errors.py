"""Exception types shared across the package."""


class SixPointError(Exception):
    """Base class for all errors raised by sixpoint."""


class DegenerateConfigurationError(SixPointError, ValueError):
    """Points are collinear/coplanar (or coincide) where a basis is required."""


class InsufficientObservationsError(SixPointError, ValueError):
    """Fewer than four usable frames were available for signature estimation."""


class SegmentationError(SixPointError):
    """The segmentation pipeline could not produce the requested number of motions."""


class TrajectoryFormatError(SixPointError, ValueError):
    """A trajectory file does not follow the expected layout."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class SceneInfeasibleError(SixPointError, ValueError):
    """A synthetic scene request cannot be satisfied (e.g. a body leaves the image)."""
