"""Exceptions raised by the gait re-identification pipeline."""
from typing import Optional


class GaitError(Exception):
    """Base class for data errors raised by the pipeline."""


class SequenceError(GaitError, ValueError):
    """A silhouette sequence could not be loaded or is unusable."""


class DegenerateImageError(GaitError, ValueError):
    """An image has zero mass so its moments are undefined."""


class InsufficientVarianceError(GaitError, ValueError):
    """Too few samples or too little variance to fit a whitening model."""


class GalleryError(GaitError, ValueError):
    """The gallery cannot perform the requested operation."""


class GalleryFormatError(GalleryError):
    """A gallery file is malformed."""

    def __init__(self, message: str, line_number: Optional[int] = None) -> None:
        self.line_number = line_number
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)


class GalleryVersionError(GalleryFormatError):
    """A gallery file has an unknown magic line or format version."""
