"""Exception hierarchy shared by every module.

The CLI maps these onto exit codes, so keep the classes coarse.
"""


class HeadRotError(Exception):
    """Base class for all package errors."""


class InvalidInputError(HeadRotError, ValueError):
    """Input violates a basic precondition (non-finite, wrong shape, not a rotation)."""


class AngleRangeError(InvalidInputError):
    """An angle lies outside the interval a convention or operation allows."""


class UnsupportedError(HeadRotError):
    """The requested convention, conversion pair or operation is not available."""


class DegenerateGeometryError(HeadRotError):
    """Point sets or boxes collapse (collinear keypoints, zero-area bbox)."""


class FormatError(HeadRotError):
    """A file could not be parsed. ``index`` is the 0-based record/line, if known."""

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class ValidationError(HeadRotError):
    """A parsed record failed its invariants. ``index`` names the record."""

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index
