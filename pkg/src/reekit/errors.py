"""Named error types shared across the toolkit.

Every user-facing failure maps to one of these classes; the HTTP layer and
the CLI report ``code`` (the class name) rather than stack traces, so the
set below is the closed vocabulary of machine-readable error codes.
"""

from __future__ import annotations


class ReekitError(Exception):
    """Base class for all named toolkit errors."""

    def __init__(self, message: str, detail: list | None = None):
        super().__init__(message)
        self.detail = detail or []

    @property
    def code(self) -> str:
        return type(self).__name__


class UnknownStandard(ReekitError):
    pass


class NonPositiveConcentration(ReekitError):
    pass


class TooFewElements(ReekitError):
    pass


class TooFewPoints(ReekitError):
    pass


class DegreeOutOfRange(ReekitError):
    pass


class RankDeficient(ReekitError):
    pass


class ZeroTotal(ReekitError):
    pass


class EmptyDataset(ReekitError):
    pass


class NoHeader(ReekitError):
    pass


class NoElementColumns(ReekitError):
    pass


class DuplicateSampleIds(ReekitError):
    pass


class AmbiguousElementColumns(ReekitError):
    pass


class NotUtf8(ReekitError):
    pass


class NotFound(ReekitError):
    pass


class IndexOutOfRange(ReekitError):
    pass


class UnknownCategory(ReekitError):
    pass


class UnknownKind(ReekitError):
    pass


class TooFewPointsForDensity(ReekitError):
    pass


class UnsupportedKind(ReekitError):
    pass


class InvalidPriceFile(ReekitError):
    pass


class InvalidBody(ReekitError):
    pass
