"""Exception types shared across the package.

Everything raised on bad user input (malformed files, broken invariants,
out-of-range parameters) derives from :class:`ValidationError` so callers
can distinguish "your data is wrong" from genuine runtime faults.
"""


class FselectError(Exception):
    """Base class for all package-specific errors."""


class ValidationError(FselectError, ValueError):
    """Input data or parameters violate a documented invariant."""


class FormatError(ValidationError):
    """On-disk payload is malformed (bad magic, truncation, ragged rows)."""


class NonFiniteValueError(ValidationError):
    """A feature value is NaN or infinite."""


class DimensionMismatchError(ValidationError):
    """Operands disagree on feature dimensionality or length."""


class SampleCountMismatchError(ValidationError):
    """Files or matrices in one bundle disagree on the sample count."""


class LabelOutOfRangeError(ValidationError):
    """A label lies outside [0, c) or a class id is missing entirely."""


class DuplicateExtractorError(ValidationError):
    """Two matrices in a bundle carry the same extractor_id."""


class EmptyClassError(ValidationError):
    """A class has no members where at least one is required."""


class ZeroVectorError(ValidationError):
    """Cosine similarity requested for an all-zero feature vector."""
