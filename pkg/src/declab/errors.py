"""Exception taxonomy shared by all lab modules."""


class LabError(Exception):
    """Base class for all lab-specific errors."""


class DivisibilityError(LabError):
    """A required length ratio is not a positive integer."""


class DomainError(LabError):
    """An input lies outside the mathematically valid domain."""


class SeparationError(LabError):
    """Two intervals violate a required separation condition."""


class DegenerateInputError(LabError):
    """The input makes the requested ratio 0/0 or x/0."""


class ParameterError(LabError):
    """A scalar parameter is outside its admissible range."""


class GridCoverageError(LabError):
    """A field grid does not cover the requested integration region."""


class CapExceededError(LabError):
    """A resource guard (size cap) was exceeded."""


class ThresholdError(LabError):
    """An asymptotic-regime entry point was called below its threshold."""


class ConditionError(LabError):
    """A side condition linking several parameters fails."""


class RangeError(LabError):
    """Extended-range arithmetic overflow or domain violation."""


class ConfigError(LabError):
    """Malformed suite configuration."""
