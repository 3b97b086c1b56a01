"""Exception hierarchy.

Each family maps to one CLI exit code, see ``hpcwater.cli``.
"""


class WaterModelError(Exception):
    """Base class for every error raised by the engine."""

    exit_code = 1


class ValidationError(WaterModelError, ValueError):
    """Input violates a documented invariant or range."""

    exit_code = 2


class DomainError(ValidationError):
    """Argument outside the validity window of a formula."""


class ConfigurationError(ValidationError):
    """Model configuration is unusable (e.g. an empty WUE curve)."""


class ParseError(ValidationError):
    """A file could not be parsed; message carries line/field context."""


class RangeViolation(ValidationError):
    """A parameter lies outside its allowed range."""


class SingularityError(ValidationError):
    """A ratio would divide by zero."""


class ParameterResolutionError(WaterModelError, KeyError):
    """A referenced parameter entry (process node, energy source, region) is missing."""

    exit_code = 3

    def __str__(self):
        # KeyError quotes its argument; keep plain messages
        return str(self.args[0]) if self.args else ""


class DataIOError(WaterModelError, OSError):
    """Reading or writing a file failed."""

    exit_code = 4


class AlignmentError(WaterModelError, ValueError):
    """Time series cannot be brought onto a common grid."""

    exit_code = 5


class CoverageError(AlignmentError):
    """A requested window is not covered by the available series."""
