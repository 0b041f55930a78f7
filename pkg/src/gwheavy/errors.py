"""Exception hierarchy shared by all modules.

The CLI maps these onto exit codes: configuration/usage problems -> 2,
domain errors -> 3, resource guards -> 4.
"""


class GWError(Exception):
    """Base class for every error raised by gwheavy."""


class ConfigurationError(GWError, ValueError):
    """Unknown name, unsupported option or malformed configuration."""


class DomainError(GWError, ValueError):
    """Argument outside the mathematical domain of an operation."""


class NonCriticalError(DomainError):
    pass


class DegenerateError(DomainError):
    pass


class MalformedTreeError(DomainError):
    """Degree sequence that does not encode an ordered tree."""

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class UnsupportedError(ConfigurationError):
    pass


class ResourceError(GWError, RuntimeError):
    """A size or attempt guard was exceeded."""


class InvariantViolation(GWError, RuntimeError):
    """Internal consistency check failed. Always a bug."""
