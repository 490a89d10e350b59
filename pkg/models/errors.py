from typing import Optional, Tuple


class SdsError(ValueError):
    """Base class for every analysis error raised by the models package."""


class DimensionMismatchError(SdsError):
    pass


class InvalidStateError(SdsError):
    pass


class InvalidScheduleError(SdsError):
    pass


class CapExceededError(SdsError):
    """Raised before any 2^n (or n!) sized allocation would exceed a configured cap."""


class AlphaClassOverflowError(CapExceededError):
    pass


class SchemaError(SdsError):
    pass


class NonMonotoneError(SdsError):
    """
    A monotone-only operation received a non-monotone system or function.

    Attributes:
        vertex: offending vertex (1-based) when the failure is tied to one local function.
        witness: pair (X, Y) with X <= Y and g(X) = 1, g(Y) = 0, when known.
    """

    def __init__(self, message: str, vertex: Optional[int] = None, witness: Optional[Tuple] = None):
        super().__init__(message)
        self.vertex = vertex
        self.witness = witness


class TheoremViolation(AssertionError):
    """A runtime theorem assertion failed; indicates a bug in a local-function or step implementation."""


class ConfigError(SdsError):
    """An environment override or other configuration value is malformed."""
