"""Exception types raised across the package."""


class BlpsimError(Exception):
    """Base class for all package errors."""


class InvariantError(BlpsimError, ValueError):
    """A value violates a structural invariant (e.g. a non-Hermitian density matrix)."""


class DomainError(BlpsimError, ValueError):
    """A time or parameter lies outside the domain where a quantity is defined."""


class BreakpointError(DomainError):
    """A piecewise rate was queried exactly at one of its discontinuities."""


class StepSizeError(BlpsimError, ValueError):
    """An integration step is too coarse for the local decay rate."""


class InputError(BlpsimError, ValueError):
    """Malformed or insufficient input data."""


class FitError(BlpsimError, RuntimeError):
    """A curve fit could not be performed or did not converge."""


class TomographyError(BlpsimError, RuntimeError):
    """State reconstruction failed, e.g. because no counts were recorded."""


class ConfigError(BlpsimError, ValueError):
    """A run configuration is invalid.

    :param field: dotted name of the offending configuration key.
    """

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")
