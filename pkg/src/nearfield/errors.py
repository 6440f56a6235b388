"""Exception types raised by the library."""


class NearFieldError(Exception):
    """Base class for domain errors."""


class AliasingError(NearFieldError, ValueError):
    """A chirp or propagator multiplier is undersampled on the grid."""

    def __init__(self, message, axis=None):
        super().__init__(message)
        self.axis = axis


class SupportError(NearFieldError, ValueError):
    """A field is nonzero outside its declared support."""


class PhaseWrapError(NearFieldError, ValueError):
    """Projected phase leaves the interval [0, 2 pi)."""

    def __init__(self, message, theta=None, x=None, value=None):
        super().__init__(message)
        self.theta = theta
        self.x = x
        self.value = value


class ZeroTransmission(NearFieldError, ValueError):
    """Transmission modulus too small to take a logarithm."""


class DivisionByNearZero(NearFieldError, ValueError):
    """Flat-field intensity too small to divide by."""


class ProbeZero(NearFieldError, ValueError):
    """Probe vanishes somewhere on the grid."""


class SolverError(NearFieldError, RuntimeError):
    """Iterative solver diverged or stagnated."""


class BudgetError(NearFieldError, ValueError):
    """Problem too large for a dense computation."""
