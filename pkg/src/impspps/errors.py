"""Exception and warning types raised across the package."""


class ImpSppsError(Exception):
    """Base class for all errors raised by :mod:`impspps`."""


class ConfigurationError(ImpSppsError, ValueError):
    """A numerical parameter is missing, inconsistent or out of range."""


class InvalidImpedanceError(ImpSppsError, ValueError):
    """The impedance is not positive, not finite, or not square integrable."""


class GridMismatchError(ImpSppsError, ValueError):
    """Two sampled functions living on different grids were combined."""


class SpectralRangeError(ImpSppsError, RuntimeError):
    """Fewer eigenvalues than requested were found in the scanned range."""


class StiffnessError(ImpSppsError, RuntimeError):
    """The reference integrator could not reach the requested tolerance."""


class PreconditionError(ImpSppsError, ValueError):
    """An input violates a mathematical precondition of the routine."""


class IterationLimitError(ImpSppsError, RuntimeError):
    """Successive approximation did not converge.

    Attributes
    ----------
    spectral_radius : float
        Estimate of the spectral radius of the iteration operator.
    """

    def __init__(self, message, spectral_radius=float("nan")):
        super().__init__(message)
        self.spectral_radius = spectral_radius


class IllConditionedWarning(UserWarning):
    """A Gram matrix is too ill conditioned for the normal equations."""
