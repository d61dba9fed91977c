"""Exception types raised across the package."""


class FermiEEError(Exception):
    """Base class for all package errors."""


class EntropyDomainError(FermiEEError, ValueError):
    """An occupation value lies outside [0, 1] beyond the clamping tolerance."""


class QuadratureError(FermiEEError, RuntimeError):
    """A quadrature failed to reach the requested accuracy."""

    def __init__(self, message, estimate=None, error=None):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


class BracketError(FermiEEError, RuntimeError):
    """A root could not be bracketed."""


class UnsupportedConfigurationError(FermiEEError, ValueError):
    """The requested combination of dispersion, dimension and domain is not supported."""


class NoFermiSurfaceError(FermiEEError, ValueError):
    """The Fermi surface at the given chemical potential is empty."""


class ResolutionError(FermiEEError, ValueError):
    """A discretization is too coarse for the requested kernel."""


class ClampViolationError(FermiEEError, RuntimeError):
    """Eigenvalues left [0, 1] by more than the clamping tolerance."""


class IllConditionedFitError(FermiEEError, ValueError):
    """A least-squares design matrix is singular or too ill-conditioned."""


class ConfigError(FermiEEError, ValueError):
    """A run configuration could not be parsed or validated."""
