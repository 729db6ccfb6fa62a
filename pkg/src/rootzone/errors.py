"""Exception hierarchy shared across the package."""


class RootzoneError(Exception):
    """Base class for all package errors."""


class DomainError(RootzoneError):
    """An input lies outside the physically admissible range."""


class InversionError(RootzoneError):
    """A Kirchhoff value cannot be mapped back to a water content."""


class ConfigurationError(RootzoneError):
    """Invalid scenario, discretization, or CLI configuration."""


class StencilError(RootzoneError):
    """A local interpolation problem is unusable (e.g. singular Gram)."""


class AssemblyError(RootzoneError):
    """The global system could not be assembled consistently."""


class SolverError(RootzoneError):
    """A linear solve failed to reach its residual contract."""


class NonConvergenceError(RootzoneError):
    """The nonlinear (Picard) iteration exceeded its budget."""

    def __init__(self, message, last_delta=None, step=None, time=None):
        super().__init__(message)
        self.last_delta = last_delta
        self.step = step
        self.time = time


class OracleError(RootzoneError):
    """A reference solution could not be evaluated to its tolerance."""
