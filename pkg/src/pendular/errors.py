"""Exception hierarchy shared across the package."""


class PendularError(Exception):
    """Base class for package errors."""


class ConfigError(PendularError):
    """Invalid configuration, input file, or parameter combination."""


class NumericalError(PendularError):
    """A numerical routine failed to meet its accuracy contract."""


class EigensolverError(NumericalError):
    """Eigensolver did not converge or residuals exceed tolerance."""


class PropagationError(NumericalError):
    """A propagation step was rejected (error above tolerance at max order)."""
