"""Exception types shared across the package."""


class FanodhoError(Exception):
    """Base class for all package errors."""


class DomainError(FanodhoError, ValueError):
    """Argument outside the domain where a quantity is defined."""


class QuadratureError(FanodhoError, ArithmeticError):
    """Numerical integration did not converge.

    Attributes
    ----------
    estimate : float or complex
        Best value obtained before giving up.
    error : float
        Error estimate attached to ``estimate``.
    """

    def __init__(self, message, estimate=None, error=None):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


class SingularityError(FanodhoError, ArithmeticError):
    """Mode weights requested where the coupling vanishes."""


class InstabilityError(FanodhoError, ArithmeticError):
    """Unstable model or integrator (negative effective frequency, energy blow-up)."""


class ValidityError(FanodhoError):
    """A validity condition of an approximation is violated."""


class ConfigError(FanodhoError, ValueError):
    """Malformed or inconsistent run configuration."""
