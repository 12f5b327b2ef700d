"""Exception hierarchy shared by all anomal modules."""


class AnomalError(Exception):
    """Base class for every error raised by this package."""


class PoleError(AnomalError, ValueError):
    """Argument sits on a pole (Gamma at a non-positive integer, M with bad b)."""


class DomainError(AnomalError, ValueError):
    """Argument outside the real domain where the function is defined here."""


class ConvergenceError(AnomalError, ArithmeticError):
    """A series or quadrature failed to converge within its budget."""


class NumericalFailure(AnomalError):
    """A construction step could not be completed reliably."""


class BreakpointCapError(NumericalFailure):
    """More matching breakpoints than the configured cap."""


class ScanExhaustedError(NumericalFailure):
    """No sign change of the tail coefficient inside the scan window."""

    def __init__(self, msg, k=None):
        super().__init__(msg)
        self.k = k


class BracketError(AnomalError, ValueError):
    """Requested similarity exponent is not covered by an exponent table."""


class IntegrationError(NumericalFailure):
    """Step-size underflow or branch failure inside the ODE oracle."""

    def __init__(self, msg, location=None):
        super().__init__(msg)
        self.location = location
