"""Exception hierarchy shared by all modules."""


class CasimirError(Exception):
    """Base class for every error raised by this package."""


class InvalidArgumentError(CasimirError, ValueError):
    pass


class InvalidGeometryError(InvalidArgumentError):
    """Obstacles overlap, touch, self-intersect or are otherwise malformed."""


class UnsupportedParameterError(InvalidArgumentError):
    pass


class SingularEvaluationError(InvalidArgumentError):
    """A Green's function was requested at coincident points where it diverges."""


class BesselRangeError(CasimirError, OverflowError):
    pass


class AssemblyError(CasimirError, ArithmeticError):
    pass


class FactorizationError(CasimirError, ArithmeticError):
    """A diagonal block could not be factorized (under-resolved mesh or touching obstacles)."""


class NumericalBreakdownError(CasimirError, ArithmeticError):
    """A matrix that must be positive definite produced a non-positive pivot."""


class ConvergenceError(CasimirError, ArithmeticError):
    """Adaptive quadrature did not reach the requested tolerance.

    The best available estimate travels with the exception so callers can
    still report it.
    """

    def __init__(self, message, value=float("nan"), abs_error=float("inf"), evaluations=0, result=None):
        super().__init__(message)
        self.value = value
        self.abs_error = abs_error
        self.evaluations = evaluations
        self.result = result
