"""Exception types raised across the package."""


class OuterBilliardError(Exception):
    """Base class for all package errors."""


class ParseError(OuterBilliardError, ValueError):
    def __init__(self, message, text="", position=0):
        self.text = text
        self.position = position
        pointer = f"\n  {text}\n  {' ' * position}^" if text else ""
        super().__init__(f"{message} at position {position}{pointer}")


class ZeroPolynomial(OuterBilliardError, ValueError):
    pass


class DivisorZero(OuterBilliardError, ZeroDivisionError):
    pass


class DegenerateInput(OuterBilliardError, ValueError):
    pass


class ConvergenceFailure(OuterBilliardError, ArithmeticError):
    """Iteration cap reached; ``partial`` holds the unreliable result."""

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class SingularCurve(OuterBilliardError, ValueError):
    pass


class WitnessNotFound(OuterBilliardError, ArithmeticError):
    pass


class BranchNotFound(OuterBilliardError, ValueError):
    pass


class PointInsideOval(OuterBilliardError, ValueError):
    pass


class SolverDivergence(OuterBilliardError, ArithmeticError):
    pass


class DegenerateTangent(OuterBilliardError, ValueError):
    pass


class InsufficientPairs(OuterBilliardError, ValueError):
    pass
