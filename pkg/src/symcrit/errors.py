"""Exception hierarchy shared by the engines and the CLI."""


class SymcritError(Exception):
    """Base class for all library errors."""


class InputError(SymcritError, ValueError):
    """Invalid arguments: bad shapes, out-of-range parameters, non-finite input."""


class EvaluationError(SymcritError, ArithmeticError):
    """A quadrature or transform did not converge."""


class SimulationError(SymcritError, ArithmeticError):
    """A simulated path overflowed or became non-finite."""

    def __init__(self, message, step=None):
        super().__init__(message if step is None else f"{message} (step {step})")
        self.step = step


class HypothesisViolation(SymcritError):
    """A numerical precondition of a result failed, e.g. an infinite speed measure."""


class UnsupportedDimension(InputError):
    """The operation is only defined for a restricted state-space dimension."""
