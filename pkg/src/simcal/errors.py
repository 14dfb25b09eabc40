"""Exception types shared across the package."""


class InvalidInputError(ValueError):
    """An argument violates a documented precondition."""


class NumericError(ArithmeticError):
    """A computation produced non-finite or otherwise unusable values."""


class ConvergenceError(NumericError):
    """An iterative routine failed to converge within its budget."""

    def __init__(self, message: str, residual: float | None = None):
        super().__init__(message)
        self.residual = residual


class EmptyEligibilitySetError(RuntimeError):
    """Raised when a bound or summary requires a nonempty eligible set."""


class WeightsFormatError(InvalidInputError):
    """A weights file does not conform to the interchange schema."""
