"""Exception hierarchy shared by all modules."""


class DiffwaveError(Exception):
    """Base class for every error raised by the package."""


class NumericalError(DiffwaveError):
    """A numerical procedure could not reach its accuracy target."""


class NonConvergence(NumericalError):
    pass


class QuadratureFailure(NumericalError):
    pass


class DifferentiationUnstable(NumericalError):
    pass


class ExtrapolationDiverged(NumericalError):
    pass


class TruncationBudgetExceeded(NumericalError):
    pass


class InputError(DiffwaveError, ValueError):
    """Invalid user input."""


class DomainError(InputError):
    pass


class DegenerateCoefficients(InputError):
    pass


class ValidationError(InputError):
    pass


class ParseError(InputError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
