"""Exception hierarchy shared by the library and the command line front end."""


class WeylLabError(Exception):
    """Base class. ``exit_code`` is what the CLI returns for this failure."""

    exit_code = 1


class DomainError(WeylLabError, ValueError):
    exit_code = 3


class DivergenceError(DomainError):
    """The requested zeta argument is at or left of the abscissa of convergence."""


class PoleError(DomainError, ZeroDivisionError):
    pass


class SymmetricCaseError(DomainError):
    """The maximal zeta abscissa is attained by more than one factor."""


class MixedCalculusError(DomainError):
    pass


class OperatorSyntaxError(WeylLabError, ValueError):
    exit_code = 2

    def __init__(self, message, position=None):
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)
        self.position = position


class InsufficientData(WeylLabError, ValueError):
    exit_code = 3


class BudgetExceeded(WeylLabError, RuntimeError):
    exit_code = 4


class ToleranceUnreachable(WeylLabError, RuntimeError):
    exit_code = 4


class CountOverflowError(WeylLabError, OverflowError):
    exit_code = 5
