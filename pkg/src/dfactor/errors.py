"""Exception types shared across the package."""


class DFactorError(Exception):
    """Base class for every error raised by this package."""


class InvalidInstance(DFactorError, ValueError):
    pass


class OddProduct(InvalidInstance):
    pass


class DegreeOutOfRange(InvalidInstance):
    pass


class NotRegularComplement(InvalidInstance):
    pass


class EdgeMissing(DFactorError, KeyError):
    pass


class EdgePresent(DFactorError, KeyError):
    pass


class DegreeBroken(DFactorError, AssertionError):
    pass


class InvalidMove(DFactorError, ValueError):
    pass


class NoValidMove(DFactorError, LookupError):
    pass


class WrongVariant(DFactorError, ValueError):
    pass


class BudgetExhausted(DFactorError, RuntimeError):
    pass


class BoundGuard(DFactorError, ArithmeticError):
    """An analytic bound is unusable for the current step."""


class SolverInvariantViolated(DFactorError, ArithmeticError):
    def __init__(self, message, stratum=None):
        super().__init__(message)
        self.stratum = stratum


class UnknownOutcome(DFactorError, LookupError):
    pass
