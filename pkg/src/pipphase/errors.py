class PipphaseError(Exception):
    pass


class InvalidGraphError(PipphaseError, ValueError):
    pass


class ClosureTooLargeError(PipphaseError, ValueError):
    pass


class DimensionMismatchError(PipphaseError, ValueError):
    pass


class InvalidMeasureError(PipphaseError, ValueError):
    pass


class UndefinedConditionalError(PipphaseError, ZeroDivisionError):
    """The conditioning event has probability zero."""


class EnumerationTooLargeError(PipphaseError, ValueError):
    """Exhaustive check requested beyond its cost guard."""


class SearchBudgetExceeded(PipphaseError, RuntimeError):
    pass


class NotDominatedError(PipphaseError, ValueError):
    pass


class NotIncreasingError(PipphaseError, ValueError):
    pass


class NotProductMeasureError(PipphaseError, TypeError):
    pass


class PreconditionError(PipphaseError, ValueError):
    """A theorem hypothesis does not hold; ``hypothesis`` names which one."""

    def __init__(self, hypothesis, message):
        super().__init__(f"{hypothesis}: {message}")
        self.hypothesis = hypothesis


class TheoremViolation(PipphaseError, AssertionError):
    """A proven inequality failed numerically. Always a bug."""
