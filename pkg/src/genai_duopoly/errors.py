"""Exception and warning types raised across the package."""


class DuopolyError(ValueError):
    """Base class for all input/contract violations."""


class DomainError(DuopolyError):
    pass


class InvalidScore(DuopolyError):
    pass


class InvalidTokenMean(DuopolyError):
    pass


class InvalidInteraction(DuopolyError):
    pass


class NegativePrice(DuopolyError):
    pass


class NonPositivePrice(DuopolyError):
    pass


class NonPositiveLeaderPrice(NonPositivePrice):
    pass


class EmptyTaskSet(DuopolyError):
    pass


class NonExponentialDemand(DuopolyError):
    pass


class WrongTaskCount(DuopolyError):
    pass


class InvalidDemand(DuopolyError):
    pass


class ValidationError(DuopolyError):
    """A scenario violates one of the model invariants.

    ``field`` is a dotted path into the scenario document when known.
    """

    def __init__(self, message, field=None):
        self.field = field
        super().__init__(f"{field}: {message}" if field else message)


class ParseError(DuopolyError):
    def __init__(self, message, field=None, line=None):
        self.field = field
        self.line = line
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field:
            where.append(field)
        prefix = ", ".join(where)
        super().__init__(f"{prefix}: {message}" if prefix else message)


class SearchBudgetExceeded(RuntimeWarning):
    """Emitted (as a warning) when a numeric search stops on its iteration cap.

    The solver still returns its best point.
    """
