"""Exception types raised across the toolkit."""


class EwsError(Exception):
    """Base class for all toolkit errors."""


class SchemaError(EwsError, ValueError):
    """A CSV row or model-file line does not conform to its schema."""

    def __init__(self, row, column, message, source=None):
        self.row = row
        self.column = column
        self.message = message
        self.source = source
        where = f"{source}: " if source else ""
        super().__init__(f"{where}row {row}, column {column}: {message}")


class DuplicateKey(EwsError, ValueError):
    def __init__(self, key, row=None, source=None):
        self.key = key
        self.row = row
        where = f"{source}: " if source else ""
        at = f"row {row}: " if row is not None else ""
        super().__init__(f"{where}{at}duplicate key {key}")


class EmptyWindow(EwsError, ValueError):
    pass


class DivisionByZero(EwsError, ZeroDivisionError):
    def __init__(self, field):
        self.field = field
        super().__init__(f"denominator field {field!r} is zero")


class NonAdjacentPeriods(EwsError, ValueError):
    pass


class PeriodMismatch(EwsError, ValueError):
    pass


class TooFewSamples(EwsError, ValueError):
    pass


class DegenerateClasses(EwsError, ValueError):
    pass


class SingularScatter(EwsError, ArithmeticError):
    pass


class NoFeasibleThreshold(EwsError, ValueError):
    pass


class HorizonMismatch(EwsError, ValueError):
    pass


class NonPositiveDefinite(EwsError, ValueError):
    pass


class InvalidConfig(EwsError, ValueError):
    pass


class InsufficientPool(UserWarning):
    """Fewer active banks than intervened banks were available for pairing."""
