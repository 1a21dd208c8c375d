"""Exception hierarchy shared by all readkdet modules."""


class ReadKDetError(Exception):
    """Base class for every error raised by this package."""


class MixedFields(ReadKDetError):
    """Operands live in different coefficient fields."""


class MixedUniverses(ReadKDetError):
    """Operands declare different variable universes."""


class DivisionByZero(ReadKDetError):
    pass


class NotPrime(ReadKDetError):
    pass


class BadDegree(ReadKDetError):
    pass


class TooLarge(ReadKDetError):
    """Input exceeds a hard size cap of the chosen algorithm."""


class NotSquare(ReadKDetError):
    pass


class IncompleteAssignment(ReadKDetError):
    pass


class FieldTooSmall(ReadKDetError):
    pass


class BudgetExceeded(ReadKDetError):
    """An enumeration would exceed its configured budget."""


class IndexOutOfRange(ReadKDetError):
    pass


class AsymmetricDrop(ReadKDetError):
    """Minor extraction must drop equally many rows and columns."""


class ReadBoundViolated(ReadKDetError):
    pass


class NotReadOnce(ReadKDetError):
    pass


class NotOccurrenceOne(ReadKDetError):
    pass


class ZeroDeterminant(ReadKDetError):
    pass


class SelfCheckFailed(ReadKDetError):
    """A transformation failed its own determinant-equality check."""


class UnsupportedDegree(ReadKDetError):
    pass


class RetryBudgetExhausted(ReadKDetError):
    pass


class FieldNotAdmitting(ReadKDetError):
    """The requested witness does not exist over this field."""


class TargetTooLarge(ReadKDetError):
    pass


class FormatError(ReadKDetError):
    """Malformed text or JSON input."""
