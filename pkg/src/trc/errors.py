"""Exception hierarchy shared by every module."""


class TrcError(Exception):
    """Base class for all library errors."""


class DivisionByZero(TrcError, ZeroDivisionError):
    pass


class FieldMismatch(TrcError, TypeError):
    pass


class InvalidField(TrcError, ValueError):
    pass


class ParseError(TrcError, ValueError):
    pass


class ModeOutOfRange(TrcError, IndexError):
    pass


class ZeroTensor(TrcError, ValueError):
    pass


class NonCubical(TrcError, ValueError):
    pass


class NotSymmetric(TrcError, ValueError):
    pass


class SmallCharacteristic(TrcError, ValueError):
    pass


class SmallField(TrcError, ValueError):
    pass


class ShapeMismatch(TrcError, ValueError):
    pass


class DimensionMismatch(TrcError, ValueError):
    pass


class VariableMismatch(TrcError, ValueError):
    pass


class InvalidRank(TrcError, ValueError):
    pass


class BudgetExceeded(TrcError, RuntimeError):
    """Raised when an exhaustive search would exceed its candidate/time budget."""


class NotWaringDecomposable(TrcError):
    """No sum of scaled d-th powers over the base field equals the tensor."""
