"""Exception hierarchy shared by every module."""


class WeakPathError(Exception):
    """Base class for all errors raised by weakpath."""


class NotHermitian(WeakPathError, ValueError):
    pass


class NotUnitary(WeakPathError, ValueError):
    pass


class DarkFringe(WeakPathError, ArithmeticError):
    """The path amplitudes toward the post-selected state sum to zero."""


class OutcomeIndexOutOfRange(WeakPathError, IndexError):
    pass


class ZeroDenominator(WeakPathError, ArithmeticError):
    pass


class DeltaNotEvaluable(WeakPathError, ValueError):
    pass


class ProfileUnsupported(WeakPathError, ValueError):
    pass


class ZeroTotalWeight(WeakPathError, ArithmeticError):
    pass


class WidthTooSmall(WeakPathError, ValueError):
    pass


class AlphaConstraintViolated(WeakPathError, ValueError):
    pass


class VanishingOverlap(WeakPathError, ArithmeticError):
    pass


class ZeroReferenceAlpha(WeakPathError, ValueError):
    pass


class ShiftOffGrid(WeakPathError, ValueError):
    pass


class ShiftNotCommensurate(WeakPathError, ValueError):
    pass


class ResourceLimit(WeakPathError, MemoryError):
    pass


class NotNormalized(WeakPathError, ValueError):
    pass


class ValidationError(WeakPathError, ValueError):
    """A scenario violates one of its invariants."""


class ParseError(WeakPathError, ValueError):
    """A scenario document is malformed.

    ``location`` is a field path such as ``steps[0].observable.matrix`` or
    ``line 12`` for syntax errors.
    """

    def __init__(self, message: str, location: str = ""):
        self.location = location
        super().__init__(f"{location}: {message}" if location else message)
