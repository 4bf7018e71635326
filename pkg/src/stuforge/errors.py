"""Exception types shared across the package."""


class StuforgeError(Exception):
    """Base class for all package errors."""


class OutOfRange(StuforgeError, ValueError):
    pass


class InvalidSpectrum(StuforgeError, ValueError):
    pass


class LengthMismatch(StuforgeError, ValueError):
    pass


class SumMismatch(StuforgeError, ValueError):
    pass


class NotMajorised(StuforgeError, ValueError):
    pass


class NotDoublyStochastic(StuforgeError, ValueError):
    pass


class NotLatinSquare(StuforgeError, ValueError):
    pass


class DimensionMismatch(StuforgeError, ValueError):
    pass


class CompanionFailure(StuforgeError, RuntimeError):
    pass


class ConditionsNotMet(StuforgeError, RuntimeError):
    """Raised by the norm builder; ``flag`` names the failing condition."""

    def __init__(self, flag, message=""):
        self.flag = flag
        super().__init__(message or f"condition not met: {flag}")


class InvalidPreimage(StuforgeError, ValueError):
    pass


class TooLarge(StuforgeError, ValueError):
    pass


class DegenerateCoordinate(StuforgeError, ValueError):
    pass


class UnsupportedDimension(StuforgeError, ValueError):
    pass


class SignCheckFailure(StuforgeError, AssertionError):
    pass


class InvalidBudget(StuforgeError, ValueError):
    pass


class DimensionBudgetExceeded(StuforgeError, ValueError):
    pass


class StepUnbuildable(StuforgeError, RuntimeError):
    pass
