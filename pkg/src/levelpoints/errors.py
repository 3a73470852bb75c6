"""Exception types raised across the package."""


class ArithmeticOverflowError(OverflowError):
    """An exact integer left the signed 128-bit range."""


class DimensionError(ValueError):
    pass


class SingularMatrixError(ValueError):
    pass


class BudgetExceededError(RuntimeError):
    """Requested search is larger than the configured enumeration budget."""

    def __init__(self, message, volume=None):
        super().__init__(message)
        self.volume = volume


class UnsupportedFamilyError(ValueError):
    pass


class DegenerateWindowError(ValueError):
    pass


INT128_MIN = -(1 << 127)
INT128_MAX = (1 << 127) - 1


def check_int128(value):
    """Return ``value`` unchanged, raising if it does not fit in signed 128 bits."""
    if value < INT128_MIN or value > INT128_MAX:
        raise ArithmeticOverflowError(f"value {value} exceeds signed 128-bit range")
    return value
