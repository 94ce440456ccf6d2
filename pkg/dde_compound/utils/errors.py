"""Error taxonomy shared by all services and mapped to CLI exit codes."""


class CompoundDdeError(Exception):
    """Base class for every error raised deliberately by this package."""

    exit_code = 1


class InvalidArgumentError(CompoundDdeError, ValueError):
    """Input violates a documented precondition (bad m, misaligned time, sign hypothesis)."""

    exit_code = 2


class UnsupportedError(InvalidArgumentError):
    """Requested combination is outside what the library implements."""

    exit_code = 2


class NumericFailureError(CompoundDdeError, ArithmeticError):
    """A numeric routine failed to converge or produced a non-finite result."""

    exit_code = 3


class CapacityError(CompoundDdeError):
    """Requested storage would exceed a configured ceiling."""

    exit_code = 4
