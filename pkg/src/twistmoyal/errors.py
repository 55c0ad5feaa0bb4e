"""Exception and warning types shared across the package."""


class TwistMoyalError(Exception):
    """Base class for package errors."""


class ParameterError(TwistMoyalError, ValueError):
    """Deformation parameters are outside an operation's precondition."""


class DomainError(TwistMoyalError, ValueError):
    """An argument lies outside the domain of a map or special function."""


class ConvergenceError(TwistMoyalError, ArithmeticError):
    """A numerical procedure did not reach the requested tolerance."""


class GridError(TwistMoyalError, ValueError):
    """Empty or degenerate evaluation grid."""


class RepresentationError(TwistMoyalError, ValueError):
    """A function cannot be written in the requested symbolic class."""


class OscillatorResidualError(TwistMoyalError, AssertionError):
    """The oscillator-sector eigen-equation residual exceeded its bound."""


class TruncationWarning(UserWarning):
    """A star-product series was cut at the truncation order."""
