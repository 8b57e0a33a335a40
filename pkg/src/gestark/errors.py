"""Exception types raised across the package."""


class StarkError(Exception):
    """Base class for all errors raised by gestark."""


class ZeroDirection(StarkError, ValueError):
    pass


class InvalidWeights(StarkError, ValueError):
    pass


class InvalidProjection(StarkError, ValueError):
    pass


class MissingParameter(StarkError, LookupError):
    """A Stark parameter needed for the evaluation is absent (a "..." cell)."""


class MissingHyperfineParameter(MissingParameter):
    pass


class MissingHyperfineConstant(StarkError, ValueError):
    """The donor hyperfine constant A was required but never configured."""


class UnknownOrientation(StarkError, LookupError):
    pass


class RankDeficient(StarkError, ArithmeticError):
    pass


class UnpairedLines(StarkError, ValueError):
    pass


class EmptySweep(StarkError, ValueError):
    pass


class CalibrationError(StarkError, ArithmeticError):
    pass


class ConfigError(StarkError, ValueError):
    pass


class PhaseWrapRisk(UserWarning):
    """Accumulated phase exceeds pi/2; a quadrature detector could wrap it."""
