"""Exception types shared across the package."""


class GsmlocError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(GsmlocError):
    """Scenario configuration is missing fields or violates preconditions."""


class DegenerateGeometryError(GsmlocError):
    """Tower geometry cannot support a position solve (collinear or coplanar)."""


class NegativeIntervalError(GsmlocError):
    """A turn-around time fell below the calibrated fixed delay.

    The measurement claims the reply arrived before the fixed processing
    delay elapsed, which signals a miscalibrated delay constant.
    """


class CalibrationError(GsmlocError):
    """Delay calibration produced a physically impossible (negative) constant."""


class InsufficientMeasurementsError(GsmlocError):
    """Fewer ranging measurements than the solver requires."""


class EmptyDataError(GsmlocError):
    """No valid samples left to aggregate."""
