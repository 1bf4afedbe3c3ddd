"""Exception hierarchy shared by all rpi_meter modules.

The CLI maps these onto exit codes: usage/config problems -> 1,
physical-constraint violations -> 2, numerical failures -> 3.
"""


class RpiMeterError(Exception):
    """Base class for all errors raised by this package."""


class ConstraintError(RpiMeterError):
    """A physical precondition is violated (non-positive length, dx > l, ...)."""


class DegenerateFrequencyError(ConstraintError):
    """Probe eigenfrequency equals the measured motion frequency; the
    optimal-error formulas are singular at resonance."""


class NumericalError(RpiMeterError):
    """A numerical procedure cannot produce a trustworthy result
    (ill-conditioned quadratic form, undamped flat direction, ...)."""


class UsageError(RpiMeterError):
    """Bad command line, config file, or argument combination."""
