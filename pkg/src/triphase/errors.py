"""Exception hierarchy.

Errors are grouped so the CLI can map them onto exit codes: invalid
parameters are usage problems, file-format problems are I/O failures, and
ambiguity / range / fit failures are numerical outcomes.
"""


class TriphaseError(Exception):
    """Base class for all package errors."""


class InvalidParameterError(TriphaseError, ValueError):
    """A parameter violates its documented precondition (non-finite, wrong sign, ...)."""


class FileFormatError(TriphaseError):
    """A data file (measurement CSV, calibration profile) could not be parsed."""


class DegenerateGeometryError(TriphaseError):
    """Landing point coincides with a receiver input; path differences undefined."""


class RangeUnboundedError(TriphaseError):
    """No phase-limit crossing found below the search ceiling."""


class VoltageOutOfRangeError(TriphaseError):
    """Detector voltage outside the calibrated interval plus guard band."""


class PhaseAmbiguityError(TriphaseError):
    """A phase shift left the detector's non-ambiguous range.

    Carries the offending pair ("d12", "d23" or "d31") and the phase in degrees.
    """

    def __init__(self, pair, theta_deg):
        super().__init__(f"phase shift {pair} = {theta_deg:+.2f} deg outside non-ambiguous range")
        self.pair = pair
        self.theta_deg = theta_deg


class CalibrationFitError(TriphaseError):
    """Least-squares calibration fit could not be computed."""


class CalibrationRejectedError(TriphaseError):
    """A fitted or loaded calibration violates its model invariants (e.g. monotonicity)."""
