"""Detector transfer models and calibration.

Three models map a pair phase shift to a DC voltage:

* an ideal multiplier-style detector, ``v = gain * sin(theta)``, non-ambiguous
  over +-90 deg;
* the uncalibrated triangular characteristic of the analog gain/phase chip,
  ``v = slope * (180 - |theta|)``, even in theta;
* calibrated fifth-degree polynomials (voltage in, degrees out) measured on
  the prototype, one per input pair, non-ambiguous over +-80 deg.

The calibrated polynomials are the model the simulator uses.  Forward voltage
synthesis inverts the polynomial by bisection, which the strict-monotonicity
invariant makes well defined.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    CalibrationFitError,
    CalibrationRejectedError,
    FileFormatError,
    InvalidParameterError,
    PhaseAmbiguityError,
    VoltageOutOfRangeError,
)
from .geometry import wrap_angle_deg

#: calibrated non-ambiguous phase range [deg]
CALIBRATED_RANGE_DEG = 80.0
#: voltage guard band beyond the validity interval [V]
GUARD_BAND_V = 0.010
#: how far voltage_from_phase may extend the bracket beyond [v_lo, v_hi] [V]
BRACKET_EXTENSION_V = 0.100
#: bisection resolution for voltage synthesis [V]
VOLTAGE_RESOLUTION_V = 1e-6

PAIR_IDS = ("d12", "d23", "d31")


@dataclass(frozen=True)
class IdealDetector:
    """Sine-law detector: voltage = gain_v * sin(theta)."""

    gain_v: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.gain_v) and self.gain_v > 0.0):
            raise InvalidParameterError(f"gain_v must be > 0, got {self.gain_v}")


@dataclass(frozen=True)
class TriangularDetector:
    """Triangular characteristic: voltage = slope * (180 - |theta|), slope in mV/deg."""

    slope_mv_per_deg: float = 10.0

    def __post_init__(self):
        if not (math.isfinite(self.slope_mv_per_deg) and self.slope_mv_per_deg > 0.0):
            raise InvalidParameterError(f"slope_mv_per_deg must be > 0, got {self.slope_mv_per_deg}")


def ideal_sine_voltage(theta_deg, det: IdealDetector) -> float:
    """Ideal detector output in volts; theta wrapped to (-180, 180]."""
    return det.gain_v * math.sin(math.radians(wrap_angle_deg(theta_deg)))


def ad8302_voltage(theta_deg, det: TriangularDetector) -> float:
    """Uncalibrated triangular detector output in volts; even in theta."""
    return det.slope_mv_per_deg * (180.0 - abs(wrap_angle_deg(theta_deg))) / 1000.0


def _horner(coeffs, v):
    acc = 0.0
    for c in reversed(coeffs):
        acc = acc * v + c
    return acc


def _horner_deriv(coeffs, v):
    acc = 0.0
    for k in range(len(coeffs) - 1, 0, -1):
        acc = acc * v + k * coeffs[k]
    return acc


@dataclass(frozen=True)
class MeasurementSample:
    """One calibration measurement: nominal phase [deg], detector voltage [V]."""

    theta_deg: float
    voltage_v: float
    power_dbm: float | None = None  # input amplitude, metadata only

    def __post_init__(self):
        if not math.isfinite(self.theta_deg):
            raise InvalidParameterError("theta_deg must be finite")
        if not (math.isfinite(self.voltage_v) and self.voltage_v >= 0.0):
            raise InvalidParameterError(f"voltage_v must be >= 0, got {self.voltage_v}")


@dataclass(frozen=True)
class CalibrationPolynomial:
    """Fifth-degree voltage-to-phase map for one detector pair.

    coefficients a0..a5 give phase [deg] = sum(a_k * v**k); v_ref is the
    voltage reported for zero phase; [v_lo, v_hi] is the validity interval.
    Construction verifies strict monotonicity on the validity interval by
    1 mV sampling and that the polynomial is near zero at v_ref.
    """

    a0: float
    a1: float
    a2: float
    a3: float
    a4: float
    a5: float
    v_ref: float
    v_lo: float
    v_hi: float
    max_err_deg: float
    pair_id: str
    frequency_hz: float = 2.46e9

    def __post_init__(self):
        if self.pair_id not in PAIR_IDS:
            raise InvalidParameterError(f"pair_id must be one of {PAIR_IDS}, got {self.pair_id!r}")
        if not self.v_lo < self.v_hi:
            raise InvalidParameterError(f"need v_lo < v_hi, got [{self.v_lo}, {self.v_hi}]")
        if self.max_err_deg < 0.0:
            raise InvalidParameterError("max_err_deg must be >= 0")
        v = self.v_lo
        while v <= self.v_hi:
            if _horner_deriv(self.coeffs, v) <= 0.0:
                raise CalibrationRejectedError(
                    f"{self.pair_id}: polynomial not strictly increasing at {v:.3f} V")
            v += 0.001
        ref_phase = self.evaluate(self.v_ref)
        if abs(ref_phase) > self.max_err_deg + 1e-6:
            raise CalibrationRejectedError(
                f"{self.pair_id}: phase at v_ref is {ref_phase:+.3f} deg, "
                f"exceeds max_err {self.max_err_deg:g} deg")

    @property
    def coeffs(self):
        return (self.a0, self.a1, self.a2, self.a3, self.a4, self.a5)

    def evaluate(self, v) -> float:
        """Raw polynomial value in degrees, no domain check or clamping."""
        return _horner(self.coeffs, v)


def phase_from_voltage(poly: CalibrationPolynomial, v) -> float:
    """Recover the pair phase shift [deg] from a raw detector voltage.

    Accepts voltages within the validity interval plus a 10 mV guard band;
    within the guard band the result is clamped to the +-80 deg range.
    Outside, the detector state is ambiguous and an error is raised.
    """
    if not math.isfinite(v):
        raise InvalidParameterError(f"voltage must be finite, got {v!r}")
    if v < poly.v_lo - GUARD_BAND_V or v > poly.v_hi + GUARD_BAND_V:
        raise VoltageOutOfRangeError(
            f"{poly.pair_id}: {v:.4f} V outside [{poly.v_lo:.4f}, {poly.v_hi:.4f}] V "
            f"+ {GUARD_BAND_V * 1000:.0f} mV guard band")
    theta = poly.evaluate(v)
    if theta > CALIBRATED_RANGE_DEG:
        return CALIBRATED_RANGE_DEG
    if theta < -CALIBRATED_RANGE_DEG:
        return -CALIBRATED_RANGE_DEG
    return theta


def voltage_from_phase(poly: CalibrationPolynomial, theta_deg) -> float:
    """Synthesize the raw voltage whose calibrated phase equals theta_deg.

    Bisects the strictly monotone polynomial to 1 uV.  The bracket starts at
    [v_lo, v_hi] and is extended outward (monotonicity re-checked, at most
    100 mV per side) when the fitted interval does not quite reach +-80 deg.
    """
    if not math.isfinite(theta_deg):
        raise InvalidParameterError(f"theta_deg must be finite, got {theta_deg!r}")
    if abs(theta_deg) > CALIBRATED_RANGE_DEG:
        raise PhaseAmbiguityError(poly.pair_id, theta_deg)

    lo, hi = poly.v_lo, poly.v_hi
    lo = _extend_bracket(poly, lo, theta_deg, downward=True)
    hi = _extend_bracket(poly, hi, theta_deg, downward=False)
    for _ in range(64):
        if hi - lo <= VOLTAGE_RESOLUTION_V:
            break
        mid = 0.5 * (lo + hi)
        if poly.evaluate(mid) <= theta_deg:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _extend_bracket(poly, v_end, theta, downward):
    """Push a bracket end outward in 5 mV steps until it encloses theta."""
    step = -0.005 if downward else 0.005
    limit = BRACKET_EXTENSION_V
    moved = 0.0
    while (poly.evaluate(v_end) > theta) if downward else (poly.evaluate(v_end) < theta):
        if moved >= limit or _horner_deriv(poly.coeffs, v_end + step) <= 0.0:
            raise CalibrationRejectedError(
                f"{poly.pair_id}: polynomial does not reach {theta:+.2f} deg near "
                f"{v_end:.3f} V; cannot synthesize voltage")
        v_end += step
        moved += abs(step)
    return v_end


def centered_voltage(v_raw, poly: CalibrationPolynomial) -> float:
    """Signed voltage relative to the zero-phase reference: v_raw - v_ref."""
    return v_raw - poly.v_ref


def fit_calibration(samples, degree=5, pair_id="d12", frequency_hz=2.46e9) -> CalibrationPolynomial:
    """Least-squares polynomial (voltage -> phase) from measurement samples.

    Solved over a column-scaled Vandermonde matrix with an SVD-backed least
    squares, which also handles repeated measurement rows.  max_err is the
    largest absolute residual; v_lo/v_hi come from the sample extrema; v_ref
    is the fitted zero crossing.  Non-monotone fits are rejected.
    """
    if not isinstance(degree, int) or not 1 <= degree <= 5:
        raise InvalidParameterError(f"degree must be an integer in [1, 5], got {degree!r}")
    samples = list(samples)
    if len(samples) < degree + 1:
        raise CalibrationFitError(
            f"need at least {degree + 1} samples for degree {degree}, got {len(samples)}")
    for s in samples:
        if abs(s.theta_deg) > CALIBRATED_RANGE_DEG:
            raise InvalidParameterError(
                f"sample phase {s.theta_deg:+.1f} deg outside +-{CALIBRATED_RANGE_DEG:g} deg")

    volts = np.array([s.voltage_v for s in samples], dtype=float)
    thetas = np.array([s.theta_deg for s in samples], dtype=float)
    design = np.vander(volts, degree + 1, increasing=True)
    col_scale = np.linalg.norm(design, axis=0)
    if np.any(col_scale == 0.0):
        raise CalibrationFitError("degenerate design matrix (zero column)")
    scaled, *_ = np.linalg.lstsq(design / col_scale, thetas, rcond=None)
    coeffs = scaled / col_scale

    residuals = design @ coeffs - thetas
    max_err = float(np.max(np.abs(residuals)))
    v_lo, v_hi = float(volts.min()), float(volts.max())

    padded = [float(c) for c in coeffs] + [0.0] * (6 - len(coeffs))
    v_ref = _zero_crossing(padded, v_lo, v_hi)
    return CalibrationPolynomial(
        *padded, v_ref=v_ref, v_lo=v_lo, v_hi=v_hi,
        max_err_deg=max_err, pair_id=pair_id, frequency_hz=frequency_hz)


def _zero_crossing(coeffs, lo, hi):
    f_lo, f_hi = _horner(coeffs, lo), _horner(coeffs, hi)
    if f_lo > 0.0 or f_hi < 0.0:
        raise CalibrationRejectedError("fitted polynomial has no zero crossing in the sample interval")
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if _horner(coeffs, mid) <= 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _builtin(pair_id, coeffs, v_ref, max_err_deg):
    # Validity interval = exact voltages where the polynomial reaches -80/+80 deg,
    # so voltage synthesis covers the whole calibrated range.
    v_lo = _crossing(coeffs, -CALIBRATED_RANGE_DEG)
    v_hi = _crossing(coeffs, +CALIBRATED_RANGE_DEG)
    return CalibrationPolynomial(
        *coeffs, v_ref=v_ref, v_lo=v_lo, v_hi=v_hi,
        max_err_deg=max_err_deg, pair_id=pair_id, frequency_hz=2.46e9)


def _crossing(coeffs, target, lo=0.05, hi=3.2):
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if _horner(coeffs, mid) <= target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


#: measured prototype calibration profiles at 2.46 GHz, one per input pair
TABLE2_D12 = _builtin("d12", (-114.203, 199.396, -228.453, 164.691, -55.965, 7.245), 1.530, 0.9)
TABLE2_D23 = _builtin("d23", (-125.812, 211.489, -240.403, 172.357, -58.608, 7.596), 1.624, 1.7)
TABLE2_D31 = _builtin("d31", (-129.954, 274.718, -328.593, 226.222, -73.488, 9.115), 1.436, 3.8)

BUILTIN_PROFILES = {
    "table2-d12": TABLE2_D12,
    "table2-d23": TABLE2_D23,
    "table2-d31": TABLE2_D31,
}


def builtin_profile_set():
    """The measured-prototype trio keyed by pair id."""
    return {"d12": TABLE2_D12, "d23": TABLE2_D23, "d31": TABLE2_D31}


_PROFILE_FIELDS = ("pair_id", "a0", "a1", "a2", "a3", "a4", "a5",
                   "v_ref", "v_lo", "v_hi", "max_err_deg", "frequency_hz")


def save_profile(poly: CalibrationPolynomial, path_or_file):
    """Write a calibration profile as key = value text."""
    if hasattr(path_or_file, "write"):
        fh = path_or_file
        fh.write(f"pair_id = {poly.pair_id}\n")
        for k in range(6):
            fh.write(f"a{k} = {float(poly.coeffs[k])!r}\n")
        fh.write(f"v_ref = {float(poly.v_ref)!r}\n")
        fh.write(f"v_lo = {float(poly.v_lo)!r}\n")
        fh.write(f"v_hi = {float(poly.v_hi)!r}\n")
        fh.write(f"max_err_deg = {float(poly.max_err_deg)!r}\n")
        fh.write(f"frequency_hz = {float(poly.frequency_hz)!r}\n")
    else:
        with open(path_or_file, "w") as fh:
            save_profile(poly, fh)


def load_profile(path_or_file) -> CalibrationPolynomial:
    """Read a key = value calibration profile; '#' starts a comment."""
    if hasattr(path_or_file, "read"):
        text = path_or_file.read()
    else:
        with open(path_or_file) as fh:
            text = fh.read()
    values = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise FileFormatError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, _, raw = line.partition("=")
        values[key.strip()] = raw.strip()
    missing = [f for f in _PROFILE_FIELDS if f not in values]
    if missing:
        raise FileFormatError(f"profile missing fields: {', '.join(missing)}")
    try:
        return CalibrationPolynomial(
            *(float(values[f"a{k}"]) for k in range(6)),
            v_ref=float(values["v_ref"]),
            v_lo=float(values["v_lo"]),
            v_hi=float(values["v_hi"]),
            max_err_deg=float(values["max_err_deg"]),
            pair_id=values["pair_id"],
            frequency_hz=float(values["frequency_hz"]),
        )
    except ValueError as exc:
        raise FileFormatError(f"bad profile value: {exc}") from exc


def read_measurement_csv(path_or_file):
    """Read measurement samples from CSV with header theta_deg,voltage_v,power_dbm."""
    if hasattr(path_or_file, "read"):
        return _parse_measurements(path_or_file)
    with open(path_or_file, newline="") as fh:
        return _parse_measurements(fh)


def _parse_measurements(fh):
    reader = csv.reader(fh)
    try:
        header = next(reader)
    except StopIteration:
        raise FileFormatError("empty measurement file") from None
    expected = ["theta_deg", "voltage_v", "power_dbm"]
    if [h.strip() for h in header] != expected:
        raise FileFormatError(f"line 1: expected header {','.join(expected)}")
    samples = []
    for lineno, row in enumerate(reader, start=2):
        if not row or (len(row) == 1 and not row[0].strip()):
            continue
        if len(row) != 3:
            raise FileFormatError(f"line {lineno}: expected 3 fields, got {len(row)}")
        try:
            theta, volts = float(row[0]), float(row[1])
            power = float(row[2]) if row[2].strip() else None
        except ValueError:
            raise FileFormatError(f"line {lineno}: non-numeric field in {row!r}") from None
        try:
            samples.append(MeasurementSample(theta, volts, power))
        except InvalidParameterError as exc:
            raise FileFormatError(f"line {lineno}: {exc}") from None
    if not samples:
        raise FileFormatError("no measurement rows found")
    return samples
