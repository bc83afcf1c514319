"""Closed-loop landing simulation.

Each cycle senses the beacon through the full chain (world pose -> body-frame
geometry -> pair phase shifts -> calibrated detector voltages -> centered
voltages), asks the guidance rules for maneuvers, applies them, and descends
one step after every tracking-or-hold cycle (an escape yaw is a reorientation
and does not descend).  The loop ends at the minimum height or when the
iteration budget runs out; a phase-ambiguity event aborts with a diagnostic
and the partial log.

One guard exists beyond the plain decision rules: when two consecutive cycles
request opposite 60-degree escape yaws (the beacon sits on the seam between
two escape zones, so pure yawing would ping-pong forever), the cycle falls
through to the fine-tracking maneuvers computed from the fresh voltages.
That mirrors the original maneuver program, whose listing always continues
from the escape branch into the tracking branch.

Runs are single-threaded and fully deterministic: identical inputs produce
bit-identical trajectory logs.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

from .detector import (
    IdealDetector,
    TriangularDetector,
    CALIBRATED_RANGE_DEG,
    centered_voltage,
    ideal_sine_voltage,
    voltage_from_phase,
)
from .errors import InvalidParameterError, PhaseAmbiguityError
from .geometry import (
    ReceiverGeometry,
    RFConfig,
    Vector3,
    phase_solution,
    wrap_angle_deg,
)
from .guidance import (
    GuidanceConfig,
    Maneuver,
    ManeuverKind,
    SectorId,
    VoltageTriple,
    classify_sector,
    decide,
    tracking_maneuvers,
)

#: non-ambiguous phase range of the sine / triangular model variants [deg]
IDEAL_RANGE_DEG = 90.0

DETECTOR_MODES = ("calibrated", "ideal-sine", "triangular")


@dataclass(frozen=True)
class DroneState:
    """World-frame pose: position in cm (z = height above the beacon plane),
    heading = azimuth of body +Y, clockwise-positive, in (-180, 180]."""

    position: Vector3
    heading_deg: float = 0.0

    def __post_init__(self):
        if self.position.z <= 0.0:
            raise InvalidParameterError(f"airborne height must be > 0, got {self.position.z}")
        object.__setattr__(self, "heading_deg", wrap_angle_deg(self.heading_deg))


@dataclass(frozen=True)
class SimConfig:
    descent_step_cm: float = 1.0
    min_height_cm: float = 1.0
    max_iterations: int = 100_000
    detector_mode: str = "calibrated"

    def __post_init__(self):
        for name in ("descent_step_cm", "min_height_cm"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0.0):
                raise InvalidParameterError(f"{name} must be > 0, got {v}")
        if not isinstance(self.max_iterations, int) or self.max_iterations <= 0:
            raise InvalidParameterError("max_iterations must be a positive integer")
        if self.detector_mode not in DETECTOR_MODES:
            raise InvalidParameterError(
                f"detector_mode must be one of {DETECTOR_MODES}, got {self.detector_mode!r}")


@dataclass(frozen=True)
class TrajectoryRecord:
    """One sense-decide-act cycle: pose at sensing time, voltages, sector, maneuvers."""

    iteration: int
    state: DroneState
    voltages: VoltageTriple
    sector: SectorId
    maneuvers: tuple


@dataclass
class SimulationResult:
    records: list
    touchdown: bool
    aborted: bool
    diagnostic: str | None
    first_hold_iteration: int | None
    final_state: DroneState

    @property
    def converged(self) -> bool:
        """A hold state (all centered voltages inside the threshold) was reached
        and the run descended to the minimum height without an ambiguity abort."""
        return self.first_hold_iteration is not None and self.touchdown and not self.aborted

    @property
    def iterations(self) -> int:
        return len(self.records)


def landing_body_frame(state: DroneState, landing: Vector3) -> Vector3:
    """Express the landing point in the drone body frame (beacon must be below)."""
    dx = landing.x - state.position.x
    dy = landing.y - state.position.y
    dz = landing.z - state.position.z
    if dz >= 0.0:
        raise InvalidParameterError("landing point must lie below the drone plane")
    h = math.radians(state.heading_deg)
    cos_h, sin_h = math.cos(h), math.sin(h)
    return Vector3(dx * cos_h - dy * sin_h, dy * cos_h + dx * sin_h, dz)


def sense(state: DroneState, landing: Vector3, geom: ReceiverGeometry, rf: RFConfig,
          profiles=None, mode="calibrated",
          ideal: IdealDetector | None = None,
          triangular: TriangularDetector | None = None) -> VoltageTriple:
    """Centered detector voltages for the current pose.

    `profiles` maps pair ids ("d12", "d23", "d31") to calibration polynomials
    and is required in calibrated mode.  The ideal-sine variant returns
    gain * sin(theta); the triangular variant returns the linear region of the
    quadrature-shifted characteristic (slope-matched to the measured curves).
    Raises PhaseAmbiguityError when any pair leaves its non-ambiguous range.
    """
    if mode not in DETECTOR_MODES:
        raise InvalidParameterError(f"unknown detector mode {mode!r}")
    sol = phase_solution(geom, landing_body_frame(state, landing), rf)
    wrapped = {pair: wrap_angle_deg(th)
               for pair, th in zip(("d12", "d23", "d31"), sol.phases)}

    if mode == "calibrated":
        if profiles is None:
            raise InvalidParameterError("calibrated mode requires calibration profiles")
        out = []
        for pair, theta in wrapped.items():
            if abs(theta) > CALIBRATED_RANGE_DEG:
                raise PhaseAmbiguityError(pair, theta)
            poly = profiles[pair]
            out.append(centered_voltage(voltage_from_phase(poly, theta), poly))
        return VoltageTriple(*out)

    limit = IDEAL_RANGE_DEG
    for pair, theta in wrapped.items():
        if abs(theta) > limit:
            raise PhaseAmbiguityError(pair, theta)
    if mode == "ideal-sine":
        det = ideal or IdealDetector()
        return VoltageTriple(*(ideal_sine_voltage(t, det) for t in wrapped.values()))
    det = triangular or TriangularDetector()
    return VoltageTriple(*(det.slope_mv_per_deg * t / 1000.0 for t in wrapped.values()))


def apply_maneuver(state: DroneState, m: Maneuver, cfg: SimConfig | None = None) -> DroneState:
    """Pose after one maneuver.

    Left turns subtract from the clockwise-positive heading (the beacon's
    body azimuth grows by the turn magnitude); forward/backward translate
    along the world-frame body +Y direction.  Hold is the identity.
    """
    kind = m.kind
    if kind is ManeuverKind.HOLD:
        return state
    if kind in (ManeuverKind.YAW_LEFT, ManeuverKind.ROTATE_LEFT):
        return DroneState(state.position, state.heading_deg - m.magnitude)
    if kind in (ManeuverKind.YAW_RIGHT, ManeuverKind.ROTATE_RIGHT):
        return DroneState(state.position, state.heading_deg + m.magnitude)
    h = math.radians(state.heading_deg)
    step = m.magnitude if kind is ManeuverKind.FORWARD else -m.magnitude
    pos = Vector3(state.position.x + step * math.sin(h),
                  state.position.y + step * math.cos(h),
                  state.position.z)
    return DroneState(pos, state.heading_deg)


def _escape_direction(maneuvers):
    if len(maneuvers) == 1 and maneuvers[0].kind in (ManeuverKind.YAW_LEFT, ManeuverKind.YAW_RIGHT):
        return -1 if maneuvers[0].kind is ManeuverKind.YAW_LEFT else +1
    return 0


def simulate_landing(start: DroneState, landing: Vector3, geom: ReceiverGeometry,
                     rf: RFConfig, profiles=None,
                     gcfg: GuidanceConfig | None = None,
                     scfg: SimConfig | None = None) -> SimulationResult:
    """Run the sense-decide-act loop until touchdown, abort, or budget exhaustion."""
    gcfg = gcfg or GuidanceConfig()
    scfg = scfg or SimConfig()
    state = start
    records = []
    first_hold = None
    last_escape = 0
    touchdown = False
    aborted = False
    diagnostic = None

    for iteration in range(scfg.max_iterations):
        if state.position.z <= scfg.min_height_cm:
            touchdown = True
            break
        try:
            volts = sense(state, landing, geom, rf, profiles, mode=scfg.detector_mode)
        except PhaseAmbiguityError as exc:
            aborted = True
            diagnostic = f"iteration {iteration}: {exc}"
            break

        maneuvers = decide(volts, gcfg)
        escape = _escape_direction(maneuvers)
        if escape != 0 and escape == -last_escape:
            # opposite escape yaws back to back: fall through to tracking
            maneuvers = tracking_maneuvers(volts, gcfg)
            escape = 0
        records.append(TrajectoryRecord(iteration, state, volts,
                                        classify_sector(volts), tuple(maneuvers)))
        for m in maneuvers:
            state = apply_maneuver(state, m, scfg)

        if escape != 0:
            last_escape = escape
            continue  # reorientation only: no descent
        last_escape = 0
        if maneuvers[0].kind is ManeuverKind.HOLD and first_hold is None:
            first_hold = iteration
        pos = state.position
        # descend one step, never past the touchdown height
        new_z = max(pos.z - scfg.descent_step_cm, min(pos.z, scfg.min_height_cm))
        state = DroneState(Vector3(pos.x, pos.y, new_z), state.heading_deg)
        if state.position.z <= scfg.min_height_cm:
            touchdown = True
            break

    return SimulationResult(records=records, touchdown=touchdown, aborted=aborted,
                            diagnostic=diagnostic, first_hold_iteration=first_hold,
                            final_state=state)


@dataclass(frozen=True)
class TransectRow:
    y_cm: float
    th12: float
    th23: float
    th31: float
    v23: float
    v31: float
    ambiguous: bool


def worst_case_transect(z_cm, y_range_cm, geom: ReceiverGeometry, rf: RFConfig,
                        profiles, n_samples=201):
    """Phase shifts and voltages as the drone tracks along the body +Y axis.

    The beacon sits at the origin; the drone flies at height z over
    y in [-y_range, +y_range] with heading 0.  The 1-2 pair is exactly
    balanced on this line, so th12 is identically zero.  Rows whose phases
    leave the calibrated range carry NaN voltages and an ambiguous flag.
    """
    if not isinstance(n_samples, int) or n_samples < 2:
        raise InvalidParameterError(f"n_samples must be an integer >= 2, got {n_samples!r}")
    z = float(z_cm)
    span = float(y_range_cm)
    rows = []
    for k in range(n_samples):
        y = -span + 2.0 * span * k / (n_samples - 1)
        sol = phase_solution(geom, Vector3(0.0, -y, -z), rf)
        th23, th31 = wrap_angle_deg(sol.th23), wrap_angle_deg(sol.th31)
        ambiguous = max(abs(th23), abs(th31)) > CALIBRATED_RANGE_DEG
        if ambiguous:
            v23 = v31 = math.nan
        else:
            v23 = centered_voltage(voltage_from_phase(profiles["d23"], th23), profiles["d23"])
            v31 = centered_voltage(voltage_from_phase(profiles["d31"], th31), profiles["d31"])
        rows.append(TransectRow(y, sol.th12, th23, th31, v23, v31, ambiguous))
    return rows


def write_trajectory_csv(path_or_file, records):
    """Emit a trajectory: iter,x_cm,y_cm,z_cm,heading_deg,v12,v23,v31,sector,maneuvers."""
    header = ("iter", "x_cm", "y_cm", "z_cm", "heading_deg",
              "v12", "v23", "v31", "sector", "maneuvers")
    rows = []
    for r in records:
        p, v = r.state.position, r.voltages
        rows.append((str(r.iteration), f"{p.x:.6f}", f"{p.y:.6f}", f"{p.z:.6f}",
                     f"{r.state.heading_deg:.6f}", f"{v.v12:.6f}", f"{v.v23:.6f}",
                     f"{v.v31:.6f}", str(r.sector), ";".join(m.token for m in r.maneuvers)))
    if hasattr(path_or_file, "write"):
        w = csv.writer(path_or_file, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
    else:
        with open(path_or_file, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            w.writerows(rows)
