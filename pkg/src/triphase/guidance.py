"""Sector-based landing guidance from signed detector voltages.

The azimuth plane around the drone divides into six 60-degree sectors; the
pair whose centered voltage has the smallest magnitude names the major sector
(pair 1-2 -> forward/backward axis, pair 2-3 -> the axis through input 1,
pair 3-1 -> the axis through input 2).  One decision cycle yields either a
coarse 60-degree escape yaw (sectors 2/3), a fine rotate+translate tracking
pair (sector 1), or Hold when all three magnitudes are inside the threshold.

sign(0) counts as positive everywhere a sign enters a comparison.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .errors import InvalidParameterError
from .geometry import wrap_angle_deg

_VALID_SECTORS = {(1, "a"), (1, "b"), (2, "a"), (2, "b"), (3, "a"), (3, "b")}


@dataclass(frozen=True)
class SectorId:
    major: int
    sub: str

    def __post_init__(self):
        if (self.major, self.sub) not in _VALID_SECTORS:
            raise InvalidParameterError(f"invalid sector {self.major}{self.sub}")

    def __str__(self):
        return f"{self.major}{self.sub}"


@dataclass(frozen=True)
class VoltageTriple:
    """Centered (signed) detector voltages for the three pairs, in volts."""

    v12: float
    v23: float
    v31: float

    def __post_init__(self):
        for name in ("v12", "v23", "v31"):
            if not math.isfinite(getattr(self, name)):
                raise InvalidParameterError(f"{name} must be finite")

    @property
    def as_tuple(self):
        return (self.v12, self.v23, self.v31)

    @property
    def max_abs(self) -> float:
        return max(abs(self.v12), abs(self.v23), abs(self.v31))


class ManeuverKind(Enum):
    YAW_LEFT = "YAWL"
    YAW_RIGHT = "YAWR"
    ROTATE_LEFT = "ROTL"
    ROTATE_RIGHT = "ROTR"
    FORWARD = "FWD"
    BACKWARD = "BWD"
    HOLD = "HOLD"


@dataclass(frozen=True)
class Maneuver:
    """One commanded move: degrees for yaw/rotate, cm for translate, none for Hold."""

    kind: ManeuverKind
    magnitude: float | None = None

    def __post_init__(self):
        if self.kind is ManeuverKind.HOLD:
            if self.magnitude is not None:
                raise InvalidParameterError("Hold carries no magnitude")
        elif self.magnitude is None or not math.isfinite(self.magnitude) or self.magnitude <= 0.0:
            raise InvalidParameterError(f"{self.kind.value} needs a positive magnitude")

    @property
    def token(self) -> str:
        if self.kind is ManeuverKind.HOLD:
            return "HOLD"
        return f"{self.kind.value}{self.magnitude:g}"


HOLD = Maneuver(ManeuverKind.HOLD)


@dataclass(frozen=True)
class GuidanceConfig:
    hold_threshold_v: float = 0.02
    rotate_step_deg: float = 1.0
    move_step_cm: float = 1.0
    escape_yaw_deg: float = 60.0

    def __post_init__(self):
        for name in ("hold_threshold_v", "rotate_step_deg", "move_step_cm", "escape_yaw_deg"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0.0):
                raise InvalidParameterError(f"{name} must be > 0, got {v}")


def _sign(x) -> float:
    return 1.0 if x >= 0.0 else -1.0


def classify_sector(v: VoltageTriple) -> SectorId:
    """Locate the landing point's sector from the voltage magnitudes and signs.

    Major: 1 when |v12| is (tied-)smallest, else 2 when |v23| < |v31|, else 3.
    Sub-sectors read the sign of the remaining informative pair: 1a points
    forward (v23 >= 0), 2b lies opposite input 1 (v31 < 0), 3a points at
    input 2 (v23 < 0).  Subs for majors 2/3 are diagnostic only.
    """
    a12, a23, a31 = abs(v.v12), abs(v.v23), abs(v.v31)
    if a12 <= a23 and a12 <= a31:
        return SectorId(1, "a" if _sign(v.v23) > 0 else "b")
    if a23 < a31:
        return SectorId(2, "b" if v.v31 < 0 else "a")
    return SectorId(3, "a" if v.v23 < 0 else "b")


def tracking_maneuvers(v: VoltageTriple, cfg: GuidanceConfig):
    """The sector-1 fine-tracking pair: rotate toward the beacon, then translate.

    Rotate right when v12 and v23 disagree in sign (beacon on the right side),
    else left; move forward when v23 is non-negative, else backward.
    """
    if _sign(v.v12) != _sign(v.v23):
        rotation = Maneuver(ManeuverKind.ROTATE_RIGHT, cfg.rotate_step_deg)
    else:
        rotation = Maneuver(ManeuverKind.ROTATE_LEFT, cfg.rotate_step_deg)
    if _sign(v.v23) > 0:
        translation = Maneuver(ManeuverKind.FORWARD, cfg.move_step_cm)
    else:
        translation = Maneuver(ManeuverKind.BACKWARD, cfg.move_step_cm)
    return [rotation, translation]


def decide(v: VoltageTriple, cfg: GuidanceConfig | None = None):
    """One guidance decision from one voltage snapshot.

    Hold dominates when all three magnitudes are inside the threshold.  A
    sector-2/3 reading returns a single 60-degree escape yaw (the drone must
    re-sense before tracking).  Sector 1 returns the tracking pair.
    """
    cfg = cfg or GuidanceConfig()
    if v.max_abs <= cfg.hold_threshold_v:
        return [HOLD]
    sector = classify_sector(v)
    if sector.major == 2:
        return [Maneuver(ManeuverKind.YAW_LEFT, cfg.escape_yaw_deg)]
    if sector.major == 3:
        return [Maneuver(ManeuverKind.YAW_RIGHT, cfg.escape_yaw_deg)]
    return tracking_maneuvers(v, cfg)


def expected_sector_from_azimuth(phi_deg) -> SectorId:
    """Test oracle: the 60-degree sector containing a landing azimuth.

    Sectors are centered at 0 (1a), +60 (3b), +120 (2a), 180 (1b), -120 (3a)
    and -60 (2b); a boundary angle belongs to the sector above it.
    """
    phi = wrap_angle_deg(phi_deg)
    sectors = (SectorId(1, "a"), SectorId(3, "b"), SectorId(2, "a"),
               SectorId(1, "b"), SectorId(3, "a"), SectorId(2, "b"))
    return sectors[math.floor((phi + 30.0) / 60.0) % 6]


def trace_line(v: VoltageTriple, sector: SectorId, maneuvers) -> str:
    """Diagnostic line: v12,v23,v31,sector,token;token."""
    tokens = ";".join(m.token for m in maneuvers)
    return f"{v.v12:.2f},{v.v23:.2f},{v.v31:.2f},{sector},{tokens}"
