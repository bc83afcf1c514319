"""Command-line interface.

Subcommands: sweep, cone, fit, decide, simulate.  Lengths are centimeters,
angles degrees, frequency gigahertz on the command line (converted at the
boundary).  Exit codes: 0 success, 1 usage, 2 I/O, 3 numerical/ambiguity.
"""

from __future__ import annotations

import argparse
import math
import sys
from contextlib import contextmanager
from dataclasses import dataclass, field

from . import detector, geometry, guidance, simulator
from .errors import FileFormatError, InvalidParameterError, TriphaseError

DEFAULT_SWEEP_FREQ_GHZ = 2.45


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with code 2 on bad usage; remap onto this tool's convention
    def error(self, message):
        raise _UsageError(f"{self.prog}: {message}")


def finite_float(text):
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not math.isfinite(value):
        raise argparse.ArgumentTypeError(f"value must be finite, got {text!r}")
    return value


def positive_float(text):
    value = finite_float(text)
    if value <= 0.0:
        raise argparse.ArgumentTypeError(f"value must be > 0, got {text!r}")
    return value


def positive_int(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value <= 0:
        raise argparse.ArgumentTypeError(f"value must be > 0, got {text!r}")
    return value


def cm_list(text):
    values = [positive_float(x) for x in text.split(",") if x.strip()]
    if not values:
        raise argparse.ArgumentTypeError("expected a comma-separated list of heights")
    return values


@dataclass
class RunConfig:
    """Resolved per-invocation configuration."""

    frequency_hz: float
    spacing_cm: float
    wave_speed_mps: float
    profiles: dict | None = None
    guidance: guidance.GuidanceConfig = field(default_factory=guidance.GuidanceConfig)
    sim: simulator.SimConfig = field(default_factory=simulator.SimConfig)
    out: str = "-"


def _add_common(parser, with_profile=False):
    parser.add_argument("--freq-ghz", type=positive_float, default=None,
                        help="beacon frequency in GHz (default: 2.45; simulate: profile frequency)")
    parser.add_argument("--spacing-cm", type=positive_float, default=7.0,
                        help="receiver input spacing D in cm (default 7)")
    parser.add_argument("--wave-speed", type=positive_float, default=geometry.SPEED_OF_LIGHT_MPS,
                        help="propagation speed in m/s (default vacuum light speed)")
    parser.add_argument("--out", default="-", help="output path, '-' for stdout")
    if with_profile:
        parser.add_argument("--profile", default="table2",
                            help="'table2' for the built-in measured profiles, or three "
                                 "comma-separated built-in names (table2-d12, ...) or "
                                 "profile file paths covering d12,d23,d31")


def _resolve_profiles(selector):
    if selector == "table2":
        return detector.builtin_profile_set()
    profiles = {}
    for item in (p for p in selector.split(",") if p.strip()):
        poly = detector.BUILTIN_PROFILES.get(item) or detector.load_profile(item)
        profiles[poly.pair_id] = poly
    missing = [p for p in detector.PAIR_IDS if p not in profiles]
    if missing:
        raise InvalidParameterError(f"profiles missing pairs: {', '.join(missing)}")
    return profiles


@contextmanager
def _open_out(path):
    if path == "-":
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def _build_run_config(args, with_profile=False, default_freq_ghz=DEFAULT_SWEEP_FREQ_GHZ):
    profiles = _resolve_profiles(args.profile) if with_profile else None
    if args.freq_ghz is not None:
        freq_hz = args.freq_ghz * 1e9
    elif with_profile:
        freq_hz = profiles["d12"].frequency_hz
    else:
        freq_hz = default_freq_ghz * 1e9
    return RunConfig(frequency_hz=freq_hz, spacing_cm=args.spacing_cm,
                     wave_speed_mps=args.wave_speed, profiles=profiles, out=args.out)


def cmd_sweep(args):
    cfg = _build_run_config(args)
    geom = geometry.receiver_points(cfg.spacing_cm)
    rf = geometry.RFConfig(cfg.frequency_hz, cfg.wave_speed_mps)
    rows = geometry.azimuth_sweep(args.r_cm, args.z_cm, geom, rf, args.n)
    with _open_out(cfg.out) as fh:
        geometry.write_sweep_csv(fh, rows)
    return 0


def cmd_cone(args):
    cfg = _build_run_config(args)
    geom = geometry.receiver_points(cfg.spacing_cm)
    rf = geometry.RFConfig(cfg.frequency_hz, cfg.wave_speed_mps)
    rows = geometry.cone_profile(args.z_cm, args.theta_limit, geom, rf, args.n_azimuths)
    with _open_out(cfg.out) as fh:
        geometry.write_cone_csv(fh, rows)
    return 0


def cmd_fit(args):
    samples = detector.read_measurement_csv(args.samples)
    poly = detector.fit_calibration(samples, degree=args.degree, pair_id=args.pair_id,
                                    frequency_hz=(args.freq_ghz or 2.46) * 1e9)
    with _open_out(args.out) as fh:
        detector.save_profile(poly, fh)
    print(f"max_err_deg={poly.max_err_deg:.6g}")
    return 0


def cmd_decide(args):
    triple = guidance.VoltageTriple(args.v12, args.v23, args.v31)
    cfg = guidance.GuidanceConfig(hold_threshold_v=args.hold_threshold,
                                  rotate_step_deg=args.rotate_step,
                                  move_step_cm=args.move_step)
    maneuvers = guidance.decide(triple, cfg)
    print(guidance.trace_line(triple, guidance.classify_sector(triple), maneuvers))
    return 0


def cmd_simulate(args):
    cfg = _build_run_config(args, with_profile=True)
    cfg.guidance = guidance.GuidanceConfig(hold_threshold_v=args.hold_threshold,
                                           rotate_step_deg=args.rotate_step,
                                           move_step_cm=args.move_step)
    cfg.sim = simulator.SimConfig(descent_step_cm=args.descent_step,
                                  min_height_cm=args.min_height,
                                  max_iterations=args.max_iterations,
                                  detector_mode=args.mode)
    geom = geometry.receiver_points(cfg.spacing_cm)
    rf = geometry.RFConfig(cfg.frequency_hz, cfg.wave_speed_mps)
    start = simulator.DroneState(
        geometry.Vector3(args.start_x, args.start_y, args.start_z), args.heading)
    scenario = geometry.LandingScenario(args.landing_r, args.landing_phi, args.start_z)
    world = geometry.landing_point_world(scenario)
    # scenario is drone-relative; place the beacon on the ground plane in world frame
    landing = geometry.Vector3(args.start_x + world.x, args.start_y + world.y, 0.0)

    result = simulator.simulate_landing(start, landing, geom, rf, cfg.profiles,
                                        cfg.guidance, cfg.sim)
    with _open_out(cfg.out) as fh:
        simulator.write_trajectory_csv(fh, result.records)

    final = result.final_state.position
    err = math.hypot(landing.x - final.x, landing.y - final.y)
    if result.aborted:
        print(f"aborted: {result.diagnostic}", file=sys.stderr)
        return 3
    if result.converged:
        print(f"converged: first hold at iteration {result.first_hold_iteration}; "
              f"touchdown at ({final.x:.2f}, {final.y:.2f}) cm; "
              f"horizontal error {err:.2f} cm in {result.iterations} iterations")
    else:
        print(f"non-converged after {result.iterations} iterations "
              f"(horizontal error {err:.2f} cm)")
    return 0


def build_parser():
    parser = _Parser(prog="triphase",
                     description="Triangular RF phase-shift landing sensor toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sweep", help="phase shifts vs landing azimuth (CSV)")
    _add_common(p)
    p.add_argument("--r-cm", type=positive_float, default=10.0, help="landing radius (default 10)")
    p.add_argument("--z-cm", type=positive_float, default=100.0, help="drone height (default 100)")
    p.add_argument("--n", type=positive_int, default=361, help="azimuth samples (default 361)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("cone", help="non-ambiguity cone radii per height and azimuth (CSV)")
    _add_common(p)
    p.add_argument("--theta-limit", type=positive_float, default=90.0,
                   help="non-ambiguous phase limit in degrees (default 90)")
    p.add_argument("--z-cm", type=cm_list,
                   default=[100.0 * k for k in range(1, 11)],
                   help="comma-separated heights in cm (default 100..1000)")
    p.add_argument("--n-azimuths", type=positive_int, default=24,
                   help="azimuth samples per height (default 24)")
    p.set_defaults(func=cmd_cone)

    p = sub.add_parser("fit", help="fit a calibration polynomial from a measurement CSV")
    p.add_argument("samples", help="CSV with header theta_deg,voltage_v,power_dbm")
    p.add_argument("--degree", type=positive_int, default=5, help="polynomial degree (default 5)")
    p.add_argument("--pair-id", choices=detector.PAIR_IDS, default="d12")
    p.add_argument("--freq-ghz", type=positive_float, default=None,
                   help="frequency stored in the profile (default 2.46)")
    p.add_argument("--out", default="-", help="profile output path, '-' for stdout")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("decide", help="one guidance decision from three centered voltages")
    p.add_argument("v12", type=finite_float)
    p.add_argument("v23", type=finite_float)
    p.add_argument("v31", type=finite_float)
    p.add_argument("--hold-threshold", type=positive_float, default=0.02)
    p.add_argument("--rotate-step", type=positive_float, default=1.0)
    p.add_argument("--move-step", type=positive_float, default=1.0)
    p.set_defaults(func=cmd_decide)

    p = sub.add_parser("simulate", help="closed-loop landing run, trajectory as CSV")
    _add_common(p, with_profile=True)
    p.add_argument("--start-x", type=finite_float, default=0.0)
    p.add_argument("--start-y", type=finite_float, default=0.0)
    p.add_argument("--start-z", type=positive_float, default=300.0)
    p.add_argument("--heading", type=finite_float, default=0.0)
    p.add_argument("--landing-r", type=finite_float, default=100.0,
                   help="beacon radius from the start pose, cm")
    p.add_argument("--landing-phi", type=finite_float, default=-35.0,
                   help="beacon azimuth from the start pose, deg")
    p.add_argument("--hold-threshold", type=positive_float, default=0.02)
    p.add_argument("--rotate-step", type=positive_float, default=1.0)
    p.add_argument("--move-step", type=positive_float, default=1.0)
    p.add_argument("--descent-step", type=positive_float, default=1.0)
    p.add_argument("--min-height", type=positive_float, default=1.0)
    p.add_argument("--max-iterations", type=positive_int, default=100_000)
    p.add_argument("--mode", choices=simulator.DETECTOR_MODES, default="calibrated")
    p.set_defaults(func=cmd_simulate)

    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except _UsageError as exc:
        print(str(exc), file=sys.stderr)
        return 1
    try:
        return args.func(args)
    except InvalidParameterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (FileFormatError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except TriphaseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
