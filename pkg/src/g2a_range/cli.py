"""Command-line interface.

Exit codes: 0 success, 2 invalid arguments, 3 infeasible dimensioning,
4 I/O failure.
"""

from __future__ import annotations

import argparse
import json
import sys

from .dimensioning import DEFAULT_PORT_CAP, DimensioningQuery, antennas_required, max_range, min_antennas_oracle
from .snr_engine import SnrQuery, evaluate
from .sweep import (
    DEFAULTS,
    PRESETS,
    Axis,
    SweepSpec,
    _fmt,
    _format_for,
    _jsonable,
    build_array,
    build_geometry,
    build_radio,
    preset_spec,
    run_sweep,
    spec_from_config,
    write_sweep,
)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_INFEASIBLE = 3
EXIT_IO = 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _add_overrides(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("model overrides")
    g.add_argument("--tx-dbm", type=float, help="transmit power P_t in dBm (default 30)")
    g.add_argument("--noise-dbm", type=float, help="total noise power in dBm (default -95)")
    g.add_argument("--bandwidth", type=float, help="noise bandwidth in Hz (with --nf, instead of --noise-dbm)")
    g.add_argument("--nf", type=float, help="receiver noise figure in dB")
    g.add_argument("--gm-dbi", type=float, help="maximum element gain in dBi (default 8)")
    g.add_argument("--theta3db", type=float, help="elevation half-power beamwidth, deg (default 65)")
    g.add_argument("--phi3db", type=float, help="azimuth half-power beamwidth, deg (default 65)")
    g.add_argument("--am", type=float, help="maximum attenuation A_m in dB (default 30)")
    g.add_argument("--sla", type=float, help="vertical side-lobe attenuation cap in dB (default 30)")
    g.add_argument("--dv", type=float, help="vertical element spacing in wavelengths (default 0.5)")
    g.add_argument("--dh", type=float, help="horizontal port spacing in wavelengths (default 0.5)")
    g.add_argument("--azimuth", type=float, help="UAV azimuth in deg (default 0)")
    g.add_argument("--norm", choices=["per-port", "full-array"], help="weight normalization (default per-port)")


def _add_beam_mode(p: argparse.ArgumentParser, required: bool = True) -> None:
    g = p.add_mutually_exclusive_group(required=required)
    g.add_argument("--tilt", type=float, help="fixed downtilt in deg (no tracking)")
    g.add_argument("--track", action="store_true", help="beam follows the UAV")


def _explicit(args) -> dict:
    """Model parameters the user actually passed."""
    given = {}
    for key in DEFAULTS:
        value = getattr(args, key, None)
        if value is not None and value is not False:
            given[key] = value
    return given


def _params(args) -> dict:
    return {**DEFAULTS, **_explicit(args)}


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="g2a-range", description="Ground-to-air antenna array SNR and dimensioning")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("pattern", help="composite port pattern over theta = 0..180 deg")
    p.add_argument("--tilt", type=float, required=True)
    p.add_argument("--elements", type=int, required=True)
    p.add_argument("--ports", type=int, default=1)
    p.add_argument("--step", type=float, default=0.1, help="theta grid step in deg")
    p.add_argument("--out", help="output CSV (default: stdout)")
    _add_overrides(p)

    p = sub.add_parser("snr", help="SNR at one operating point")
    p.add_argument("--ports", type=int, required=True)
    p.add_argument("--elements", type=int, required=True)
    p.add_argument("--range", type=float, required=True, help="slant range d in m")
    p.add_argument("--height", type=float, required=True, help="UAV height h in m")
    p.add_argument("--freq", type=float, required=True, help="carrier frequency in Hz")
    _add_beam_mode(p)
    p.add_argument("--method", choices=["closed-form", "matrix"], default="closed-form")
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    _add_overrides(p)

    p = sub.add_parser("dimension", help="minimum number of ports for a target SNR")
    p.add_argument("--target", type=float, required=True, help="target SNR in dB")
    p.add_argument("--range", type=float, required=True)
    p.add_argument("--height", type=float, required=True)
    p.add_argument("--elements", type=int, default=8)
    p.add_argument("--freq", type=float, default=2.0e9)
    _add_beam_mode(p)
    p.add_argument("--method", choices=["formula", "oracle"], default="formula")
    p.add_argument("--m-cap", type=int, default=DEFAULT_PORT_CAP, help="port cap for --method oracle")
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    _add_overrides(p)

    p = sub.add_parser("max-range", help="largest range at which M ports meet a target SNR")
    p.add_argument("--ports", type=int, required=True)
    p.add_argument("--target", type=float, required=True)
    p.add_argument("--height", type=float, required=True)
    p.add_argument("--d-lo", type=float, required=True)
    p.add_argument("--d-hi", type=float, required=True)
    p.add_argument("--step", type=float, default=10.0)
    p.add_argument("--elements", type=int, default=8)
    p.add_argument("--freq", type=float, default=2.0e9)
    _add_beam_mode(p)
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    _add_overrides(p)

    p = sub.add_parser("sweep", help="grid sweep from a figure preset or a JSON config")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--preset", choices=PRESETS)
    src.add_argument("--config", help="JSON sweep config")
    p.add_argument("--out", help="output path (required unless the config sets 'out')")
    p.add_argument("--format", choices=["csv", "json"])
    p.add_argument("--ports", type=int)
    p.add_argument("--elements", type=int)
    p.add_argument("--height", type=float)
    p.add_argument("--freq", type=float)
    p.add_argument("--target", type=float)
    _add_beam_mode(p, required=False)
    _add_overrides(p)
    return parser


def _print_record(record: dict, fmt: str) -> None:
    if fmt == "json":
        print(json.dumps({k: _jsonable(v) for k, v in record.items()}))
    else:
        print(",".join(record))
        print(",".join(_fmt(v) for v in record.values()))


def _cmd_pattern(args) -> int:
    p = _params(args)
    if args.step <= 0:
        raise ValueError("--step must be positive")
    count = int(round(180.0 / args.step))
    spec = SweepSpec(preset="custom", metric="pattern",
                     axes=[Axis("theta_deg", tuple(min(180.0, round(i * args.step, 10)) for i in range(count + 1)))],
                     base={k: v for k, v in p.items()})
    build_array(spec.base)  # validate before streaming
    if args.out:
        write_sweep(spec, args.out)
    else:
        out = sys.stdout
        out.write(",".join(spec.columns) + "\n")
        for row in run_sweep(spec):
            out.write(",".join(_fmt(row.get(c)) for c in spec.columns) + "\n")
    return EXIT_OK


def _cmd_snr(args) -> int:
    p = _params(args)
    q = SnrQuery(build_array(p), build_geometry(p), build_radio(p), bool(args.track))
    s = evaluate(q, args.method)
    _print_record({
        "m_ports": s.num_ports, "n_elements": s.num_elements, "range_m": s.range_m,
        "height_m": s.height_m, "carrier_hz": s.carrier_hz, "theta_deg": s.theta_deg,
        "tilt_deg": s.tilt_deg, "tracking": s.tracking, "snr_db": s.snr_db,
        "kernel_magnitude": s.kernel_magnitude, "is_null": s.is_null,
    }, args.format)
    return EXIT_OK


def _cmd_dimension(args) -> int:
    p = _params(args)
    q = DimensioningQuery(args.target, build_geometry(p), build_radio(p), build_array(p), bool(args.track))
    res = antennas_required(q) if args.method == "formula" else min_antennas_oracle(q, args.m_cap)
    _print_record({"min_ports": res.min_ports, "achieved_snr_db": res.achieved_snr_db,
                   "feasible": res.feasible, "note": res.note or None}, args.format)
    return EXIT_OK if res.feasible else EXIT_INFEASIBLE


def _cmd_max_range(args) -> int:
    p = _params(args)
    res = max_range(args.ports, args.target, args.height, build_radio(p), build_array(p),
                    bool(args.track), args.d_lo, args.d_hi, step_m=args.step, azimuth_deg=p["azimuth"])
    _print_record({"range_m": res.range_m, "feasible": res.feasible, "note": res.note or None}, args.format)
    return EXIT_OK if res.feasible else EXIT_INFEASIBLE


def _cmd_sweep(args) -> int:
    overrides = _explicit(args)
    if "tilt" in overrides:
        overrides["track"] = False
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                cfg = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValueError(f"invalid JSON in {args.config}: {exc}") from exc
        if not isinstance(cfg, dict):
            raise ValueError("sweep config must be a JSON object")
        cfg.update(overrides)
        if args.out:
            cfg["out"] = args.out
        if args.format:
            cfg["format"] = args.format
        spec = spec_from_config(cfg)
    else:
        if not args.out:
            raise ValueError("--out is required")
        spec = preset_spec(args.preset, overrides, args.out, args.format or _format_for(args.out))
    if not spec.output_path:
        raise ValueError("no output path: pass --out or set 'out' in the config")
    write_sweep(spec)
    return EXIT_OK


_COMMANDS = {
    "pattern": _cmd_pattern,
    "snr": _cmd_snr,
    "dimension": _cmd_dimension,
    "max-range": _cmd_max_range,
    "sweep": _cmd_sweep,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except OSError as exc:
        print(f"g2a-range: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ValueError, TypeError) as exc:
        print(f"g2a-range: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
