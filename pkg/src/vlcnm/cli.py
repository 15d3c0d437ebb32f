"""Command-line entry point.

``vlcnm run`` runs one scenario (or its sweep block), ``vlcnm table4`` sweeps
acquisition length and ``vlcnm figure34`` sweeps ambient intensity over a
distance grid for 4PPM and 8PPM. Exit status: 0 on success, 2 on an invalid
configuration, 3 when every point of the run failed.
"""

from __future__ import annotations

import argparse
import logging
import math
import sys

from .harness import emit_report, merge_reports, run_scenario, run_sweep, ExperimentReport
from .scenario import (
    ConfigError,
    SweepSpec,
    load_preset,
    load_scenario_file,
    scenario_from_dict,
    sweep_from_dict,
)

EXIT_OK, EXIT_CONFIG, EXIT_ALL_FAILED = 0, 2, 3
MODULATIONS = {"4ppm": 4, "8ppm": 8}


def _common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--scenario", help="JSON scenario file (defaults to the built-in preset)")
    parser.add_argument("--frames", type=int, help="frames per point")
    parser.add_argument("--acq-samples", type=int, help="noise-only acquisition length")
    parser.add_argument("--order", type=int, help="predictor order p")
    parser.add_argument("--seed", type=int, help="master seed")
    parser.add_argument("--repetitions", type=int, help="repetitions per sweep point")
    parser.add_argument("--workers", type=int, default=1)
    parser.add_argument("--format", choices=("csv", "json"), default="csv")
    parser.add_argument("--out", help="output path (default: stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="vlcnm", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one scenario")
    _common(run)
    run.add_argument("--modulation", choices=sorted(MODULATIONS))
    run.add_argument("--filtering", choices=("on", "off", "both"))

    t4 = sub.add_parser("table4", help="SER versus acquisition length")
    _common(t4)
    t4.add_argument("--values", type=int, nargs="+", help="acquisition lengths")

    f34 = sub.add_parser("figure34", help="SER versus ambient intensity and distance")
    _common(f34)
    f34.add_argument("--lumens", type=float, nargs="+", help="ambient intensities in lumen")
    f34.add_argument("--distances", type=float, nargs="+", default=[2.0, 4.0, 8.0])
    f34.add_argument("--modulations", choices=sorted(MODULATIONS), nargs="+", default=["4ppm", "8ppm"])
    return parser


def _scenario_dict(args, preset: str) -> dict:
    return load_scenario_file(args.scenario) if args.scenario else load_preset(preset)


def _overrides(args, d: dict) -> dict:
    d = dict(d)
    for attr, key in (("frames", "n_frames"), ("acq_samples", "acquisition_samples"),
                      ("order", "predictor_order"), ("seed", "seed")):
        value = getattr(args, attr, None)
        if value is not None:
            d[key] = value
    if getattr(args, "filtering", None):
        d["filtering"] = args.filtering
    if getattr(args, "modulation", None):
        d["modulation"] = {**d.get("modulation", {}), "order_M": MODULATIONS[args.modulation]}
    if args.repetitions is not None and "sweep" in d:
        d["sweep"] = {**d["sweep"], "repetitions": args.repetitions}
    return d


def _cmd_run(args) -> ExperimentReport:
    d = _overrides(args, _scenario_dict(args, "default"))
    sweep = sweep_from_dict(d)
    if sweep is not None:
        return run_sweep(sweep, workers=args.workers)
    cfg = scenario_from_dict(d)
    return ExperimentReport(run_scenario(cfg), {"config_hash": cfg.digest(), "seed": cfg.seed.seed})


def _cmd_table4(args) -> ExperimentReport:
    d = _overrides(args, _scenario_dict(args, "table4"))
    base = scenario_from_dict(d)
    sweep_block = d.get("sweep", {})
    values = args.values or sweep_block.get("values") or [10, 100, 1000, 4000]
    reps = args.repetitions or sweep_block.get("repetitions", 1)
    return run_sweep(SweepSpec(base, "acquisition_samples", tuple(values), reps), workers=args.workers)


def _cmd_figure34(args) -> ExperimentReport:
    d = _overrides(args, _scenario_dict(args, "figure34"))
    sweep_block = d.get("sweep", {})
    lumens = args.lumens or sweep_block.get("values") or [50, 100, 150, 200, 250]
    reps = args.repetitions or sweep_block.get("repetitions", 1)
    parts = []
    for mod in args.modulations:
        for dist in args.distances:
            point = dict(d)
            point["modulation"] = {**d.get("modulation", {}), "order_M": MODULATIONS[mod]}
            point["channel"] = {**{k: v for k, v in d.get("channel", {}).items() if k != "gain"},
                                "distance_m": dist}
            base = scenario_from_dict(point)
            sweep = SweepSpec(base, "interference_lumen", tuple(lumens), reps)
            parts.append(run_sweep(sweep, workers=args.workers,
                                   axis_label=f"interference_lumen@distance_m={dist:g}"))
    return merge_reports(parts)


COMMANDS = {"run": _cmd_run, "table4": _cmd_table4, "figure34": _cmd_figure34}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        report = COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"vlcnm: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    data = emit_report(report, args.format)
    if args.out:
        with open(args.out, "wb") as fh:
            fh.write(data)
    else:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
    if report.rows and all(row.failure or math.isnan(row.ser) for row in report.rows):
        print("vlcnm: every point failed", file=sys.stderr)
        return EXIT_ALL_FAILED
    return EXIT_OK
