"""Command-line runner: ``biphoton <command> --config scenario.json --out data.csv``."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from . import experiments as ex
from .errors import ConfigurationError, MeasurementError, SamplingError
from .io import write_csv, write_json
from .scenario import default_scenario, load_scenario

log = logging.getLogger("biphoton")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="scenario JSON (default: packaged default scenario)")
    p.add_argument("--out", help="CSV output path (default: scenario outputs.csv_path)")
    p.add_argument("--summary", help="JSON summary path (default: next to --out, or outputs.summary_path)")
    p.add_argument("--plot", action="store_true", help="also render a PNG figure next to the CSV")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="biphoton", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fedorov-scan", help="Fedorov ratio versus detection distance")
    _add_common(p)
    p = sub.add_parser("schmidt-scan", help="SVD and interferometric Schmidt number versus distance")
    _add_common(p)
    p = sub.add_parser("modes", help="Schmidt modes and spectrum of the source")
    _add_common(p)
    p.add_argument("--n-modes", type=int, default=3)
    p = sub.add_parser("phase-scan", help="interferometer phase scan at one plane")
    _add_common(p)
    p.add_argument("--n-thetas", type=int, default=64)
    p.add_argument("--z-mm", type=float, help="detection plane (default: sweep start)")
    p = sub.add_parser("amplitude", help="two-photon intensity map at one plane")
    _add_common(p)
    p.add_argument("--z-mm", type=float, required=True)
    p.add_argument("--domain", choices=("position", "momentum"), default="position")
    return parser


def _paths(args, scenario) -> tuple[Path, Path]:
    out = Path(args.out or scenario.outputs.csv_path)
    if args.summary:
        summary = Path(args.summary)
    elif args.out:
        summary = out.with_suffix(".json")
    else:
        summary = Path(scenario.outputs.summary_path)
    return out, summary


def _run(args, scenario):
    if args.command == "fedorov-scan":
        result = ex.run_fedorov_scan(scenario)
        if result.summary["valid_points"] == 0:
            raise MeasurementError("no plane produced a converged Fedorov ratio")
        return result
    if args.command == "schmidt-scan":
        return ex.run_schmidt_scan(scenario)
    if args.command == "modes":
        return ex.run_modes(scenario, args.n_modes)
    z = None if args.z_mm is None else args.z_mm * 1e-3
    if args.command == "phase-scan":
        return ex.run_phase_scan(scenario, args.n_thetas, z)
    return ex.run_amplitude_dump(scenario, z, args.domain)


def _plot(command, result, out: Path) -> Path:
    from . import plotting

    figure = {
        "fedorov-scan": plotting.fedorov_figure,
        "schmidt-scan": plotting.schmidt_figure,
        "modes": plotting.modes_figure,
        "phase-scan": plotting.phase_scan_figure,
        "amplitude": plotting.amplitude_figure,
    }[command]
    return figure(result, out.with_suffix(".png"))


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        scenario = load_scenario(args.config) if args.config else default_scenario()
        if getattr(args, "n_modes", 1) < 1:
            raise ConfigurationError("--n-modes must be >= 1")
        if getattr(args, "n_thetas", 3) < 3:
            raise ConfigurationError("--n-thetas must be >= 3 (a two-point scan needs explicit thetas 0, pi)")
        out, summary_path = _paths(args, scenario)
        with np.errstate(all="ignore"):
            result = _run(args, scenario)
    except SamplingError as exc:
        log.error("sampling violation: %s", exc)
        return EXIT_NUMERICAL
    except (ConfigurationError, ValueError) as exc:
        log.error("configuration error: %s", exc)
        return EXIT_CONFIG
    except MeasurementError as exc:
        log.error("numerical failure: %s", exc)
        return EXIT_NUMERICAL

    written = [str(write_csv(out, result.columns, result.rows))]
    if "eigen_rows" in result.extra:
        eig = out.with_name(out.stem + "_eigenvalues.csv")
        written.append(str(write_csv(eig, result.extra["eigen_columns"], result.extra["eigen_rows"])))
    if args.plot:
        written.append(str(_plot(args.command, result, out)))
    for w in result.warnings:
        log.warning(w)
    write_json(
        summary_path,
        {
            "command": args.command,
            "scenario": scenario.resolved(),
            "summary": result.summary,
            "warnings": result.warnings,
            "outputs": written,
        },
    )
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
