"""Command-line front end.

    blpsim trajectory   --config run.json [--out DIR] [--seed N]
    blpsim sweep-delay  --config run.json
    blpsim sweep-angles --config run.json
    blpsim measure      --config run.json
    blpsim fit          --config run.json --data sweep_delay.csv

Every command writes its artifacts plus ``manifest.json`` (resolved config and
SHA-256 of each artifact) into the output directory and nowhere else.
Exit codes: 0 success, 1 config error, 2 computation error, 3 I/O error.
"""
from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path
from typing import Callable, Optional

import numpy as np

from . import __version__
from .config import RunConfig
from .dynamics import time_grid, trace_distance_trajectory
from .errors import BlpsimError, ConfigError, FitError
from .experiment import inset_angles, monte_carlo_delta_D, sweep_angles, sweep_delay
from .fitting import fit_delta_omega, fit_spectrum
from .io import DataFileError, read_columns, sha256_file, write_columns, write_csv, write_json
from .measure import blp_measure
from .qubit import pure_state

log = logging.getLogger("blpsim")

EXIT_OK, EXIT_CONFIG, EXIT_COMPUTE, EXIT_IO = 0, 1, 2, 3

COLUMNS = {
    "trajectory.csv": ["t_ps", "D", "sigma", "abs_kappa", "gamma"],
    "sweep_delay.csv": ["x0_mm", "delta_D", "D_t0", "D_tf"],
    "sweep_angles.csv": ["theta_deg", "<one column per xi_deg value>"],
    "sweep_angles_inset.csv": ["theta_deg", "<one column per xi_deg value>"],
}


def _axis(start: float, stop: float, step: float, inclusive: bool) -> np.ndarray:
    n = int(np.floor((stop - start) / step + 1e-9)) + (1 if inclusive else 0)
    if not inclusive and start + n * step < stop - 1e-9 * step:
        n += 1
    return np.round(start + step * np.arange(n), 10)


def cmd_trajectory(cfg: RunConfig, out: Path) -> list[Path]:
    model = cfg.model()
    theta, xi = cfg.pair
    times = time_grid(model, cfg.section("trajectory")["n_intervals"])
    series = trace_distance_trajectory(model, pure_state(theta), pure_state(xi), times=times)
    path = write_columns(
        out / "trajectory.csv",
        {
            "t_ps": series.times,
            "D": series.D,
            "sigma": series.sigma,
            "abs_kappa": np.abs(model.kappa(series.times)),
            "gamma": model.gamma(series.times),
        },
    )
    return [path]


def cmd_sweep_delay(cfg: RunConfig, out: Path) -> list[Path]:
    s = cfg.section("sweep_delay")
    x0 = _axis(s["x0_start_mm"], s["x0_stop_mm"], s["x0_step_mm"], inclusive=True)
    counting = cfg.counting() if s["counting_noise"] else None
    sweep = sweep_delay(cfg.model(), x0, cfg.pair, counting, correct_dark=s["dark_correction"])
    csv_path = write_columns(out / "sweep_delay.csv", sweep.columns())
    k = int(np.argmax(sweep.delta_D))
    summary = write_json(
        out / "sweep_delay_summary.json",
        {
            "best_x0_mm": float(sweep.x0_mm[k]),
            "max_delta_D": float(sweep.delta_D[k]),
            "theta_deg": sweep.pair[0],
            "xi_deg": sweep.pair[1],
            "counting_noise": sweep.noisy,
        },
    )
    return [csv_path, summary]


def _write_matrix(path: Path, sweep) -> Path:
    header = ["theta_deg"] + [repr(float(x)) for x in sweep.xis]
    rows = ([th, *row] for th, row in zip(sweep.thetas, sweep.delta_D))
    return write_csv(path, header, rows)


def cmd_sweep_angles(cfg: RunConfig, out: Path) -> list[Path]:
    s = cfg.section("sweep_angles")
    model = cfg.model()
    axis = _axis(s["start_deg"], s["stop_deg"], s["step_deg"], inclusive=False)
    sweep = sweep_angles(model, axis, axis)
    best = sweep.best_pair
    paths = [_write_matrix(out / "sweep_angles.csv", sweep)]
    inset = None
    if s["inset_half_width_deg"] > 0:
        th, xi = inset_angles(best, s["inset_half_width_deg"], s["inset_step_deg"])
        inset = sweep_angles(model, th, xi)
        paths.append(_write_matrix(out / "sweep_angles_inset.csv", inset))
    paths.append(
        write_json(
            out / "sweep_angles_summary.json",
            {
                "argmax": {"theta_deg": best[0], "xi_deg": best[1]},
                "max_delta_D": sweep.max_value,
                "inset_argmax": None
                if inset is None
                else {"theta_deg": inset.best_pair[0], "xi_deg": inset.best_pair[1]},
                "x0_mm": model.params.x0_mm,
            },
        )
    )
    return paths


def cmd_measure(cfg: RunConfig, out: Path) -> list[Path]:
    s = cfg.section("measure")
    model = cfg.model()
    result = blp_measure(model, s["resolution_deg"], s["refine_deg"] or None)
    paths = [write_json(out / "measure.json", result.to_dict())]
    if s["monte_carlo_trials"] > 0:
        raw, cor = monte_carlo_delta_D(model, cfg.counting(), result.best_pair, s["monte_carlo_trials"])
        paths.append(
            write_json(
                out / "noise_summary.json",
                {
                    "theta_deg": result.best_pair[0],
                    "xi_deg": result.best_pair[1],
                    "noise_free_delta_D": result.value,
                    "raw": raw.to_dict(),
                    "dark_corrected": cor.to_dict(),
                },
            )
        )
    return paths


def cmd_fit(cfg: RunConfig, out: Path, data_file: Path) -> list[Path]:
    kind = cfg.section("fit")["kind"]
    if kind == "spectrum":
        cols = read_columns(data_file, ["wavelength_nm", "intensity"])
        fitter: Callable = lambda: fit_spectrum(cols["wavelength_nm"], cols["intensity"])
    else:
        cols = read_columns(data_file, ["x0_mm", "D_tf"])
        fitter = lambda: fit_delta_omega(cols["x0_mm"], cols["D_tf"], c=cfg.model().params.c)
    try:
        result = fitter()
    except FitError as exc:
        diag = getattr(exc, "diagnostic", {"success": False, "message": str(exc)})
        write_json(out / "fit.json", {**diag, "kind": kind, "data_file": data_file.name})
        raise
    return [write_json(out / "fit.json", {**result.to_dict(), "kind": kind, "data_file": data_file.name})]


COMMANDS = {
    "trajectory": cmd_trajectory,
    "sweep-delay": cmd_sweep_delay,
    "sweep-angles": cmd_sweep_angles,
    "measure": cmd_measure,
    "fit": cmd_fit,
}


def write_manifest(cfg: RunConfig, out: Path, command: str, outputs: list[Path], **extra) -> Path:
    return write_json(
        out / "manifest.json",
        {
            "command": command,
            "version": __version__,
            "config": cfg.raw,
            "outputs": {p.name: sha256_file(p) for p in outputs},
            "columns": {p.name: COLUMNS[p.name] for p in outputs if p.name in COLUMNS},
            **extra,
        },
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="blpsim", description=__doc__.split("\n\n")[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", type=Path, help="run configuration JSON (defaults if omitted)")
        p.add_argument("--out", type=str, help="output directory (overrides output_dir)")
        p.add_argument("--seed", type=int, help="RNG seed (overrides seed)")
        if name == "fit":
            p.add_argument("--data", type=Path, required=True, help="CSV with x0_mm,D_tf (or wavelength_nm,intensity)")
            p.add_argument("--kind", choices=["delay", "spectrum"], help="overrides fit.kind")
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")

    overrides: dict = {}
    if args.out is not None:
        overrides["output_dir"] = args.out
    if args.seed is not None:
        overrides["seed"] = args.seed
    if getattr(args, "kind", None):
        overrides["fit"] = {"kind": args.kind}
    try:
        if args.config is not None:
            cfg = RunConfig.load(args.config, overrides)
        else:
            cfg = RunConfig.from_dict(overrides)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO

    out = cfg.output_dir
    try:
        out.mkdir(parents=True, exist_ok=True)
        if not os.access(out, os.W_OK):
            raise PermissionError(f"output directory {out} is not writable")
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO

    run = COMMANDS[args.command]
    try:
        if args.command == "fit":
            paths = run(cfg, out, args.data)
        else:
            paths = run(cfg, out)
    except DataFileError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_IO
    except FitError as exc:
        diag = out / "fit.json"
        write_manifest(cfg, out, args.command, [diag] if diag.exists() else [], success=False)
        print(f"fit failed: {exc}", file=sys.stderr)
        return EXIT_COMPUTE
    except BlpsimError as exc:
        print(f"computation error: {exc}", file=sys.stderr)
        return EXIT_COMPUTE
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO

    manifest = write_manifest(cfg, out, args.command, paths, success=True)
    for p in paths + [manifest]:
        log.info("wrote %s", p)
    return EXIT_OK
