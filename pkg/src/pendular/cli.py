"""Command-line front end.

Subcommands: ``spectrum`` (adiabatic scan + crossings), ``propagate``
(single run), ``sweep`` (tau or Es series), ``crossings`` (crossing
report with max-eta diagnostics), ``validate`` (parse + invariants
only).  Exit codes: 0 success, 1 validation error, 2 numerical failure,
3 I/O error.  Output files are written atomically (temp file + rename).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
import time
from datetime import datetime, timezone
from pathlib import Path

import numpy as np
import scipy

from . import __version__
from ._kernels import BACKEND
from .config import LoadedConfig, parse_config
from .errors import ConfigError, NumericalError
from .operators import build_operators
from .basis import build_basis
from .runner import run as run_dynamics
from .runner import sweep as run_sweep
from .runner import sweep_to_csv
from .spectrum import (
    crossings_to_csv,
    detect_crossings,
    max_eta_over_pulse,
    scan_intensity,
)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NUMERICAL = 2
EXIT_IO = 3


def _atomic_write(path: Path, writer) -> None:
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    os.close(fd)
    try:
        writer(tmp)
        os.replace(tmp, path)
    finally:
        if os.path.exists(tmp):
            os.unlink(tmp)


def _write_metadata(outdir: Path, name: str, loaded: LoadedConfig, timings: dict) -> None:
    meta = {
        "timestamp": datetime.now(timezone.utc).isoformat(),
        "config_file": loaded.source_path,
        "effective_config": loaded.effective,
        "versions": {
            "pendular": __version__,
            "numpy": np.__version__,
            "scipy": scipy.__version__,
            "kernel_backend": BACKEND,
        },
        "timings_s": timings,
    }

    def write(tmp):
        Path(tmp).write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")

    _atomic_write(outdir / name, write)


def _scan_for(loaded: LoadedConfig, n_points=None):
    cfg = loaded.run_config
    basis = build_basis(cfg.block, cfg.J_max)
    ops = build_operators(basis, cfg.molecule)
    grid = np.geomspace(loaded.scan.I_min, loaded.scan.I_max,
                        n_points or loaded.scan.n_points)
    return ops, scan_intensity(ops, cfg.dc.Es_max, grid, n_track=cfg.n_track)


def _cmd_validate(loaded: LoadedConfig, outdir: Path) -> int:
    print(f"config OK: {loaded.source_path}")
    print(f"  molecule: {loaded.run_config.molecule.name}")
    print(f"  block:    {loaded.run_config.block}")
    print(f"  initial:  {loaded.run_config.initial_label}")
    print(f"  pulse:    I0={loaded.run_config.pulse.I0:g} W/cm^2, "
          f"tau={loaded.run_config.pulse.tau_ns:g} ns")
    print(f"  dc:       Es={loaded.run_config.dc.Es_max:g} V/cm ({loaded.run_config.dc.mode})")
    return EXIT_OK


def _cmd_propagate(loaded: LoadedConfig, outdir: Path) -> int:
    t0 = time.perf_counter()
    traj = run_dynamics(loaded.run_config)
    _atomic_write(outdir / "trajectory.csv", traj.to_csv)
    _write_metadata(outdir, "metadata.json", loaded, {
        "run": traj.runtime_s, "total": time.perf_counter() - t0,
    })
    for flag in traj.flags[:10]:
        print(f"warning: {flag}", file=sys.stderr)
    print(f"t=0: cos_theta = {traj.cos_theta_final:.6f}, "
          f"norm = {traj.norm[-1]:.9f}, steps = {traj.n_steps}")
    print(f"wrote {outdir / 'trajectory.csv'}")
    return EXIT_OK


def _cmd_spectrum(loaded: LoadedConfig, outdir: Path) -> int:
    t0 = time.perf_counter()
    ops, scan = _scan_for(loaded)
    reports = detect_crossings(scan)
    _atomic_write(outdir / "energies.csv", scan.to_csv)
    _atomic_write(outdir / "crossings.csv",
                  lambda tmp: crossings_to_csv(reports, tmp))
    _write_metadata(outdir, "metadata.json", loaded,
                    {"total": time.perf_counter() - t0})
    for flag in scan.flags[:10]:
        print(f"warning: {flag}", file=sys.stderr)
    print(f"{scan.n_points} grid points, {len(reports)} crossings; "
          f"wrote {outdir / 'energies.csv'}, {outdir / 'crossings.csv'}")
    return EXIT_OK


def _cmd_crossings(loaded: LoadedConfig, outdir: Path) -> int:
    t0 = time.perf_counter()
    ops, scan = _scan_for(loaded)
    reports = detect_crossings(scan)
    etas = [
        max_eta_over_pulse(scan, (r.track_i, r.track_j), loaded.run_config.pulse, ops)[0]
        for r in reports
    ]
    _atomic_write(outdir / "crossings.csv",
                  lambda tmp: crossings_to_csv(reports, tmp, etas=etas))
    _write_metadata(outdir, "metadata.json", loaded,
                    {"total": time.perf_counter() - t0})
    print(f"{len(reports)} crossings; wrote {outdir / 'crossings.csv'}")
    return EXIT_OK


def _cmd_sweep(loaded: LoadedConfig, outdir: Path, threads: int) -> int:
    t0 = time.perf_counter()
    configs = loaded.sweep_configs()
    rows = run_sweep(configs, threads=threads)
    _atomic_write(outdir / "sweep.csv", lambda tmp: sweep_to_csv(rows, tmp))
    _write_metadata(outdir, "metadata.json", loaded,
                    {"total": time.perf_counter() - t0})
    failures = [r for r in rows if r.error]
    for r in failures:
        print(f"warning: {r.config_id}: {r.error}", file=sys.stderr)
    print(f"{len(rows)} runs ({len(failures)} failed); wrote {outdir / 'sweep.csv'}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pendular",
        description="Mixed-field rotational dynamics of polar asymmetric tops",
    )
    parser.add_argument("--version", action="version", version=f"pendular {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name, helptext in (
        ("spectrum", "adiabatic intensity scan: energies + crossings CSV"),
        ("propagate", "single pulse propagation: trajectory CSV"),
        ("sweep", "series of runs over tau or Es: summary CSV"),
        ("crossings", "crossing report with max-eta diagnostics"),
        ("validate", "parse and validate a config, run nothing"),
    ):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("-c", "--config", required=True, help="path to the run config file")
        p.add_argument("-o", "--output-dir", default=".", help="directory for output artifacts")
        p.add_argument("--set", action="append", default=[], dest="overrides",
                       metavar="SECTION.KEY=VALUE", help="override a config value")
        p.add_argument("--threads", type=int, default=1,
                       help="worker threads (sweep subcommand)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        outdir = Path(args.output_dir)
        outdir.mkdir(parents=True, exist_ok=True)
        loaded = parse_config(args.config, args.overrides)
        loaded.write_effective(outdir / "effective_config.cfg")
        if args.subcommand == "validate":
            return _cmd_validate(loaded, outdir)
        if args.subcommand == "propagate":
            return _cmd_propagate(loaded, outdir)
        if args.subcommand == "spectrum":
            return _cmd_spectrum(loaded, outdir)
        if args.subcommand == "crossings":
            return _cmd_crossings(loaded, outdir)
        if args.subcommand == "sweep":
            return _cmd_sweep(loaded, outdir, args.threads)
        raise AssertionError(f"unhandled subcommand {args.subcommand}")
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
