"""Command line driver: ``run``, ``sweep``, ``certify`` and ``oracle`` subcommands.

Exit codes: 0 success, 1 configuration error, 2 solver abort.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from pathlib import Path
from typing import Any, Optional, Sequence

import numpy as np

from .config import build_config, load_config, read_json, with_value
from .errors import ConfigError, PorousExtinctionError, SolverAbort
from .manufactured import ManufacturedBump
from .reporting import (
    atomic_write,
    certificate_report,
    oracle_bound,
    write_json,
    write_snapshot,
    write_trajectory,
)
from .solver import RunConfig, RunResult, run

logger = logging.getLogger("porous_extinction")

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_ABORT = 2

SUMMARY_COLUMNS = (
    "value", "extinct", "t_lower", "t_upper", "T_bound", "final_support_radius", "linf_error", "error",
)


def _apply_snapshots(config: RunConfig, snapshots: Optional[int]) -> RunConfig:
    if snapshots is None:
        return config
    if snapshots < 1:
        raise ConfigError("--snapshots must be a positive integer")
    return replace(config, snapshot_every=config.t_max / snapshots)


def _manufactured_error(config: RunConfig, result: RunResult) -> Optional[float]:
    if not isinstance(config.forcing, ManufacturedBump):
        return None
    exact = config.forcing.exact(result.final.t, config.grid.centers)
    return float(np.max(np.abs(result.final.u - exact)))


def write_outputs(out: Path, config: RunConfig, result: RunResult, certificate: dict) -> None:
    write_trajectory(out / "trajectory.csv", result.trajectory)
    for k, state in enumerate(result.snapshots):
        write_snapshot(out / "snapshots" / f"snapshot_{k:05d}.txt", state, config.grid)
    extinction = result.extinction.to_json()
    error = _manufactured_error(config, result)
    if error is not None:
        extinction["linf_error"] = error
    write_json(out / "extinction.json", extinction)
    min_margin = None
    margins = [r.comparison_margin for r in result.trajectory if r.comparison_margin is not None]
    if margins:
        min_margin = min(margins)
    certificate = dict(certificate, run={"steps": result.steps, "min_comparison_margin": min_margin})
    write_json(out / "certificate.json", certificate)


def run_single(config_path: str, out: str, quiet: bool = False, snapshots: Optional[int] = None) -> int:
    try:
        config = _apply_snapshots(load_config(config_path), snapshots)
        certificate = certificate_report(config)
    except PorousExtinctionError as exc:
        print(f"config error: {config_path}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        result = run(config)
    except SolverAbort as exc:
        print(f"solver abort: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ABORT
    write_outputs(Path(out), config, result, certificate)
    if not quiet:
        rep = result.extinction
        status = f"extinct in [{rep.t_lower:.6g}, {rep.t_upper:.6g}]" if rep.extinct else "not extinct"
        print(f"{status} after {result.steps} steps; regime {certificate['regime']}; outputs in {out}")
    return EXIT_OK


def _sweep_row(doc: dict, parameter: str, value: Any, base_dir: Optional[str]) -> dict:
    row: dict[str, Any] = {col: None for col in SUMMARY_COLUMNS}
    row["value"] = value
    try:
        config = build_config(with_value(doc, parameter, value), base_dir=base_dir)
        result = run(config)
    except PorousExtinctionError as exc:
        row["error"] = f"{type(exc).__name__}: {exc}"
        return row
    rep = result.extinction
    row.update(
        extinct=rep.extinct,
        t_lower=rep.t_lower,
        t_upper=rep.t_upper,
        T_bound=oracle_bound(config),
        final_support_radius=result.trajectory[-1].support_radius,
        linf_error=_manufactured_error(config, result),
    )
    return row


def _summary_csv(rows: Sequence[dict]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SUMMARY_COLUMNS)
    for row in rows:
        out = []
        for col in SUMMARY_COLUMNS:
            v = row[col]
            if v is None:
                out.append("")
            elif isinstance(v, bool):
                out.append("true" if v else "false")
            elif isinstance(v, float):
                out.append(repr(v))
            else:
                out.append(str(v))
        writer.writerow(out)
    return buf.getvalue()


def run_sweep(sweep_path: str, out: Optional[str] = None, quiet: bool = False, workers: Optional[int] = None) -> int:
    """One summary row per swept value; rows sorted by value."""
    try:
        sweep = read_json(sweep_path)
        base = sweep.get("base")
        base_dir = str(Path(sweep_path).parent)
        if isinstance(base, str):
            base_path = Path(base_dir) / base
            base = read_json(base_path)
            base_dir = str(base_path.parent)
        if not isinstance(base, dict):
            raise ConfigError("base: expected a config object or a path to one")
        parameter = sweep.get("parameter")
        values = sweep.get("values")
        if not isinstance(values, list) or not values:
            raise ConfigError("values: expected a non-empty list")
        for v in values:
            build_config(with_value(base, parameter, v), base_dir=base_dir)
        out_dir = Path(out or sweep.get("out") or "sweep_out")
    except PorousExtinctionError as exc:
        print(f"config error: {sweep_path}: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    values = sorted(values)
    n_workers = workers if workers is not None else min(len(values), os.cpu_count() or 1)
    if n_workers > 1:
        with ProcessPoolExecutor(max_workers=n_workers) as pool:
            rows = list(pool.map(_sweep_row, [base] * len(values), [parameter] * len(values),
                                 values, [base_dir] * len(values)))
    else:
        rows = [_sweep_row(base, parameter, v, base_dir) for v in values]
    atomic_write(out_dir / "summary.csv", _summary_csv(rows))
    failed = [r for r in rows if r["error"]]
    if not quiet:
        for r in rows:
            print(f"{parameter}={r['value']}: " + (r["error"] or ("extinct" if r["extinct"] else "not extinct")))
    return EXIT_ABORT if failed else EXIT_OK


def certify(config_path: str, out: Optional[str] = None, quiet: bool = False) -> int:
    try:
        report = certificate_report(load_config(config_path))
    except PorousExtinctionError as exc:
        print(f"config error: {config_path}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if out:
        write_json(Path(out) / "certificate.json", report)
    if not quiet:
        print(json.dumps(report, indent=2, sort_keys=True))
    return EXIT_OK


def oracle(config_path: str, quiet: bool = False) -> int:
    try:
        report = certificate_report(load_config(config_path))
    except PorousExtinctionError as exc:
        print(f"config error: {config_path}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    bound = report.get("oracle")
    if not bound or "T_bound" not in bound:
        reason = (bound or {}).get("error", "flatness certificate not satisfied or no comparison section")
        print(f"no extinction-time bound: {reason}", file=sys.stderr)
        return EXIT_CONFIG
    print(repr(bound["T_bound"]) if quiet else f"T_bound = {bound['T_bound']!r} (B={bound['B']!r}, p={bound['p']!r})")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="porous-extinction",
        description="Porous medium equation with inhomogeneous strong absorption: runs and certificates.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="simulate one configuration")
    p_run.add_argument("config")
    p_run.add_argument("--out", default="run_out")
    p_run.add_argument("--snapshots", type=int, default=None, help="number of snapshots over the horizon")
    p_run.add_argument("--quiet", action="store_true")

    p_sweep = sub.add_parser("sweep", help="run a parameter sweep")
    p_sweep.add_argument("sweep")
    p_sweep.add_argument("--out", default=None)
    p_sweep.add_argument("--workers", type=int, default=None)
    p_sweep.add_argument("--quiet", action="store_true")

    p_cert = sub.add_parser("certify", help="print certificates without simulating")
    p_cert.add_argument("config")
    p_cert.add_argument("--out", default=None)
    p_cert.add_argument("--quiet", action="store_true")

    p_or = sub.add_parser("oracle", help="print the extinction-time upper bound")
    p_or.add_argument("config")
    p_or.add_argument("--quiet", action="store_true")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.ERROR if args.quiet else logging.WARNING, format="%(levelname)s: %(message)s")
    if args.command == "run":
        return run_single(args.config, args.out, args.quiet, args.snapshots)
    if args.command == "sweep":
        return run_sweep(args.sweep, args.out, args.quiet, args.workers)
    if args.command == "certify":
        return certify(args.config, args.out, args.quiet)
    return oracle(args.config, args.quiet)


if __name__ == "__main__":
    sys.exit(main())
