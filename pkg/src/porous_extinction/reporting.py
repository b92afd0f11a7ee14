"""Certificate report and file output (trajectory CSV, snapshots, JSON)."""
from __future__ import annotations

import csv
import io
import json
import math
import os
import tempfile
from pathlib import Path
from typing import Any, Iterable, Optional

import numpy as np

from .diagnostics import CSV_COLUMNS, DiagnosticsRecord
from .errors import PorousExtinctionError
from .initial_data import validate_theorem2_hypotheses
from .model import (
    Regime,
    check_supersolution_condition,
    classify_regime,
    corollary_constants,
    critical_exponent,
)
from .oracles import extinction_upper_bound
from .solver import RadialGrid, RunConfig, State


def _num(x: Optional[float]) -> Any:
    """JSON-safe number: infinities become strings."""
    if x is None:
        return None
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return x


def certificate_report(config: RunConfig) -> dict:
    """Regime, supersolution margin, hypothesis verdict, corollary constants and oracle bound."""
    params = config.params
    regime = classify_regime(params)
    report: dict[str, Any] = {
        "problem": {"m": params.m, "q": params.q, "sigma": params.sigma, "dim": params.dim},
        "sigma_star": _num(critical_exponent(params)),
        "regime": regime.value,
        "unconditional_extinction": regime.always_extinct,
        "initial_sup_norm": config.ic.sup_norm,
    }
    spec = config.comparison
    if spec is None:
        return report
    block: dict[str, Any] = {"a": spec.a, "A": spec.A, "R": spec.R, "l": spec.l(params)}
    try:
        cert = check_supersolution_condition(spec, params)
        block.update(condition_holds=cert.holds, margin=cert.margin)
    except PorousExtinctionError as exc:
        block.update(condition_holds=False, error=str(exc))
    report["supersolution"] = block

    verdict = None
    if block.get("condition_holds"):
        verdict = validate_theorem2_hypotheses(config.ic, spec, params, r_max=config.grid.R_max)
        report["hypotheses"] = {"verdict": verdict.kind.value, "radius": verdict.radius}
    else:
        report["hypotheses"] = {"verdict": "not_applicable", "radius": None}

    if regime in (Regime.CRITICAL, Regime.SUPERCRITICAL):
        try:
            cc = corollary_constants(spec.a, spec.A, params)
            report["corollary"] = {
                "K": cc.K, "l": cc.l, "R": cc.R, "M": cc.M,
                "admissible_sup": config.ic.sup_norm <= cc.M,
            }
        except PorousExtinctionError as exc:
            report["corollary"] = {"error": str(exc)}

    report["oracle"] = None
    if verdict is not None and verdict.admissible:
        try:
            bound = extinction_upper_bound(spec, params, config.ic.sup_norm)
            report["oracle"] = {"B": bound.B, "p": bound.p, "v0": bound.v0, "T_bound": bound.T_bound}
        except PorousExtinctionError as exc:
            report["oracle"] = {"error": str(exc)}
    return report


def oracle_bound(config: RunConfig) -> Optional[float]:
    oracle = certificate_report(config).get("oracle")
    if oracle and "T_bound" in oracle:
        return oracle["T_bound"]
    return None


def atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise


def write_json(path: Path, payload: Any) -> None:
    atomic_write(Path(path), json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _fmt(x: Optional[float]) -> str:
    return "" if x is None else repr(float(x))


def trajectory_csv(records: Iterable[DiagnosticsRecord]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for rec in records:
        writer.writerow([_fmt(getattr(rec, col)) for col in CSV_COLUMNS])
    return buf.getvalue()


def write_trajectory(path: Path, records: Iterable[DiagnosticsRecord]) -> None:
    atomic_write(Path(path), trajectory_csv(records))


def snapshot_text(state: State, grid: RadialGrid) -> str:
    """Header lines (t, sup, mass) then one ``r<TAB>u`` row per cell, 17 significant digits."""
    mass = float(np.dot(grid.weights, state.u))
    lines = [f"# t = {state.t:.17g}", f"# sup = {state.sup:.17g}", f"# mass = {mass:.17g}"]
    lines.extend(f"{r:.17g}\t{u:.17g}" for r, u in zip(grid.centers, state.u))
    return "\n".join(lines) + "\n"


def write_snapshot(path: Path, state: State, grid: RadialGrid) -> None:
    atomic_write(Path(path), snapshot_text(state, grid))


def read_snapshot(path: Path) -> tuple[dict[str, float], np.ndarray, np.ndarray]:
    header: dict[str, float] = {}
    rows = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if line.startswith("#"):
            key, _, value = line[1:].partition("=")
            header[key.strip()] = float(value)
        elif line.strip():
            r, u = line.split("\t")
            rows.append((float(r), float(u)))
    arr = np.array(rows, dtype=float).reshape(-1, 2)
    return header, arr[:, 0], arr[:, 1]
