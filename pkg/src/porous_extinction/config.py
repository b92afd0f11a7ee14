"""JSON run configuration: sections problem / grid / ic / run / comparison.

Example::

    {
      "problem": {"m": 2, "q": 0.5, "sigma": 2, "dim": 1},
      "grid": {"R_max": 1.0, "J": 512},
      "ic": {"kind": "power_cap", "a": 5, "A": 1, "R": "corollary"},
      "run": {"t_max": 50, "bc": "dirichlet", "snapshot_every": 0.05},
      "comparison": {"a": 5, "A": 1, "R": "corollary"}
    }

``"R": "corollary"`` resolves R to the explicit radius for which A|x|^a is a
supersolution at equality.  ``"forcing": "manufactured"`` in the run section
switches to the manufactured-solution test problem (the ic section may then be
omitted).
"""
from __future__ import annotations

import copy
import json
from pathlib import Path
from typing import Any, Mapping, Union

from . import initial_data
from .errors import ConfigError, PorousExtinctionError
from .manufactured import ManufacturedBump
from .model import ProblemParams, SupersolutionSpec, corollary_constants
from .solver import BoundaryCondition, RadialGrid, RunConfig

SECTIONS = ("problem", "grid", "ic", "run", "comparison")
_RUN_FIELDS = {"t_max", "bc", "cfl", "eps_ext", "snapshot_every", "dt_max", "forcing", "check_invariants"}


def read_json(path: Union[str, Path]) -> dict:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read: {exc.strerror}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be a JSON object")
    return data


def load_config(path: Union[str, Path]) -> RunConfig:
    path = Path(path)
    return build_config(read_json(path), base_dir=path.parent)


def _section(doc: Mapping[str, Any], name: str, required: bool = True) -> dict:
    sec = doc.get(name)
    if sec is None:
        if required:
            raise ConfigError(f"{name}: missing section")
        return {}
    if not isinstance(sec, dict):
        raise ConfigError(f"{name}: must be an object")
    return dict(sec)


def _number(sec: Mapping[str, Any], key: str, where: str, default: Any = ...) -> Any:
    if key not in sec or sec[key] is None:
        if default is ...:
            raise ConfigError(f"{where}.{key}: missing")
        return default
    value = sec[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{where}.{key}: expected a number, got {value!r}")
    return value


def _resolve_radius(sec: Mapping[str, Any], a: float, A: float, params: ProblemParams, where: str) -> float:
    R = sec.get("R")
    if R == "corollary":
        try:
            return corollary_constants(a, A, params).R
        except PorousExtinctionError as exc:
            raise ConfigError(f"{where}.R: cannot use the corollary radius: {exc}") from exc
    return _number(sec, "R", where)


def build_config(doc: Mapping[str, Any], base_dir: Union[str, Path, None] = None) -> RunConfig:
    unknown = set(doc) - set(SECTIONS)
    if unknown:
        raise ConfigError(f"{sorted(unknown)[0]}: unknown section")
    problem = _section(doc, "problem")
    try:
        params = ProblemParams(
            m=_number(problem, "m", "problem"),
            q=_number(problem, "q", "problem"),
            sigma=_number(problem, "sigma", "problem"),
            dim=problem.get("dim", 1),
        )
    except ConfigError:
        raise
    except PorousExtinctionError as exc:
        raise ConfigError(f"problem: {exc} (admissible range: m >= 1, 0 < q < 1, sigma >= 0)") from exc

    grid_sec = _section(doc, "grid")
    J = grid_sec.get("J")
    if isinstance(J, float) and J.is_integer():
        J = int(J)
    grid = RadialGrid(R_max=float(_number(grid_sec, "R_max", "grid")), J=J, dim=params.dim)

    run_sec = _section(doc, "run")
    extra = set(run_sec) - _RUN_FIELDS
    if extra:
        raise ConfigError(f"run.{sorted(extra)[0]}: unknown field")
    forcing = None
    if run_sec.get("forcing") is not None:
        if run_sec["forcing"] != "manufactured":
            raise ConfigError(f"run.forcing: unknown forcing {run_sec['forcing']!r}")
        forcing = ManufacturedBump(params, grid.R_max)

    ic_sec = _section(doc, "ic", required=forcing is None)
    if forcing is not None and not ic_sec:
        ic = initial_data.CompactBump(1.0, grid.R_max)
    else:
        if ic_sec.get("kind") == "power_cap":
            ic_sec["R"] = _resolve_radius(
                ic_sec, _number(ic_sec, "a", "ic"), _number(ic_sec, "A", "ic"), params, "ic"
            )
        ic = initial_data.from_dict(ic_sec, base_dir=base_dir)

    comparison = None
    cmp_sec = _section(doc, "comparison", required=False)
    if cmp_sec:
        a = _number(cmp_sec, "a", "comparison")
        A = _number(cmp_sec, "A", "comparison")
        try:
            comparison = SupersolutionSpec(a=a, A=A, R=_resolve_radius(cmp_sec, a, A, params, "comparison"))
        except ConfigError:
            raise
        except PorousExtinctionError as exc:
            raise ConfigError(f"comparison: {exc}") from exc

    bc_name = run_sec.get("bc", "dirichlet")
    try:
        bc = BoundaryCondition(bc_name)
    except ValueError:
        raise ConfigError(f"run.bc: expected 'dirichlet' or 'neumann', got {bc_name!r}") from None

    return RunConfig(
        params=params,
        grid=grid,
        ic=ic,
        t_max=float(_number(run_sec, "t_max", "run")),
        bc=bc,
        cfl=float(_number(run_sec, "cfl", "run", 0.4)),
        eps_ext=_number(run_sec, "eps_ext", "run", None),
        snapshot_every=_number(run_sec, "snapshot_every", "run", None),
        forcing=forcing,
        comparison=comparison,
        dt_max=_number(run_sec, "dt_max", "run", None),
        check_invariants=bool(run_sec.get("check_invariants", True)),
    )


SWEEPABLE = ("sigma", "q", "m", "A", "R_max", "J")


def with_value(doc: Mapping[str, Any], parameter: str, value: Any) -> dict:
    """Copy of a config document with one parameter replaced."""
    if parameter not in SWEEPABLE:
        raise ConfigError(f"parameter: cannot sweep {parameter!r}; choose one of {', '.join(SWEEPABLE)}")
    doc = copy.deepcopy(dict(doc))
    if parameter in ("sigma", "q", "m"):
        doc.setdefault("problem", {})[parameter] = value
    elif parameter in ("R_max", "J"):
        doc.setdefault("grid", {})[parameter] = value
    else:
        touched = False
        for name in ("comparison", "ic"):
            sec = doc.get(name)
            if isinstance(sec, dict) and (name == "comparison" or sec.get("kind") == "power_cap"):
                sec["A"] = value
                touched = True
        if not touched:
            raise ConfigError("parameter: sweeping A needs a comparison section or a power_cap ic")
    return doc
