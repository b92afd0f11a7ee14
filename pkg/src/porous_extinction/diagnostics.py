"""Observables along a run: sup norm, mass, support, origin value, comparison margin."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import TYPE_CHECKING, Optional, Sequence

import numpy as np

from .errors import HorizonError
from .model import ProblemParams, SupersolutionSpec

if TYPE_CHECKING:
    from .solver import RadialGrid, State

DEFAULT_THRESHOLD = 1e-12
# comparison tolerance 1e-3 * A R^a at J = 512, halving with each refinement
COMPARISON_RTOL_512 = 1e-3

CSV_COLUMNS = (
    "t",
    "sup_norm",
    "l1_mass",
    "support_radius",
    "origin_value",
    "absorption_flux",
    "comparison_margin",
)


@dataclass(frozen=True)
class DiagnosticsRecord:
    t: float
    sup_norm: float
    l1_mass: float
    support_radius: float
    origin_value: float
    absorption_flux: float
    comparison_margin: Optional[float] = None

    def as_row(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class ExtinctionReport:
    extinct: bool
    t_lower: Optional[float]
    t_upper: Optional[float]
    exact_zero: bool

    def to_json(self) -> dict:
        return {
            "extinct": self.extinct,
            "t_lower": self.t_lower,
            "t_upper": self.t_upper,
            "exact_zero": self.exact_zero,
        }


def comparison_tolerance(spec: SupersolutionSpec, J: int) -> float:
    return COMPARISON_RTOL_512 * spec.cap * 512.0 / J


def comparison_margin(u: np.ndarray, centers: np.ndarray, spec: SupersolutionSpec) -> float:
    """min over cells with r_j <= R of A r_j^a - u_j (inf if no cell lies inside)."""
    inside = centers <= spec.R
    if not np.any(inside):
        return math.inf
    return float(np.min(spec.A * centers[inside] ** spec.a - u[inside]))


def record(
    state: State,
    grid: RadialGrid,
    params: ProblemParams,
    comparison: Optional[SupersolutionSpec] = None,
    threshold: float = DEFAULT_THRESHOLD,
) -> DiagnosticsRecord:
    u = state.u
    r = grid.centers
    w = grid.weights
    above = np.flatnonzero(u > threshold)
    support = float(r[above[-1]]) if above.size else 0.0
    flux = float(np.dot(w, r**params.sigma * u**params.q))
    margin = comparison_margin(u, r, comparison) if comparison is not None else None
    return DiagnosticsRecord(
        t=float(state.t),
        sup_norm=float(u.max()),
        l1_mass=float(np.dot(w, u)),
        support_radius=support,
        origin_value=float(u[0]),
        absorption_flux=flux,
        comparison_margin=margin,
    )


def extinction_time(
    trajectory: Sequence[DiagnosticsRecord], threshold: float = DEFAULT_THRESHOLD
) -> Optional[tuple[float, float]]:
    """Bracket (t_prev, t_first) around the first record with sup below threshold."""
    if not trajectory:
        raise ValueError("empty trajectory")
    for k, rec in enumerate(trajectory):
        if rec.sup_norm < threshold:
            lower = trajectory[k - 1].t if k > 0 else rec.t
            return lower, rec.t
    return None


@dataclass(frozen=True)
class ShrinkingReport:
    radius: float  # R(tau): largest support radius at times >= tau
    localized: bool  # support never exceeded the initial support (+ margin) after tau
    first_radius: float  # support radius at the first record with t >= tau


def shrinking_report(
    trajectory: Sequence[DiagnosticsRecord], tau: float, margin: float = 0.0
) -> ShrinkingReport:
    if not trajectory:
        raise ValueError("empty trajectory")
    if tau > trajectory[-1].t:
        raise HorizonError(f"tau={tau} beyond the last recorded time {trajectory[-1].t}")
    later = [rec for rec in trajectory if rec.t >= tau]
    radius = max(rec.support_radius for rec in later)
    initial = trajectory[0].support_radius
    localized = all(rec.support_radius <= initial + margin for rec in later)
    return ShrinkingReport(radius, localized, later[0].support_radius)
