"""Radial finite-volume solver with Strang splitting.

One step is ``absorption(dt/2) o diffusion(dt) o absorption(dt/2)``.  The
absorption sub-step integrates ``u' = -r^sigma u^q`` exactly per cell, which
produces exact zeros; the diffusion sub-step is an explicit conservative update
of ``Lap(u^m)`` under a CFL bound on the degenerate diffusivity ``m u^(m-1)``.
"""
from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .diagnostics import (
    DiagnosticsRecord,
    ExtinctionReport,
    comparison_tolerance,
    record,
)
from .errors import (
    ComparisonViolation,
    ConfigError,
    InvariantViolation,
    NegativityError,
    StabilityViolation,
)
from . import _kernels
from .initial_data import InitialData
from .model import ProblemParams, SupersolutionSpec

logger = logging.getLogger(__name__)

EPS_EXT_FACTOR = 1e-12
NEGATIVE_RTOL = 1e-15
SUP_STEP_RTOL = 1e-14
MASS_BALANCE_RTOL = 1e-12
MAX_STEPS = 50_000_000


def unit_sphere_area(dim: int) -> float:
    """omega_N = 2 pi^(N/2) / Gamma(N/2); 2, 2 pi, 4 pi for N = 1, 2, 3."""
    return 2.0 * math.pi ** (dim / 2.0) / math.gamma(dim / 2.0)


@dataclass(frozen=True)
class RadialGrid:
    R_max: float
    J: int
    dim: int = 1
    centers: np.ndarray = field(init=False, repr=False, compare=False)
    face_areas: np.ndarray = field(init=False, repr=False, compare=False)
    weights: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if not (math.isfinite(self.R_max) and self.R_max > 0):
            raise ConfigError(f"grid.R_max must be positive, got {self.R_max}")
        if isinstance(self.J, bool) or not isinstance(self.J, int) or self.J < 2:
            raise ConfigError(f"grid.J must be an integer >= 2, got {self.J!r}")
        if isinstance(self.dim, bool) or not isinstance(self.dim, int) or self.dim < 1:
            raise ConfigError(f"dimension must be a positive integer, got {self.dim!r}")
        h = self.h
        N = self.dim
        omega = unit_sphere_area(N)
        faces = np.arange(self.J + 1) * h
        lo, hi = faces[:-1], faces[1:]
        # hi^N - lo^N = h * sum_k hi^k lo^(N-1-k), free of cancellation
        s = sum(hi**k * lo ** (N - 1 - k) for k in range(N))
        weights = omega / N * h * s
        areas = omega * faces ** (N - 1)
        centers = (np.arange(self.J) + 0.5) * h
        for name, arr in (("centers", centers), ("face_areas", areas), ("weights", weights)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def h(self) -> float:
        return self.R_max / self.J

    @property
    def volume(self) -> float:
        return unit_sphere_area(self.dim) * self.R_max**self.dim / self.dim


@dataclass(frozen=True, eq=False)
class State:
    t: float
    u: np.ndarray

    def __post_init__(self) -> None:
        u = np.array(self.u, dtype=float)
        if u.ndim != 1:
            raise ValueError("state must be a one-dimensional array of cell values")
        if not np.all(np.isfinite(u)):
            raise NegativityError("state contains non-finite values")
        if np.any(u < 0):
            j = int(np.argmin(u))
            raise NegativityError(f"negative cell value {u[j]} at index {j}, t={self.t}")
        u.setflags(write=False)
        object.__setattr__(self, "u", u)

    @property
    def sup(self) -> float:
        return float(self.u.max()) if self.u.size else 0.0

    def is_zero(self) -> bool:
        return not np.any(self.u)


class BoundaryCondition(enum.Enum):
    DIRICHLET_ZERO = "dirichlet"
    NEUMANN_ZERO = "neumann"


Forcing = Callable[[float, np.ndarray], np.ndarray]


@dataclass(frozen=True)
class RunConfig:
    params: ProblemParams
    grid: RadialGrid
    ic: InitialData
    t_max: float
    bc: BoundaryCondition = BoundaryCondition.DIRICHLET_ZERO
    cfl: float = 0.4
    eps_ext: Optional[float] = None
    snapshot_every: Optional[float] = None
    forcing: Optional[Forcing] = None
    comparison: Optional[SupersolutionSpec] = None
    comparison_tol: Optional[float] = None
    dt_max: Optional[float] = None
    check_invariants: bool = True

    def __post_init__(self) -> None:
        if self.params.dim != self.grid.dim:
            raise ConfigError(
                f"problem dimension {self.params.dim} differs from grid dimension {self.grid.dim}"
            )
        if not 0 < self.cfl < 1:
            raise ConfigError(f"run.cfl must lie in (0, 1), got {self.cfl}")
        if not (math.isfinite(self.t_max) and self.t_max > 0):
            raise ConfigError(f"run.t_max must be positive, got {self.t_max}")
        if self.eps_ext is not None and not self.eps_ext > 0:
            raise ConfigError(f"run.eps_ext must be positive, got {self.eps_ext}")
        if self.snapshot_every is not None and not self.snapshot_every > 0:
            raise ConfigError(f"run.snapshot_every must be positive, got {self.snapshot_every}")
        if self.dt_max is not None and not self.dt_max > 0:
            raise ConfigError(f"run.dt_max must be positive, got {self.dt_max}")
        support = self.ic.support_radius
        if math.isfinite(support) and support > self.grid.R_max:
            raise ConfigError(
                f"grid.R_max={self.grid.R_max} is smaller than the initial support "
                f"radius {support}"
            )

    @property
    def extinction_threshold(self) -> float:
        if self.eps_ext is not None:
            return self.eps_ext
        return EPS_EXT_FACTOR * max(1.0, self.ic.sup_norm)

    @property
    def cadence(self) -> float:
        return self.snapshot_every if self.snapshot_every is not None else self.t_max / 100.0

    @property
    def comparison_threshold(self) -> Optional[float]:
        if self.comparison is None:
            return None
        if self.comparison_tol is not None:
            return self.comparison_tol
        return comparison_tolerance(self.comparison, self.grid.J)

    def initial_state(self) -> State:
        return State(0.0, np.asarray(self.ic(self.grid.centers), dtype=float))


def absorption_weight(grid: RadialGrid, params: ProblemParams) -> np.ndarray:
    """r_j^sigma at cell centers."""
    return grid.centers**params.sigma


def _absorb(u: np.ndarray, weight: np.ndarray, q: float, tau: float) -> np.ndarray:
    p = 1.0 - q
    return np.maximum(u**p - p * tau * weight, 0.0) ** (1.0 / p)


def absorption_substep(state: State, grid: RadialGrid, params: ProblemParams, tau: float) -> State:
    """Exact flow of u' = -r^sigma u^q over time tau, cell by cell."""
    if tau < 0:
        raise ValueError(f"negative sub-step {tau}")
    if tau == 0:
        return state
    return State(state.t, _absorb(state.u, absorption_weight(grid, params), params.q, tau))


def max_stable_dt(u: np.ndarray, grid: RadialGrid, params: ProblemParams) -> float:
    """h^2 / (2 N D_max): the monotonicity limit of the explicit diffusion update."""
    sup = float(u.max())
    if params.m == 1:
        d_max = 1.0
    else:
        if sup == 0:
            return math.inf
        d_max = params.m * sup ** (params.m - 1)
    return grid.h * grid.h / (2.0 * grid.dim * d_max)


def stable_dt(
    state: State,
    grid: RadialGrid,
    params: ProblemParams,
    cfl: float = 0.4,
    t_max: Optional[float] = None,
) -> float:
    """Largest diffusion step allowed by the CFL factor.

    An identically zero state imposes no constraint; the remaining horizon is
    returned when ``t_max`` is known, else ``inf``.
    """
    if state.is_zero():
        return max(t_max - state.t, 0.0) if t_max is not None else math.inf
    return cfl * max_stable_dt(state.u, grid, params)


def _diffuse(u, grid, m, bc, tau):
    """Return (u_new, outflow) where outflow is the mass leaving through r = R_max."""
    p = u**m if m != 1 else u
    h = grid.h
    flux = np.empty(grid.J + 1)
    flux[0] = 0.0
    flux[1:-1] = grid.face_areas[1:-1] * (p[1:] - p[:-1]) / h
    if bc is BoundaryCondition.DIRICHLET_ZERO:
        flux[-1] = grid.face_areas[-1] * (0.0 - p[-1]) / h
    else:
        flux[-1] = 0.0
    u_new = u + (tau / grid.weights) * (flux[1:] - flux[:-1])
    return u_new, -tau * flux[-1]


def _check_negativity(u: np.ndarray, floor: float, t: float) -> np.ndarray:
    neg = u < 0
    if np.any(neg):
        j = int(np.argmin(u))
        if u[j] < -floor:
            raise NegativityError(f"cell {j} reached {u[j]:.3e} at t={t}")
        u = np.where(neg, 0.0, u)
    return u


def diffusion_substep(state: State, grid: RadialGrid, config: RunConfig, tau: float) -> State:
    """Explicit conservative update of Lap(u^m) on the radial grid."""
    if tau < 0:
        raise ValueError(f"negative sub-step {tau}")
    limit = max_stable_dt(state.u, grid, config.params)
    if tau > limit * (1 + 1e-12):
        raise StabilityViolation(f"dt={tau:.3e} exceeds the diffusion limit {limit:.3e}")
    u_new, _ = _diffuse(state.u, grid, config.params.m, config.bc, tau)
    floor = NEGATIVE_RTOL * config.ic.sup_norm
    return State(state.t, _check_negativity(u_new, floor, state.t))


@dataclass(frozen=True)
class StepLedger:
    """Bookkeeping of one split step, used for the mass balance."""

    tau: float
    absorbed: float  # sum_j w_j * (amount removed by absorption)
    outflow: float  # mass leaving through the outer face
    residual: float  # mass balance defect of the step


def _advance(u, t, tau, grid, config, weight, floor):
    params = config.params
    half = 0.5 * tau
    u1 = _absorb(u, weight, params.q, half)
    u2, outflow = _diffuse(u1, grid, params.m, config.bc, tau)
    if config.forcing is not None:
        u2 = u2 + tau * np.asarray(config.forcing(t + half, grid.centers), dtype=float)
    u2 = _check_negativity(u2, floor, t + tau)
    u3 = _absorb(u2, weight, params.q, half)
    w = grid.weights
    removed = (u - u1) + (u2 - u3)
    absorbed = float(np.dot(w, removed))
    residual = float(np.dot(w, u3 - u + removed)) + outflow
    return u3, StepLedger(tau, absorbed, outflow, residual)


def step(state: State, grid: RadialGrid, config: RunConfig, dt: Optional[float] = None) -> State:
    """One Strang step of length min(stable_dt, dt)."""
    new, _ = _step_with_ledger(state, grid, config, dt)
    return new


def _step_with_ledger(state, grid, config, dt=None):
    tau = stable_dt(state, grid, config.params, config.cfl, t_max=config.t_max)
    if dt is not None:
        tau = min(tau, dt)
    if config.dt_max is not None:
        tau = min(tau, config.dt_max)
    if not math.isfinite(tau):
        raise StabilityViolation("no finite time step; pass dt or set t_max")
    weight = absorption_weight(grid, config.params)
    floor = NEGATIVE_RTOL * config.ic.sup_norm
    u, ledger = _advance(state.u, state.t, tau, grid, config, weight, floor)
    return State(state.t + tau, u), ledger


@dataclass
class RunResult:
    trajectory: list[DiagnosticsRecord]
    final: State
    extinction: ExtinctionReport
    snapshots: list[State]
    steps: int
    max_mass_residual: float = 0.0


class _Monitor:
    """Per-step invariant checks: sup bound and mass balance."""

    def __init__(self, config: RunConfig, state: State) -> None:
        self.enabled = config.check_invariants and config.forcing is None
        self.sup0 = state.sup
        self.mass0 = float(np.dot(config.grid.weights, state.u))
        self.max_residual = 0.0

    def check(self, old: State, new: State, ledger: StepLedger) -> None:
        if not self.enabled:
            return
        s_old, s_new = old.sup, new.sup
        if s_new > s_old * (1 + SUP_STEP_RTOL) or s_new > self.sup0 * (1 + 1e-12):
            raise InvariantViolation(
                f"sup norm increased from {s_old!r} to {s_new!r} at t={new.t}"
            )
        res = abs(ledger.residual)
        self.max_residual = max(self.max_residual, res)
        if res > MASS_BALANCE_RTOL * self.mass0:
            raise InvariantViolation(
                f"mass balance residual {res:.3e} exceeds {MASS_BALANCE_RTOL} * M(0) at t={new.t}"
            )


def run(config: RunConfig, engine: str = "auto") -> RunResult:
    """March from the initial datum until t_max or numerical extinction.

    ``engine`` is ``"compiled"`` (numba loop), ``"numpy"`` (reference path, also
    used whenever a forcing term is configured) or ``"auto"``.
    """
    if engine not in ("auto", "compiled", "numpy"):
        raise ValueError(f"unknown engine {engine!r}")
    if engine == "auto":
        engine = "numpy" if config.forcing is not None else "compiled"
    if engine == "compiled" and config.forcing is not None:
        raise ValueError("the compiled engine does not support forcing terms")

    grid, params = config.grid, config.params
    eps = config.extinction_threshold
    cmp_tol = config.comparison_threshold
    cadence = config.cadence
    state = config.initial_state()
    monitor = _Monitor(config, state)
    weight = absorption_weight(grid, params)
    floor = NEGATIVE_RTOL * config.ic.sup_norm

    trajectory: list[DiagnosticsRecord] = []
    snapshots: list[State] = []
    warned = False

    def snap(s: State) -> None:
        nonlocal warned
        rec = record(s, grid, params, config.comparison, threshold=eps)
        trajectory.append(rec)
        snapshots.append(s)
        if cmp_tol is not None and rec.comparison_margin < -cmp_tol:
            raise ComparisonViolation(
                f"u exceeds A r^a by {-rec.comparison_margin:.3e} (> {cmp_tol:.3e}) at t={s.t}"
            )
        if not warned and rec.support_radius > grid.R_max - 5 * grid.h:
            warned = True
            logger.warning(
                "support radius %.4g within 5 cells of R_max=%g at t=%.4g; truncation may matter",
                rec.support_radius, grid.R_max, s.t,
            )

    def extinct(prev: State, new: State) -> ExtinctionReport:
        if trajectory[-1].t != prev.t:
            snap(prev)
        snap(new)
        return ExtinctionReport(True, prev.t, new.t, new.is_zero())

    snap(state)
    if state.sup < eps:
        report = ExtinctionReport(True, 0.0, 0.0, state.is_zero())
        return RunResult(trajectory, state, report, snapshots, 0)

    k_next = 1
    steps = 0
    report = ExtinctionReport(False, None, None, False)
    while state.t < config.t_max:
        target = min(k_next * cadence, config.t_max)
        if engine == "compiled":
            u = np.array(state.u)
            u_prev = np.empty_like(u)
            status, t, n, t_prev, max_res, info = _kernels.march(
                u, u_prev, state.t, target, config.cfl,
                config.dt_max if config.dt_max is not None else -1.0,
                grid.h, grid.dim, grid.face_areas, grid.weights, weight,
                float(params.m), float(params.q),
                config.bc is BoundaryCondition.DIRICHLET_ZERO,
                eps, floor, monitor.enabled, monitor.sup0, monitor.mass0,
                SUP_STEP_RTOL, MASS_BALANCE_RTOL, MAX_STEPS - steps,
            )
            steps += n
            monitor.max_residual = max(monitor.max_residual, max_res)
            _raise_for_status(status, t, info, monitor.mass0)
            if status == _kernels.EXTINCT:
                new = State(t, u)
                report = extinct(State(t_prev, u_prev), new)
                state = new
                break
            state = State(t, u)
        else:
            extinct_now = False
            while state.t < target:
                if steps >= MAX_STEPS:
                    raise StabilityViolation(f"step budget {MAX_STEPS} exhausted at t={state.t}")
                tau = config.cfl * max_stable_dt(state.u, grid, params)
                if config.dt_max is not None:
                    tau = min(tau, config.dt_max)
                hit = tau >= target - state.t
                if hit:
                    tau = target - state.t
                u, ledger = _advance(state.u, state.t, tau, grid, config, weight, floor)
                new = State(target if hit else state.t + tau, u)
                monitor.check(state, new, ledger)
                steps += 1
                if new.sup < eps:
                    report = extinct(state, new)
                    state = new
                    extinct_now = True
                    break
                state = new
            if extinct_now:
                break
        snap(state)
        k_next += 1
    return RunResult(trajectory, state, report, snapshots, steps, monitor.max_residual)


def _raise_for_status(status: int, t: float, info: float, mass0: float) -> None:
    if status == _kernels.NEGATIVE:
        raise NegativityError(f"a cell reached {info:.3e} at t={t}")
    if status == _kernels.SUP_INCREASE:
        raise InvariantViolation(f"sup norm increased to {info!r} at t={t}")
    if status == _kernels.MASS_DEFECT:
        raise InvariantViolation(
            f"mass balance residual {info:.3e} exceeds {MASS_BALANCE_RTOL} * M(0)={mass0:.3e} at t={t}"
        )
    if status == _kernels.BUDGET:
        raise StabilityViolation(f"step budget {MAX_STEPS} exhausted at t={t}")
