"""Finite-time extinction for u_t = Lap(u^m) - |x|^sigma u^q: radial solver and certificates."""
from .model import (
    CorollaryConstants,
    ProblemParams,
    Regime,
    SupersolutionSpec,
    check_supersolution_condition,
    classify_regime,
    corollary_constants,
    critical_exponent,
    supersolution_residual,
    supersolution_value,
)
from .oracles import (
    OdeBound,
    comparison_constant_B,
    extinction_upper_bound,
    flat_ode_solution,
)
from .solver import (
    BoundaryCondition,
    RadialGrid,
    RunConfig,
    RunResult,
    State,
    absorption_substep,
    diffusion_substep,
    run,
    stable_dt,
    step,
)

__version__ = "0.1.0"

__all__ = [
    "BoundaryCondition",
    "CorollaryConstants",
    "OdeBound",
    "ProblemParams",
    "RadialGrid",
    "Regime",
    "RunConfig",
    "RunResult",
    "State",
    "SupersolutionSpec",
    "absorption_substep",
    "check_supersolution_condition",
    "classify_regime",
    "comparison_constant_B",
    "corollary_constants",
    "critical_exponent",
    "diffusion_substep",
    "extinction_upper_bound",
    "flat_ode_solution",
    "run",
    "stable_dt",
    "step",
    "supersolution_residual",
    "supersolution_value",
]
