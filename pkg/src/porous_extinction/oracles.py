"""Closed-form comparison functions and extinction-time upper bounds.

Under the flatness certificate, ``|x|^sigma u^q >= B u^p`` everywhere with
``p = (aq + sigma)/a < 1``, so ``u`` lies below the solution ``v`` of
``v_t - Lap(v^m) + B v^p = 0`` with the same data.  The spatially flat function
solving ``v' = -B v^p`` from ``v(0) = sup u0`` is itself a supersolution of that
equation (its Laplacian vanishes), which gives the explicit bound

    T_e(u) <= (sup u0)^(1-p) / ((1 - p) B).

That last comparison is one step beyond the qualitative statement that ``v``
vanishes in finite time; it is what makes the bound usable as a test oracle.
"""
from __future__ import annotations

from dataclasses import dataclass

from .errors import HypothesisError, ZeroData
from .model import (
    ProblemParams,
    SupersolutionSpec,
    check_supersolution_condition,
    lemma_threshold,
    require_flatness,
)

# sup u0 may exceed A R^a by rounding when the datum is built from the same formula
_CAP_RTOL = 1e-12


@dataclass(frozen=True)
class OdeBound:
    B: float
    p: float
    v0: float
    T_bound: float


def comparison_constant_B(spec: SupersolutionSpec, params: ProblemParams, sup_norm: float) -> float:
    """B = min(A^(-sigma/a), R^sigma * sup^(-sigma/a))."""
    if sup_norm <= 0:
        raise ZeroData("initial datum vanishes; no comparison constant needed")
    e = params.sigma / spec.a
    return min(spec.A ** (-e), spec.R**params.sigma * sup_norm ** (-e))


def flat_ode_solution(v0: float, B: float, p: float, t: float) -> float:
    """Solution of v' = -B v^p, v(0) = v0; identically zero after v0^(1-p)/((1-p)B)."""
    if v0 < 0 or B <= 0 or not 0 < p < 1 or t < 0:
        raise ValueError(f"invalid arguments v0={v0}, B={B}, p={p}, t={t}")
    base = v0 ** (1.0 - p) - (1.0 - p) * B * t
    return max(base, 0.0) ** (1.0 / (1.0 - p))


def flat_extinction_time(v0: float, B: float, p: float) -> float:
    return v0 ** (1.0 - p) / ((1.0 - p) * B)


def extinction_upper_bound(spec: SupersolutionSpec, params: ProblemParams, sup_norm: float) -> OdeBound:
    """Explicit upper bound on the extinction time of u under the flatness certificate.

    For sigma = 0 the weight is identically one and the bound holds with B = 1
    without any condition on (a, A, R).
    """
    p = (spec.a * params.q + params.sigma) / spec.a
    if sup_norm < 0:
        raise ValueError(f"sup norm must be non-negative, got {sup_norm}")
    if params.sigma != 0:
        require_flatness(spec, params)
        if spec.a < lemma_threshold(params):
            raise HypothesisError(
                f"a={spec.a} below (sigma+2)/(m-q)={lemma_threshold(params)}"
            )
        if not check_supersolution_condition(spec, params).holds:
            raise HypothesisError("A^(m-q) R^(a(m-q)-sigma-2) exceeds 1/(am(am+N-2))")
        if sup_norm > spec.cap * (1 + _CAP_RTOL):
            raise HypothesisError(f"sup u0 = {sup_norm} exceeds A R^a = {spec.cap}")
    if sup_norm == 0:
        return OdeBound(B=spec.A ** (-params.sigma / spec.a), p=p, v0=0.0, T_bound=0.0)
    B = comparison_constant_B(spec, params, sup_norm)
    return OdeBound(B=B, p=p, v0=sup_norm, T_bound=flat_extinction_time(sup_norm, B, p))
