"""Problem parameters, critical exponent and the power-law supersolution certificates.

The equation is ``u_t = Lap(u^m) - |x|^sigma u^q`` on R^N with bounded
non-negative data.  Everything here is closed form; no arrays.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple

from .errors import (
    DegenerateCoefficient,
    HypothesisError,
    OutOfDomain,
    ParameterError,
    RegimeError,
)

# relative tolerance used to decide sigma == sigma*
CRITICAL_RTOL = 1e-12


@dataclass(frozen=True)
class ProblemParams:
    m: float
    q: float
    sigma: float
    dim: int = 1

    def __post_init__(self) -> None:
        for name in ("m", "q", "sigma"):
            value = getattr(self, name)
            if not isinstance(value, (int, float)) or not math.isfinite(value):
                raise ParameterError(f"{name} must be a finite real, got {value!r}")
        if self.m < 1:
            raise ParameterError(f"diffusion exponent m must satisfy m >= 1, got m={self.m}")
        if not 0 < self.q < 1:
            raise ParameterError(f"absorption exponent q must satisfy 0 < q < 1, got q={self.q}")
        if self.sigma < 0:
            raise ParameterError(f"weight exponent sigma must be >= 0, got sigma={self.sigma}")
        if isinstance(self.dim, bool) or not isinstance(self.dim, int) or self.dim < 1:
            raise ParameterError(f"dimension must be a positive integer, got {self.dim!r}")

    @property
    def sigma_star(self) -> float:
        return critical_exponent(self)

    @property
    def regime(self) -> Regime:
        return classify_regime(self)


class Regime(enum.Enum):
    SUBCRITICAL = "subcritical"
    CRITICAL = "critical"
    SUPERCRITICAL = "supercritical"
    SEMILINEAR = "semilinear"  # m = 1, sigma* = +inf: always subcritical

    @property
    def always_extinct(self) -> bool:
        return self in (Regime.SUBCRITICAL, Regime.SEMILINEAR)


def critical_exponent(params: ProblemParams) -> float:
    """Return sigma* = 2(1-q)/(m-1), or ``math.inf`` in the semilinear case m = 1."""
    if params.m == 1:
        return math.inf
    return 2.0 * (1.0 - params.q) / (params.m - 1.0)


def classify_regime(params: ProblemParams) -> Regime:
    if params.m == 1:
        return Regime.SEMILINEAR
    sigma_star = critical_exponent(params)
    if math.isclose(params.sigma, sigma_star, rel_tol=CRITICAL_RTOL, abs_tol=0.0):
        return Regime.CRITICAL
    return Regime.SUBCRITICAL if params.sigma < sigma_star else Regime.SUPERCRITICAL


@dataclass(frozen=True)
class SupersolutionSpec:
    """The profile S(x) = A|x|^a considered on the ball B(0, R)."""

    a: float
    A: float
    R: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.a) and self.a > 0):
            raise ParameterError(f"flatness exponent a must be positive, got {self.a}")
        if not (math.isfinite(self.A) and self.A > 0):
            raise ParameterError(f"amplitude A must be positive, got {self.A}")
        if not (math.isfinite(self.R) and self.R > 0):
            raise ParameterError(f"radius R must be positive, got {self.R}")

    def l(self, params: ProblemParams) -> float:
        """Excess exponent a(m-q) - sigma - 2."""
        return self.a * (params.m - params.q) - params.sigma - 2.0

    @property
    def cap(self) -> float:
        """A * R^a, the largest admissible sup norm of the initial datum."""
        return self.A * self.R**self.a


def flatness_threshold(params: ProblemParams) -> float:
    """sigma/(1-q): the flatness exponent a must exceed this."""
    return params.sigma / (1.0 - params.q)


def lemma_threshold(params: ProblemParams) -> float:
    """(sigma+2)/(m-q): smallest a for which A|x|^a can be a supersolution."""
    return (params.sigma + 2.0) / (params.m - params.q)


def require_flatness(spec: SupersolutionSpec, params: ProblemParams) -> None:
    if not spec.a > flatness_threshold(params):
        raise HypothesisError(
            f"flatness exponent a={spec.a} must exceed sigma/(1-q)={flatness_threshold(params)}"
        )


def diffusion_coefficient(a: float, params: ProblemParams) -> float:
    """am(am + N - 2): the radial Laplacian of r^(am) is this times r^(am-2)."""
    am = a * params.m
    coef = am * (am + params.dim - 2)
    if not coef > 0:
        raise DegenerateCoefficient(
            f"a*m*(a*m + N - 2) = {coef} <= 0 for a={a}, m={params.m}, N={params.dim}"
        )
    return coef


def supersolution_value(spec: SupersolutionSpec, r: float) -> float:
    if r < 0:
        raise OutOfDomain(f"radius must be non-negative, got {r}")
    if r == 0:
        return 0.0
    return spec.A * r**spec.a


class Certificate(NamedTuple):
    holds: bool
    margin: float  # rhs - lhs; >= 0 iff the condition holds


def check_supersolution_condition(spec: SupersolutionSpec, params: ProblemParams) -> Certificate:
    """Test A^(m-q) R^(a(m-q)-sigma-2) <= 1/(am(am+N-2)), non-strictly."""
    rhs = 1.0 / diffusion_coefficient(spec.a, params)
    lhs = spec.A ** (params.m - params.q) * spec.R ** spec.l(params)
    return Certificate(lhs <= rhs, rhs - lhs)


def supersolution_residual(spec: SupersolutionSpec, params: ProblemParams, r: float) -> float:
    """Evaluate S_t - Lap(S^m) + |x|^sigma S^q at radius r for S = A|x|^a.

    Written in the factored form ``A^q r^(sigma+aq) [1 - c A^(m-q) r^l]`` so that the
    sign is decided by the bracket.
    """
    if not 0 < r <= spec.R:
        raise OutOfDomain(f"radius {r} outside (0, R={spec.R}]")
    if spec.a < lemma_threshold(params):
        raise HypothesisError(
            f"a={spec.a} below (sigma+2)/(m-q)={lemma_threshold(params)}; "
            "A|x|^a is not a supersolution near the origin"
        )
    m, q, sigma = params.m, params.q, params.sigma
    coef = diffusion_coefficient(spec.a, params)
    bracket = 1.0 - coef * spec.A ** (m - q) * r ** spec.l(params)
    return spec.A**q * r ** (sigma + spec.a * q) * bracket


@dataclass(frozen=True)
class CorollaryConstants:
    K: float
    l: float
    R: float
    M: float
    A0: float
    a: float

    def spec(self) -> SupersolutionSpec:
        return SupersolutionSpec(a=self.a, A=self.A0, R=self.R)


def corollary_constants(a: float, A0: float, params: ProblemParams) -> CorollaryConstants:
    """Explicit (K, l, R, M) such that any u0 <= A0|x|^a with sup u0 <= M goes extinct.

    R is the root of the supersolution condition at equality, rounded down by as
    many ulps as needed for the certificate to hold in binary64.
    """
    if not A0 > 0:
        raise ParameterError(f"A0 must be positive, got {A0}")
    if params.sigma < critical_exponent(params) and classify_regime(params) is not Regime.CRITICAL:
        raise RegimeError(
            f"sigma={params.sigma} below sigma*={critical_exponent(params)}; "
            "extinction is unconditional there"
        )
    if not a > flatness_threshold(params):
        raise HypothesisError(
            f"a={a} must exceed sigma/(1-q)={flatness_threshold(params)}"
        )
    mq = params.m - params.q
    coef = diffusion_coefficient(a, params)
    K = coef ** (1.0 / mq)
    l = a * mq - params.sigma - 2.0
    if not l > 0:
        raise HypothesisError(f"l = a(m-q) - sigma - 2 = {l} is not positive")
    try:
        R = (K * A0) ** (-mq / l)
    except OverflowError:
        R = math.inf
    if not 0.0 < R < math.inf:
        raise HypothesisError(
            f"radius (K A0)^(-(m-q)/l) with l={l} is not representable in binary64; move a away from sigma/(1-q)"
        )
    spec = SupersolutionSpec(a=a, A=A0, R=R)
    while not check_supersolution_condition(spec, params).holds:
        spec = SupersolutionSpec(a=a, A=A0, R=math.nextafter(spec.R, 0.0))
    return CorollaryConstants(K=K, l=l, R=spec.R, M=A0 * spec.R**a, A0=A0, a=a)
