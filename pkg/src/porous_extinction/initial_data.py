"""Radial initial data and the admissibility checks of the extinction certificate."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Any, Mapping, Union

import numpy as np

from .errors import ConfigError, HypothesisError
from .model import (
    ProblemParams,
    SupersolutionSpec,
    check_supersolution_condition,
    corollary_constants,
)

DEFAULT_SAMPLES = 4096
# slack for comparing a profile against A r^a evaluated by the same formula
_ROUNDING_RTOL = 4 * np.finfo(float).eps


@dataclass(frozen=True)
class PowerCap:
    """min(A r^a, A R^a): the largest profile satisfying both flatness and sup bound."""

    a: float
    A: float
    R: float

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        return self.A * np.minimum(r, self.R) ** self.a

    @property
    def sup_norm(self) -> float:
        return self.A * self.R**self.a

    @property
    def support_radius(self) -> float:
        return math.inf

    def scaled(self, lam: float) -> PowerCap:
        return replace(self, A=lam * self.A)


@dataclass(frozen=True)
class FlatConstant:
    c: float

    def __call__(self, r):
        return np.full(np.shape(r), float(self.c))

    @property
    def sup_norm(self) -> float:
        return float(self.c)

    @property
    def support_radius(self) -> float:
        return math.inf if self.c > 0 else 0.0

    def scaled(self, lam: float) -> FlatConstant:
        return FlatConstant(lam * self.c)


@dataclass(frozen=True)
class GaussianBump:
    height: float
    width: float
    center: float = 0.0

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        return self.height * np.exp(-(((r - self.center) / self.width) ** 2))

    @property
    def sup_norm(self) -> float:
        return float(self.height)

    @property
    def support_radius(self) -> float:
        return math.inf

    def scaled(self, lam: float) -> GaussianBump:
        return replace(self, height=lam * self.height)


@dataclass(frozen=True)
class AnnulusBump:
    """height * (1 - ((r - c)/w)^2)_+^2 with c, w the midpoint and half-width of [inner, outer]."""

    height: float
    inner: float
    outer: float

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        c = 0.5 * (self.inner + self.outer)
        w = 0.5 * (self.outer - self.inner)
        return self.height * np.maximum(1.0 - ((r - c) / w) ** 2, 0.0) ** 2

    @property
    def sup_norm(self) -> float:
        return float(self.height)

    @property
    def support_radius(self) -> float:
        return float(self.outer)

    def scaled(self, lam: float) -> AnnulusBump:
        return replace(self, height=lam * self.height)


@dataclass(frozen=True)
class CompactBump:
    """height * (1 - (r/radius)^2)_+^2, positive at the origin."""

    height: float
    radius: float

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        return self.height * np.maximum(1.0 - (r / self.radius) ** 2, 0.0) ** 2

    @property
    def sup_norm(self) -> float:
        return float(self.height)

    @property
    def support_radius(self) -> float:
        return float(self.radius)

    def scaled(self, lam: float) -> CompactBump:
        return replace(self, height=lam * self.height)


@dataclass(frozen=True, eq=False)
class Table:
    """Piecewise-linear interpolation of sampled (radius, value) pairs, zero past the last radius."""

    radii: np.ndarray
    values: np.ndarray

    def __post_init__(self) -> None:
        radii = np.asarray(self.radii, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if radii.ndim != 1 or radii.shape != values.shape or radii.size < 1:
            raise ConfigError("table needs matching one-dimensional radius and value columns")
        if radii[0] < 0 or np.any(np.diff(radii) <= 0):
            raise ConfigError("table radii must be non-negative and strictly increasing")
        if not np.all(np.isfinite(values)) or np.any(values < 0):
            raise ConfigError("table values must be finite and non-negative")
        object.__setattr__(self, "radii", radii)
        object.__setattr__(self, "values", values)

    def __call__(self, r):
        return np.interp(np.asarray(r, dtype=float), self.radii, self.values, right=0.0)

    @property
    def sup_norm(self) -> float:
        return float(self.values.max())

    @property
    def support_radius(self) -> float:
        nz = np.flatnonzero(self.values)
        if nz.size == 0:
            return 0.0
        last = nz[-1]
        # linear interpolation reaches zero at the next sample, or right at the end
        return float(self.radii[min(last + 1, self.radii.size - 1)])

    def scaled(self, lam: float) -> Table:
        return Table(self.radii, lam * self.values)

    @classmethod
    def load(cls, path: Union[str, Path]) -> Table:
        try:
            data = np.loadtxt(path, ndmin=2)
        except (OSError, ValueError) as exc:
            raise ConfigError(f"cannot read table {path}: {exc}") from exc
        if data.shape[1] != 2:
            raise ConfigError(f"table {path} must have exactly two columns, found {data.shape[1]}")
        return cls(data[:, 0], data[:, 1])


InitialData = Union[PowerCap, FlatConstant, GaussianBump, AnnulusBump, CompactBump, Table]

_KINDS = {
    "power_cap": (PowerCap, ("a", "A", "R")),
    "flat": (FlatConstant, ("c",)),
    "gaussian": (GaussianBump, ("height", "width", "center")),
    "annulus": (AnnulusBump, ("height", "inner", "outer")),
    "compact_bump": (CompactBump, ("height", "radius")),
}


def from_dict(d: Mapping[str, Any], base_dir: Union[str, Path, None] = None) -> InitialData:
    """Build initial data from its config section, e.g. ``{"kind": "flat", "c": 1.0}``."""
    d = dict(d)
    kind = d.pop("kind", None)
    if kind == "table":
        path = Path(d.pop("path", ""))
        if base_dir is not None and not path.is_absolute():
            path = Path(base_dir) / path
        data = Table.load(path)
    elif kind in _KINDS:
        cls, fields = _KINDS[kind]
        unknown = set(d) - set(fields)
        if unknown:
            raise ConfigError(f"ic.{sorted(unknown)[0]}: unknown field for kind {kind!r}")
        try:
            kwargs = {k: float(v) for k, v in d.items()}
            data = cls(**kwargs)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"ic: invalid parameters for kind {kind!r}: {exc}") from exc
    else:
        raise ConfigError(f"ic.kind: unknown initial data kind {kind!r}")
    _check_profile(data)
    return data


def _check_profile(data: InitialData) -> None:
    if not (math.isfinite(data.sup_norm) and data.sup_norm >= 0):
        raise ConfigError(f"initial data must be bounded and non-negative, sup={data.sup_norm}")
    if isinstance(data, PowerCap) and not (data.a > 0 and data.A >= 0 and data.R > 0):
        raise ConfigError("power_cap needs a > 0, A >= 0, R > 0")
    if isinstance(data, GaussianBump) and not data.width > 0:
        raise ConfigError("gaussian width must be positive")
    if isinstance(data, AnnulusBump) and not 0 <= data.inner < data.outer:
        raise ConfigError("annulus radii must satisfy 0 <= inner < outer")
    if isinstance(data, CompactBump) and not data.radius > 0:
        raise ConfigError("compact_bump radius must be positive")
    if isinstance(data, FlatConstant) and data.c < 0:
        raise ConfigError("flat value must be non-negative")
    if getattr(data, "height", 0.0) < 0:
        raise ConfigError("bump height must be non-negative")


def evaluate(data: InitialData, r):
    """u0 at radius r (scalar or array)."""
    out = data(r)
    return float(out) if np.ndim(out) == 0 else out


class VerdictKind(enum.Enum):
    ADMISSIBLE = "admissible"
    VIOLATES_FLATNESS = "violates_flatness"
    VIOLATES_SUP_BOUND = "violates_sup_bound"


@dataclass(frozen=True)
class Verdict:
    kind: VerdictKind
    radius: float | None = None  # first radius where flatness fails

    @property
    def admissible(self) -> bool:
        return self.kind is VerdictKind.ADMISSIBLE


def sample_radii(R: float, n: int) -> np.ndarray:
    """Half log-spaced toward 0 (where flatness binds), half uniform on [0, R]."""
    n_log = n // 2
    radii = np.concatenate(
        ([0.0], np.geomspace(R * 1e-8, R, n_log), np.linspace(0.0, R, n - n_log))
    )
    return np.unique(radii)


def validate_theorem2_hypotheses(
    data: InitialData,
    spec: SupersolutionSpec,
    params: ProblemParams,
    samples: int = DEFAULT_SAMPLES,
    r_max: float | None = None,
) -> Verdict:
    """Check u0 <= A r^a on B(0, R) and sup u0 <= A R^a by sampling.

    ``r_max`` restricts the sup-norm scan to a truncated domain.
    """
    if samples < 2:
        raise ValueError("need at least two samples")
    if not check_supersolution_condition(spec, params).holds:
        raise HypothesisError("supersolution condition fails for the given (a, A, R)")
    cap = spec.cap
    sup = _sup_on(data, r_max, samples)
    if sup > cap * (1 + _ROUNDING_RTOL):
        return Verdict(VerdictKind.VIOLATES_SUP_BOUND)
    r = sample_radii(spec.R, samples)
    u0 = data(r)
    bound = spec.A * r**spec.a
    bad = np.flatnonzero(u0 > bound * (1 + _ROUNDING_RTOL))
    if bad.size:
        return Verdict(VerdictKind.VIOLATES_FLATNESS, float(r[bad[0]]))
    return Verdict(VerdictKind.ADMISSIBLE)


def _sup_on(data: InitialData, r_max: float | None, samples: int) -> float:
    if r_max is None or isinstance(data, (FlatConstant, Table)):
        return data.sup_norm
    if isinstance(data, PowerCap):
        return float(data(r_max))
    r = np.linspace(0.0, r_max, max(samples, 2))
    return float(max(data(r).max(), data.sup_norm if _peak_inside(data, r_max) else 0.0))


def _peak_inside(data: InitialData, r_max: float) -> bool:
    if isinstance(data, GaussianBump):
        return data.center <= r_max
    if isinstance(data, AnnulusBump):
        return 0.5 * (data.inner + data.outer) <= r_max
    return True


def corollary2_admissible(a: float, A0: float, params: ProblemParams, sup_norm: float) -> bool:
    """True iff sup u0 <= M; the caller attests u0 <= A0 |x|^a globally."""
    return sup_norm <= corollary_constants(a, A0, params).M
