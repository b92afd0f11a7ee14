"""Manufactured solution u*(t, r) = (1 - t)_+ (1 - (r/L)^2)_+^2 and its forcing term."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import ProblemParams


@dataclass(frozen=True)
class ManufacturedBump:
    params: ProblemParams
    L: float  # support radius, taken equal to the domain radius

    def exact(self, t: float, r) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        return max(1.0 - t, 0.0) * self._profile(r)

    def _profile(self, r: np.ndarray) -> np.ndarray:
        return np.maximum(1.0 - (r / self.L) ** 2, 0.0) ** 2

    def laplacian_of_power(self, t: float, r) -> np.ndarray:
        """Radial Laplacian of u*^m, in closed form."""
        r = np.asarray(r, dtype=float)
        m, N, L = self.params.m, self.params.dim, self.L
        k = 2.0 * m
        s = 1.0 - (r / L) ** 2
        inside = s > 0
        s = np.where(inside, s, 0.0)
        lap = 4.0 * k * (k - 1.0) * r**2 / L**4 * s ** (k - 2.0) - 2.0 * k * N / L**2 * s ** (k - 1.0)
        return np.where(inside, max(1.0 - t, 0.0) ** m * lap, 0.0)

    def forcing(self, t: float, r) -> np.ndarray:
        """f = d_t u* - Lap(u*^m) + r^sigma u*^q, so that u* solves the forced equation."""
        r = np.asarray(r, dtype=float)
        dudt = -self._profile(r) if t < 1.0 else np.zeros_like(r)
        absorption = r**self.params.sigma * self.exact(t, r) ** self.params.q
        return dudt - self.laplacian_of_power(t, r) + absorption

    __call__ = forcing
