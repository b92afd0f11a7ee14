"""Compiled marching loop mirroring ``solver._advance`` operation by operation.

The arithmetic order matches the numpy reference so both engines produce the
same states; only the ledger sums are accumulated differently.
"""
from __future__ import annotations

import math

import numpy as np
from numba import njit

REACHED = 0
EXTINCT = 1
NEGATIVE = 2
SUP_INCREASE = 3
MASS_DEFECT = 4
BUDGET = 5


@njit(cache=True)
def _pow(x, e):
    # same special cases as numpy's scalar-exponent fast path
    if e == 1.0:
        return x
    if e == 2.0:
        return x * x
    if e == 0.5:
        return math.sqrt(x)
    return x**e


@njit(cache=True)
def march(
    u, u_prev, t, t_target, cfl, dt_max, h, dim, face_areas, weights, wabs,
    m, q, dirichlet, eps, floor, check, sup0, mass0, sup_rtol, mass_rtol, max_steps,
):
    """Advance ``u`` in place until ``t_target`` or extinction.

    Returns (status, t, steps, t_prev, max_residual, info).  On extinction the
    state before the last step is left in ``u_prev``.
    """
    J = u.shape[0]
    p = 1.0 - q
    inv_p = 1.0 / p
    u1 = np.zeros(J)
    u2 = np.zeros(J)
    u3 = np.zeros(J)
    P = np.zeros(J)
    F = np.zeros(J + 1)
    hi = J
    while hi > 0 and u[hi - 1] == 0.0:
        hi -= 1
    sup = 0.0
    for j in range(hi):
        if u[j] > sup:
            sup = u[j]
    steps = 0
    max_res = 0.0
    t_prev = t
    while t < t_target:
        if steps >= max_steps:
            return BUDGET, t, steps, t_prev, max_res, 0.0
        if m == 1.0:
            tau = cfl * (h * h / (2.0 * dim * 1.0))
        elif sup == 0.0:
            tau = math.inf
        else:
            tau = cfl * (h * h / (2.0 * dim * (m * _pow(sup, m - 1.0))))
        if dt_max > 0.0 and dt_max < tau:
            tau = dt_max
        hit = tau >= t_target - t
        if hit:
            tau = t_target - t
        half = 0.5 * tau
        n = hi + 1 if hi < J else J
        c = p * half
        for j in range(n):
            v = _pow(u[j], p) - c * wabs[j]
            u1[j] = _pow(v if v > 0.0 else 0.0, inv_p)
        for j in range(n):
            P[j] = _pow(u1[j], m) if m != 1.0 else u1[j]
        F[0] = 0.0
        for k in range(1, n):
            F[k] = face_areas[k] * (P[k] - P[k - 1]) / h
        if n == J:
            F[J] = face_areas[J] * (0.0 - P[J - 1]) / h if dirichlet else 0.0
        else:
            F[n] = 0.0
        outflow = -tau * F[J] if n == J else 0.0
        t_new = t_target if hit else t + tau
        for j in range(n):
            v = u1[j] + (tau / weights[j]) * (F[j + 1] - F[j])
            if v < 0.0:
                if v < -floor:
                    return NEGATIVE, t_new, steps, t_prev, max_res, v
                v = 0.0
            u2[j] = v
        c = p * half
        new_sup = 0.0
        new_hi = 0
        res = 0.0
        for j in range(n):
            v = _pow(u2[j], p) - c * wabs[j]
            w3 = _pow(v if v > 0.0 else 0.0, inv_p)
            u3[j] = w3
            if w3 > new_sup:
                new_sup = w3
            if w3 != 0.0:
                new_hi = j + 1
            removed = (u[j] - u1[j]) + (u2[j] - w3)
            res += weights[j] * (w3 - u[j] + removed)
        res += outflow
        steps += 1
        if check:
            if new_sup > sup * (1.0 + sup_rtol) or new_sup > sup0 * (1.0 + 1e-12):
                return SUP_INCREASE, t_new, steps, t_prev, max_res, new_sup
            ares = abs(res)
            if ares > max_res:
                max_res = ares
            if ares > mass_rtol * mass0:
                return MASS_DEFECT, t_new, steps, t_prev, max_res, ares
        extinct = new_sup < eps
        if extinct:
            for j in range(J):
                u_prev[j] = u[j]
        t_prev = t
        for j in range(n):
            u[j] = u3[j]
        hi = new_hi
        sup = new_sup
        t = t_new
        if extinct:
            return EXTINCT, t, steps, t_prev, max_res, new_sup
    return REACHED, t, steps, t_prev, max_res, 0.0
