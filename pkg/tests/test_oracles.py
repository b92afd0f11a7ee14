import math

import mpmath as mp
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from porous_extinction.errors import HypothesisError, ZeroData
from porous_extinction.model import ProblemParams, SupersolutionSpec, corollary_constants
from porous_extinction.oracles import (
    comparison_constant_B,
    extinction_upper_bound,
    flat_extinction_time,
    flat_ode_solution,
)

mp.mp.dps = 40

P_AC3 = ProblemParams(2, 0.5, 2, 1)


@pytest.mark.parametrize(
    "spec, params, sup, expected",
    [
        (SupersolutionSpec(5, 1, 0.2), ProblemParams(2, 0.5, 0.0), 1e-4, 1.0),
        (SupersolutionSpec(5, 1, 1.0), P_AC3, 1.0, 1.0),
        (SupersolutionSpec(4, 2, 0.5), ProblemParams(2, 0.5, 1.0), 1e-3, None),
    ],
)
def test_comparison_constant(spec, params, sup, expected):
    B = comparison_constant_B(spec, params, sup)
    if expected is None:
        e = mp.mpf(params.sigma) / spec.a
        expected = float(min(mp.mpf(spec.A) ** -e, mp.mpf(spec.R) ** params.sigma * mp.mpf(sup) ** -e))
    assert B == pytest.approx(expected, rel=1e-14)


def test_comparison_constant_zero_data():
    with pytest.raises(ZeroData):
        comparison_constant_B(SupersolutionSpec(5, 1, 1), P_AC3, 0.0)


@pytest.mark.parametrize(
    "v0, B, p, t, expected",
    [
        (1.0, 1.0, 0.5, 0.0, 1.0),
        (1.0, 1.0, 0.5, 1.0, 0.25),
        (1.0, 1.0, 0.5, 2.0, 0.0),
        (1.0, 1.0, 0.9, 5.0, 0.5**10),
        (0.0, 3.0, 0.5, 1.0, 0.0),
    ],
)
def test_flat_ode_solution(v0, B, p, t, expected):
    assert flat_ode_solution(v0, B, p, t) == pytest.approx(expected, rel=1e-13, abs=0)


@pytest.mark.parametrize("args", [(-1, 1, 0.5, 0), (1, 0, 0.5, 0), (1, 1, 1.0, 0), (1, 1, 0.5, -1)])
def test_flat_ode_rejects_bad_arguments(args):
    with pytest.raises(ValueError):
        flat_ode_solution(*args)


def test_sigma_zero_bound_is_plain_ode():
    bound = extinction_upper_bound(SupersolutionSpec(1.0, 1.0, 1.0), ProblemParams(2, 0.5, 0.0), 1.0)
    assert bound.B == 1.0 and bound.p == 0.5
    assert bound.T_bound == pytest.approx(2.0)


def test_corollary_setup_bound():
    cc = corollary_constants(5, 1, P_AC3)
    bound = extinction_upper_bound(cc.spec(), P_AC3, cc.M)
    assert bound.p == pytest.approx(0.9)
    # sup = A R^a makes both entries of the minimum equal to 1
    assert bound.B == pytest.approx(1.0, rel=1e-12)
    expected = mp.mpf(cc.M) ** mp.mpf("0.1") / mp.mpf("0.1")
    assert bound.T_bound == pytest.approx(float(expected), rel=1e-12)


def test_corollary_setup_comparison_constant():
    cc = corollary_constants(5, 1, P_AC3)
    R, M = mp.mpf(cc.R), mp.mpf(cc.M)
    first = mp.mpf(1)
    second = R**2 * M ** mp.mpf("-0.4")
    assert comparison_constant_B(cc.spec(), P_AC3, cc.M) == pytest.approx(float(min(first, second)), rel=1e-12)


def test_zero_data_bound_vanishes():
    cc = corollary_constants(5, 1, P_AC3)
    assert extinction_upper_bound(cc.spec(), P_AC3, 0.0).T_bound == 0.0


@pytest.mark.parametrize(
    "spec, sup",
    [
        (SupersolutionSpec(4.0, 1.0, 0.2), 1e-4),  # a not above sigma/(1-q)
        (SupersolutionSpec(5.0, 1.0, 1.0), 1e-4),  # certificate fails
        (SupersolutionSpec(5.0, 1.0, 0.2), 1.0),  # sup above A R^a
    ],
)
def test_bound_requires_hypotheses(spec, sup):
    with pytest.raises(HypothesisError):
        extinction_upper_bound(spec, P_AC3, sup)


@settings(max_examples=300)
@given(st.floats(1e-6, 10), st.floats(1e-3, 10), st.floats(0.05, 0.95), st.floats(0, 50), st.floats(0, 50))
def test_flat_solution_non_increasing(v0, B, p, t1, t2):
    lo, hi = sorted((t1, t2))
    assert flat_ode_solution(v0, B, p, hi) <= flat_ode_solution(v0, B, p, lo)


@settings(max_examples=300)
@given(st.floats(1e-6, 10), st.floats(1e-3, 10), st.floats(0.05, 0.95))
def test_flat_solution_vanishes_exactly_at_bound(v0, B, p):
    T = flat_extinction_time(v0, B, p)
    assert flat_ode_solution(v0, B, p, T * (1 + 1e-12)) == 0.0
    assert flat_ode_solution(v0, B, p, T * 0.5) > 0.0


@settings(max_examples=300)
@given(st.floats(1e-6, 10), st.floats(1e-6, 10), st.floats(1e-3, 10), st.floats(1e-3, 10), st.floats(0.05, 0.95))
def test_bound_monotone_in_data_and_rate(v1, v2, B1, B2, p):
    lo_v, hi_v = sorted((v1, v2))
    lo_B, hi_B = sorted((B1, B2))
    assert flat_extinction_time(lo_v, lo_B, p) <= flat_extinction_time(hi_v, lo_B, p)
    assert flat_extinction_time(lo_v, hi_B, p) <= flat_extinction_time(lo_v, lo_B, p)


@settings(max_examples=200)
@given(st.floats(0.01, 1.0))
def test_bound_shrinks_with_sup(frac):
    cc = corollary_constants(5, 1, P_AC3)
    small = extinction_upper_bound(cc.spec(), P_AC3, frac * cc.M * 0.5)
    big = extinction_upper_bound(cc.spec(), P_AC3, cc.M)
    assert small.T_bound <= big.T_bound * (1 + 1e-12)
    assert math.isfinite(big.T_bound)
