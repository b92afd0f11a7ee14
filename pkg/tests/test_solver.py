import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from porous_extinction.errors import ConfigError, NegativityError, StabilityViolation
from porous_extinction.initial_data import CompactBump, FlatConstant, GaussianBump, Table
from porous_extinction.model import ProblemParams
from porous_extinction.oracles import flat_ode_solution
from porous_extinction.solver import (
    BoundaryCondition,
    RadialGrid,
    RunConfig,
    State,
    absorption_substep,
    diffusion_substep,
    max_stable_dt,
    run,
    stable_dt,
    step,
    unit_sphere_area,
)

NEUMANN = BoundaryCondition.NEUMANN_ZERO


def make_config(ic, m=2.0, q=0.5, sigma=0.5, dim=1, R_max=1.0, J=64, t_max=1.0, **kw):
    params = ProblemParams(m, q, sigma, dim)
    return RunConfig(params, RadialGrid(R_max, J, dim), ic, t_max, **kw)


@pytest.mark.parametrize("dim, omega", [(1, 2.0), (2, 2 * math.pi), (3, 4 * math.pi)])
def test_unit_sphere_area(dim, omega):
    assert unit_sphere_area(dim) == pytest.approx(omega, rel=1e-15)


@pytest.mark.parametrize("dim", [1, 2, 3])
@pytest.mark.parametrize("J", [2, 7, 512])
def test_cell_weights_telescope(dim, J):
    grid = RadialGrid(1.7, J, dim)
    assert np.all(grid.weights > 0)
    assert grid.weights.sum() == pytest.approx(grid.volume, rel=1e-13)
    assert grid.centers[0] == pytest.approx(grid.h / 2)
    assert grid.face_areas[0] == (0.0 if dim > 1 else 2.0)


def test_grid_arrays_read_only():
    grid = RadialGrid(1.0, 8)
    with pytest.raises(ValueError):
        grid.centers[0] = 1.0


@pytest.mark.parametrize("J", [1, 0, 2.5, True])
def test_grid_rejects_bad_J(J):
    with pytest.raises(ConfigError):
        RadialGrid(1.0, J)


def test_state_rejects_negative_and_nan():
    with pytest.raises(NegativityError):
        State(0.0, np.array([1.0, -1e-300]))
    with pytest.raises(NegativityError):
        State(0.0, np.array([1.0, np.nan]))


def test_config_rejects_support_beyond_domain():
    with pytest.raises(ConfigError, match="smaller than the initial support"):
        make_config(CompactBump(1.0, 2.0), R_max=1.0)


def test_config_rejects_dimension_mismatch():
    with pytest.raises(ConfigError):
        RunConfig(ProblemParams(2, 0.5, 1, 2), RadialGrid(1, 8, 1), FlatConstant(1), 1.0)


# absorption: u' = -u^q with sigma = 0 has the closed form (u0^(1-q) - (1-q) t)_+^(1/(1-q))
@pytest.mark.parametrize("tau, expected", [(0.0, 1.0), (1.0, 0.25), (2.0, 0.0), (5.0, 0.0)])
def test_absorption_exact_flow(tau, expected):
    cfg = make_config(FlatConstant(1.0), sigma=0.0, J=4)
    out = absorption_substep(State(0.0, np.ones(4)), cfg.grid, cfg.params, tau)
    np.testing.assert_allclose(out.u, expected, rtol=1e-15, atol=0)


def test_absorption_weight_is_radial():
    cfg = make_config(FlatConstant(1.0), sigma=2.0, J=4, R_max=4.0)
    out = absorption_substep(State(0.0, np.ones(4)), cfg.grid, cfg.params, 0.1)
    r = cfg.grid.centers
    np.testing.assert_allclose(out.u, np.maximum(1 - 0.5 * 0.1 * r**2, 0) ** 2, rtol=1e-14)
    assert np.all(np.diff(out.u) < 0)


def test_absorption_keeps_zero():
    cfg = make_config(FlatConstant(0.0), J=4)
    out = absorption_substep(State(0.0, np.zeros(4)), cfg.grid, cfg.params, 1.0)
    assert out.is_zero()


def test_diffusion_preserves_flat_neumann():
    cfg = make_config(FlatConstant(0.3), bc=NEUMANN, dim=3)
    s = State(0.0, np.full(64, 0.3))
    out = diffusion_substep(s, cfg.grid, cfg, stable_dt(s, cfg.grid, cfg.params))
    assert np.array_equal(out.u, s.u)


@pytest.mark.parametrize("dim", [1, 2, 3])
def test_diffusion_conserves_mass_neumann(dim):
    cfg = make_config(CompactBump(1.0, 0.3), bc=NEUMANN, dim=dim)
    u = np.zeros(64)
    u[10] = 1.0
    s = State(0.0, u)
    w = cfg.grid.weights
    m0 = np.dot(w, u)
    for _ in range(50):
        s = diffusion_substep(s, cfg.grid, cfg, stable_dt(s, cfg.grid, cfg.params))
    assert abs(np.dot(w, s.u) - m0) <= 1e-13 * m0
    assert s.sup < 1.0


def test_diffusion_rejects_unstable_step():
    cfg = make_config(FlatConstant(1.0))
    s = State(0.0, np.linspace(1, 0, 64))
    limit = max_stable_dt(s.u, cfg.grid, cfg.params)
    with pytest.raises(StabilityViolation):
        diffusion_substep(s, cfg.grid, cfg, 1.01 * limit)


def test_stable_dt_examples():
    cfg = make_config(FlatConstant(1.0), J=64, R_max=1.0)
    h = 1 / 64
    s = State(0.0, np.full(64, 1.0))
    assert stable_dt(s, cfg.grid, cfg.params, cfl=1.0) == pytest.approx(h * h / 4)
    half = State(0.0, np.full(64, 0.5))
    assert stable_dt(half, cfg.grid, cfg.params) == pytest.approx(2 * stable_dt(s, cfg.grid, cfg.params))


def test_stable_dt_zero_state():
    cfg = make_config(FlatConstant(0.0))
    zero = State(0.25, np.zeros(64))
    assert stable_dt(zero, cfg.grid, cfg.params, t_max=1.0) == 0.75
    assert stable_dt(zero, cfg.grid, cfg.params) == math.inf


def test_stable_dt_linear_diffusion_ignores_amplitude():
    cfg = make_config(FlatConstant(1.0), m=1.0)
    a = stable_dt(State(0, np.full(64, 1.0)), cfg.grid, cfg.params)
    b = stable_dt(State(0, np.full(64, 1e6)), cfg.grid, cfg.params)
    assert a == b


def test_step_on_zero_state_advances_time():
    cfg = make_config(FlatConstant(0.0), t_max=2.0)
    out = step(State(0.5, np.zeros(64)), cfg.grid, cfg)
    assert out.t == 2.0 and out.is_zero()


def test_step_flat_matches_ode():
    cfg = make_config(FlatConstant(1.0), sigma=0.0, bc=NEUMANN, J=16)
    s = cfg.initial_state()
    for _ in range(20):
        s = step(s, cfg.grid, cfg)
        expected = flat_ode_solution(1.0, 1.0, 0.5, s.t)
        np.testing.assert_allclose(s.u, expected, rtol=1e-12)


def test_step_respects_requested_dt():
    cfg = make_config(CompactBump(1.0, 0.5))
    out = step(cfg.initial_state(), cfg.grid, cfg, dt=1e-7)
    assert out.t == 1e-7


def test_zero_data_extinct_at_start():
    result = run(make_config(FlatConstant(0.0)))
    assert result.extinction.extinct
    assert (result.extinction.t_lower, result.extinction.t_upper) == (0.0, 0.0)
    assert result.extinction.exact_zero
    assert result.steps == 0


@pytest.mark.parametrize("dim", [1, 2, 3])
@pytest.mark.parametrize("bc", list(BoundaryCondition))
def test_engines_bit_identical(dim, bc):
    cfg = make_config(GaussianBump(1.0, 0.2), dim=dim, J=48, t_max=0.3, bc=bc, snapshot_every=0.05)
    a = run(cfg, engine="numpy")
    b = run(cfg, engine="compiled")
    assert a.steps == b.steps
    assert [r.t for r in a.trajectory] == [r.t for r in b.trajectory]
    for sa, sb in zip(a.snapshots, b.snapshots):
        assert np.array_equal(sa.u, sb.u)


def test_snapshots_land_on_cadence():
    cfg = make_config(CompactBump(1.0, 0.5), J=32, t_max=0.5, snapshot_every=0.1)
    times = [rec.t for rec in run(cfg).trajectory]
    assert times == [0.0] + [k * 0.1 for k in range(1, 5)] + [0.5]


def test_extinction_bracket_is_one_step():
    cfg = make_config(FlatConstant(1.0), sigma=0.0, bc=NEUMANN, J=16, t_max=3.0)
    result = run(cfg)
    rep = result.extinction
    assert rep.extinct and rep.t_lower < 2.0 <= rep.t_upper
    assert result.final.is_zero()
    prev = result.snapshots[-2]
    assert prev.t == rep.t_lower and prev.sup > 0
    assert rep.t_upper - rep.t_lower <= stable_dt(prev, cfg.grid, cfg.params)


def test_zero_state_is_absorbing():
    cfg = make_config(FlatConstant(1.0), sigma=0.0, bc=NEUMANN, J=16, t_max=3.0)
    s = State(2.5, np.zeros(16))
    for _ in range(5):
        s = step(s, cfg.grid, cfg, dt=0.01)
        assert s.is_zero()


def test_forcing_requires_numpy_engine():
    cfg = make_config(CompactBump(1.0, 0.5), forcing=lambda t, r: np.zeros_like(r))
    with pytest.raises(ValueError):
        run(cfg, engine="compiled")


def test_dirichlet_mass_balance_includes_outflow():
    cfg = make_config(FlatConstant(1.0), J=32, t_max=0.05, bc=BoundaryCondition.DIRICHLET_ZERO)
    result = run(cfg, engine="numpy")
    m0 = float(np.dot(cfg.grid.weights, cfg.initial_state().u))
    assert result.max_mass_residual <= 1e-12 * m0


@settings(max_examples=25, deadline=None)
@given(
    st.lists(st.floats(0.0, 2.0), min_size=8, max_size=8),
    st.floats(1.0, 3.0),
    st.floats(0.1, 0.9),
    st.floats(0.0, 3.0),
    st.integers(1, 3),
)
def test_step_sup_and_positivity(values, m, q, sigma, dim):
    radii = np.linspace(0, 0.9, 8)
    cfg = make_config(Table(radii, values), m=m, q=q, sigma=sigma, dim=dim, J=32, bc=NEUMANN)
    s = cfg.initial_state()
    for _ in range(10):
        new = step(s, cfg.grid, cfg)
        assert np.all(new.u >= 0)
        assert new.sup <= s.sup * (1 + 1e-14)
        s = new


@settings(max_examples=20, deadline=None)
@given(st.floats(0.05, 1.0), st.floats(0.1, 2.0), st.integers(1, 3))
def test_ordered_data_stay_ordered(lam, sigma, dim):
    big = GaussianBump(1.0, 0.2)
    small = big.scaled(lam)
    base = make_config(big, sigma=sigma, dim=dim, J=32, t_max=0.2, snapshot_every=0.02)
    dt = stable_dt(base.initial_state(), base.grid, base.params)
    hi = run(replace(base, dt_max=dt))
    lo = run(replace(base, ic=small, dt_max=dt))
    for a, b in zip(lo.snapshots, hi.snapshots):
        assert a.t == b.t
        assert np.all(a.u <= b.u + 1e-12 * big.sup_norm)


def test_diffusion_of_zero_is_zero():
    cfg = make_config(FlatConstant(0.0))
    out = diffusion_substep(State(0.0, np.zeros(64)), cfg.grid, cfg, 1e-3)
    assert out.is_zero()
