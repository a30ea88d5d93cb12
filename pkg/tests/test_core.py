import numpy as np
import pytest
from hypothesis import given, strategies as st

from stefan_kinetic.core import (
    Grid1D, InterfaceState, InterfaceTrajectory, TemperatureField, make_params, read_two_columns, rescale_temperature,
)
from stefan_kinetic.errors import BoundaryMismatch, ConfigError, MissingKey, NonPositiveParameter

BASE = dict(rho0=1, gamma=1, alpha=1, K=1, theta_T=1, theta_B=0.5, L=1)
positive = st.floats(1e-3, 1e3, allow_nan=False)


def test_make_params_theta_c():
    assert make_params(BASE).theta_c == 0.5


def test_degenerate_theta_c_allowed():
    assert make_params(dict(BASE, theta_B=1.0)).theta_c == 0.0


@pytest.mark.parametrize("key", ["K", "rho0", "gamma", "L", "theta_T", "theta_B"])
def test_nonpositive_rejected(key):
    with pytest.raises(NonPositiveParameter) as err:
        make_params(dict(BASE, **{key: -1}))
    assert key in str(err.value)


def test_alpha_zero_allowed_negative_rejected():
    assert make_params(dict(BASE, alpha=0)).alpha == 0
    with pytest.raises(NonPositiveParameter):
        make_params(dict(BASE, alpha=-0.1))


def test_missing_key():
    raw = dict(BASE)
    del raw["gamma"]
    with pytest.raises(MissingKey, match="gamma"):
        make_params(raw)


@given(positive, positive)
def test_theta_c_sign(theta_T, theta_B):
    p = make_params(dict(BASE, theta_T=theta_T, theta_B=theta_B))
    assert np.sign(p.theta_c) == np.sign(theta_T - theta_B)


def test_derived_rates():
    p = make_params(dict(BASE, K=2.0, gamma=0.5, rho0=4.0, L=2.0))
    assert p.diffusivity == 1.0
    assert p.decay_rate == pytest.approx(np.pi**2 / 4)


@given(st.integers(4, 5000), st.floats(1e-3, 1e3))
def test_grid_geometry(n, L):
    g = Grid1D(n, L)
    s = g.nodes
    assert s[0] == 0.0 and s[-1] == L
    assert np.all(np.diff(s) > 0)
    assert abs(n * g.ds - L) <= 4 * np.finfo(float).eps * L


def test_grid_too_small():
    with pytest.raises(ValueError):
        Grid1D(3)


def test_grid_locate():
    g = Grid1D(10, 1.0)
    assert g.locate(0.35) == (3, pytest.approx(0.5))
    assert g.locate(1.0) == (9, pytest.approx(1.0))


def test_rescale_constant_is_zero():
    p, g = make_params(BASE), Grid1D(16)
    f = rescale_temperature(np.full(17, p.theta_B), p, g)
    assert np.all(f.values == 0)


def test_rescale_sine_midpoint():
    p, g = make_params(BASE), Grid1D(16)
    theta = p.theta_B + p.theta_c * np.sin(np.pi * g.nodes)
    f = rescale_temperature(theta, p, g)
    assert f.values[8] == pytest.approx(0.5, abs=1e-15)


def test_rescale_boundary_mismatch():
    p, g = make_params(BASE), Grid1D(16)
    theta = np.full(17, p.theta_B)
    theta[-1] += 1
    with pytest.raises(BoundaryMismatch):
        rescale_temperature(theta, p, g)


@given(st.lists(st.floats(-10, 10), min_size=15, max_size=15))
def test_rescale_round_trip(interior):
    p, g = make_params(BASE), Grid1D(16)
    theta = np.concatenate([[p.theta_B], np.asarray(interior) + p.theta_B, [p.theta_B]])
    back = rescale_temperature(theta, p, g).physical(p)
    assert np.allclose(back, theta, rtol=0, atol=1e-14)


def test_field_rejects_nonzero_boundary_and_nan():
    g = Grid1D(4)
    with pytest.raises(BoundaryMismatch):
        TemperatureField(np.array([0.1, 0, 0, 0, 0]), g)
    with pytest.raises(ValueError):
        TemperatureField(np.array([0, np.nan, 0, 0, 0]), g)


@given(st.lists(st.floats(-2, 2), min_size=1, max_size=30))
def test_interface_gate_sticky(moves):
    state = InterfaceState(0.5)
    for k, du in enumerate(moves, 1):
        was_active, old_u = state.active, state.u
        state.advance(state.u + du, float(k), 1.0)
        assert 0.0 <= state.u <= 1.0
        if not was_active:
            assert state.u == old_u and not state.active
        if not state.active:
            assert state.u in (0.0, 1.0)


def test_trajectory_lipschitz_violations():
    t = np.linspace(0, 1, 11)
    u = 0.1 + 0.5 * t
    traj = InterfaceTrajectory.from_arrays(t, u)
    assert traj.lipschitz_violations(0.5, 1.0) == []
    u2 = u.copy()
    u2[5] += 0.2
    assert 4 in InterfaceTrajectory.from_arrays(t, u2).lipschitz_violations(0.5, 1.0)


def test_read_two_columns(tmp_path):
    p = tmp_path / "t.csv"
    p.write_text("theta,v\n# comment\n1, 2\n3 4\n")
    x, y = read_two_columns(p)
    assert x.tolist() == [1, 3] and y.tolist() == [2, 4]
    p.write_text("1 2 3\n")
    with pytest.raises(ConfigError):
        read_two_columns(p)
