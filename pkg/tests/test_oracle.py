import numpy as np
import pytest
from hypothesis import given, strategies as st

from stefan_kinetic.core import make_params
from stefan_kinetic.errors import NoBracket
from stefan_kinetic.oracle import (
    decaying_sine, fine_grid_reference, manufactured_forcing, neumann_residual, observed_orders, richardson, solve_neumann,
)

UNIT = dict(rho0=1.0, gamma=1.0, alpha=1.0, K=1.0, L=1.0)
# mpmath findroot at 40 digits on the erfc form of the balance
LAMBDA_STIFF = 0.6240258849137187998  # theta_T = 1.5, far fields 1
LAMBDA_ONE_PHASE = -0.3578345466720071417  # left at theta_T, right at theta_T + 1 (St = 1)


@pytest.fixture
def stiff_params():
    return make_params(dict(UNIT, theta_T=1.5, theta_B=1.0))


@pytest.mark.parametrize("method", ["bisect", "secant"])
def test_stiff_root_frozen(stiff_params, method):
    sol = solve_neumann(stiff_params, 0.5, method=method)
    assert sol.lam == pytest.approx(LAMBDA_STIFF, abs=1e-13)
    assert abs(sol.residual) <= 1e-12


def test_one_phase_stefan_one_cross_checked(stiff_params):
    kw = dict(theta_left=1.5, theta_right=2.5)
    a = solve_neumann(stiff_params, 0.5, method="bisect", **kw)
    b = solve_neumann(stiff_params, 0.5, method="secant", **kw)
    assert abs(a.lam - b.lam) <= 1e-10
    assert a.lam == pytest.approx(LAMBDA_ONE_PHASE, abs=1e-13)
    assert abs(neumann_residual(a.lam, stiff_params, **kw)) <= 1e-12


def test_zero_latent_heat_isotherm_stays_put(stiff_params):
    sol = solve_neumann(stiff_params, 0.5, theta_left=2.5, theta_right=0.5, alpha=0.0)
    assert sol.lam == pytest.approx(0.0, abs=1e-14)
    s = np.linspace(0.1, 0.9, 9)
    from scipy.special import erf

    assert np.allclose(sol.temperature(s, 0.01), 1.5 - erf((s - 0.5) / (2 * np.sqrt(0.01))), atol=1e-14)


def test_symmetric_jumps_give_antisymmetric_profile(stiff_params):
    sol = solve_neumann(stiff_params, 0.5, theta_left=2.5, theta_right=0.5)
    x = np.linspace(0.01, 0.3, 7)
    u = sol.position(0.02)
    left = sol.temperature(u - x, 0.02) - 1.5
    right = sol.temperature(u + x, 0.02) - 1.5
    assert np.allclose(left, -right, atol=1e-13)


def test_profile_hits_theta_T_at_interface(stiff_params):
    sol = solve_neumann(stiff_params, 0.5)
    for t in (1e-4, 1e-2):
        assert sol.temperature(sol.position(t), t) == pytest.approx(1.5, abs=1e-12)
    assert sol.validity_horizon(1.0) == pytest.approx(0.0625)


def test_no_bracket_for_stefan_one_two_phase():
    p = make_params(dict(UNIT, theta_T=2.0, theta_B=1.0))
    with pytest.raises(NoBracket):
        solve_neumann(p, 0.3)


@given(st.floats(0.05, 0.95))
def test_root_exists_below_stefan_one(st_number):
    p = make_params(dict(UNIT, theta_T=1.0 + st_number, theta_B=1.0))
    sol = solve_neumann(p, 0.5)
    assert sol.lam > 0 and abs(sol.residual) <= 1e-12


def test_forcing_zero_solution():
    p = make_params(dict(UNIT, theta_T=2.0, theta_B=1.0))
    mf = manufactured_forcing(lambda t: 0.4, lambda s, t: 0.0 * s, p)
    s = np.linspace(0, 1, 11)
    assert np.all(mf.smooth(s, 0.3) == 0)
    assert mf.interface_heat(0.0, 1.0) == 0


def test_forcing_decaying_sine():
    p = make_params(dict(UNIT, theta_T=2.0, theta_B=1.0))
    mf = decaying_sine(p, speed=0.0)
    s = np.linspace(0, 1, 11)
    assert np.allclose(mf.smooth(s, 0.7), (np.pi**2 - 1) * np.exp(-0.7) * np.sin(np.pi * s), atol=1e-14)
    assert mf.interface_heat(0.2, 0.5) == 0


def test_numerical_derivatives_match_analytic():
    p = make_params(dict(UNIT, theta_T=2.0, theta_B=1.0))
    exact = decaying_sine(p)
    approx = manufactured_forcing(exact.u, exact.theta_exact, p)
    s = np.linspace(0.05, 0.95, 19)
    assert np.allclose(approx.smooth(s, 0.4), exact.smooth(s, 0.4), atol=1e-5)
    assert approx.delta_strength(0.5) == pytest.approx(-0.1, abs=1e-8)


def test_observed_orders_and_richardson():
    hs = np.array([0.1, 0.05, 0.025])
    assert np.allclose(observed_orders(hs, 3 * hs**2), 2.0)
    seq = [1 + 0.1, 1 + 0.05, 1 + 0.025]
    assert richardson(seq) == pytest.approx(1.0)


def test_fine_grid_reference_equilibrium():
    _, table = fine_grid_reference("equilibrium", levels=(64, 128, 256))
    assert table.t_star == [None, None, None]
    assert table.richardson_t_star is None
    assert len(list(table.rows())) == 3
