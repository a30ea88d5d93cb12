import copy

import numpy as np
import pytest

from stefan_kinetic import analysis as A
from stefan_kinetic.core import Grid1D, make_params
from stefan_kinetic.scenarios import get_scenario
from stefan_kinetic.solver import SolverConfig, run
from stefan_kinetic.velocity import LinearLaw

UNIT = dict(rho0=1.0, gamma=1.0, alpha=1.0, K=1.0, L=1.0)


def test_max_principle_equilibrium_margin_zero(equilibrium_result):
    r = A.check_max_principle(equilibrium_result)
    assert r.passed and r.margin == 0.0


def test_max_principle_baseline_and_mirrored(baseline_result, mirrored_result):
    assert A.check_max_principle(baseline_result).passed
    assert A.check_max_principle(mirrored_result).passed


def test_hypothesis_not_met_outside_band():
    res = get_scenario("exit-baseline").run(n_cells=64, **{"initial.amplitude": 2.0, "solver.t_end": 0.1})
    for check in (A.check_max_principle, A.check_monotone_interface, A.check_speed_bound, A.check_finite_exit):
        assert check(res).verdict == A.HYPOTHESIS_NOT_MET


def test_monotone(equilibrium_result, baseline_result, mirrored_result):
    for res in (equilibrium_result, baseline_result, mirrored_result):
        assert A.check_monotone_interface(res).passed
    assert "non-increasing" in A.check_monotone_interface(mirrored_result).detail


def test_tampered_trajectory_fails_monotone(baseline_result):
    bad = copy.deepcopy(baseline_result)
    bad.trajectory.u[40] = bad.trajectory.u[39] - 1e-3
    r = A.check_monotone_interface(bad)
    assert r.failed
    assert r.location[0] == pytest.approx(bad.trajectory.t[39])


def test_speed_bound(baseline_result):
    r = A.check_speed_bound(baseline_result)
    assert r.passed and r.margin >= 0


def test_finite_exit_verdicts(baseline_result, equilibrium_result):
    assert A.check_finite_exit(baseline_result).passed
    assert A.check_finite_exit(equilibrium_result).verdict == A.HYPOTHESIS_NOT_MET
    slow = get_scenario("exit-baseline").run(n_cells=64, **{"law.k": 0.01, "solver.t_end": 0.1})
    assert A.check_finite_exit(slow).verdict == A.INCONCLUSIVE


def test_finite_exit_fails_past_budget(baseline_result):
    stuck = copy.deepcopy(baseline_result)
    stuck.exit = None
    budget = A.exit_budget(stuck.law, stuck.params)
    stuck.trajectory.t[-1] = budget + 1.0
    assert A.check_finite_exit(stuck).failed


def test_l2_decay(baseline_result, equilibrium_result):
    r = A.check_l2_decay(baseline_result)
    assert r.passed, r.detail
    assert A.check_l2_decay(equilibrium_result).passed
    short = get_scenario("exit-baseline").run(n_cells=128, **{"solver.t_end": 0.33})
    assert short.exit is not None
    assert A.check_l2_decay(short).verdict == A.INCONCLUSIVE


def test_fit_decay_rate_exact():
    t = np.linspace(0, 1, 20)
    assert A.fit_decay_rate(t, 3 * np.exp(-2.5 * t)) == pytest.approx(2.5)


def test_energy_balance_alpha_zero():
    p = make_params(dict(UNIT, alpha=0.0, theta_T=2.0, theta_B=1.0))
    g = Grid1D(64)
    res = run(lambda s: np.sin(np.pi * s), 0.3, p, LinearLaw(5.0, 2.0), SolverConfig(dt=g.ds, t_end=0.5), g)
    assert A.check_energy_balance(res).passed
    assert res.energy.latent_cum[-1] == 0.0


def test_energy_balance_detects_tampering(baseline_result):
    bad = copy.deepcopy(baseline_result)
    bad.energy.stored[100] += 1e-6
    assert A.check_energy_balance(bad).failed


def test_run_all_checks(baseline_result):
    reports = A.run_all_checks(baseline_result)
    assert [r.theorem for r in reports] == ["max_principle", "monotonicity", "speed_bound", "finite_exit", "l2_decay", "energy_balance"]
    assert all(r.passed for r in reports)
    d = reports[0].to_dict()
    assert set(d) == {"theorem", "verdict", "margin", "tolerance", "location", "detail"}


def test_checkers_are_read_only(baseline_result):
    before = copy.deepcopy(baseline_result)
    A.run_all_checks(baseline_result)
    assert np.array_equal(before.snapshots, baseline_result.snapshots)
    assert before.trajectory.u == baseline_result.trajectory.u
