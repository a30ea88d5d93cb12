"""Acceptance suite: one pass/fail line per criterion.

Run with ``pytest tests/test_acceptance.py -s`` to see the lines inline, or
``python tests/test_acceptance.py`` for the bare report.
"""

from pathlib import Path

import numpy as np
import pytest

from stefan_kinetic import analysis, experiments
from stefan_kinetic.config import load_run_config
from stefan_kinetic.errors import SignConditionViolated
from stefan_kinetic.oracle import fine_grid_reference
from stefan_kinetic.scenarios import catalog_names, get_scenario
from stefan_kinetic.velocity import LinearLaw, SaturatedLaw, TableLaw, validate_sign_condition

CONFIGS = Path(__file__).resolve().parents[1] / "configs"
EPS = 1e-10


def _report(number, title, ok, detail):
    line = f"[criterion {number}] {'PASS' if ok else 'FAIL'}  {title}: {detail}"
    print(line, flush=True)
    return ok


def criterion_1():
    parts, ok = [], True
    for name in ("exit-baseline", "mirrored"):
        res = get_scenario(name).run(n_cells=512)
        c = res.params.theta_c
        lo, hi = min(0.0, c), max(0.0, c)
        below, above = np.min(res.snapshots) - lo, hi - np.max(res.snapshots)
        good = below >= -EPS and above >= -EPS
        ok &= good
        parts.append(f"{name} range [{np.min(res.snapshots):.3g}, {np.max(res.snapshots):.3g}] vs band [{lo:g}, {hi:g}]")
    return _report(1, "maximum principle", ok, "; ".join(parts))


def criterion_2():
    parts, ok = [], True
    for name, sign in (("exit-baseline", 1), ("mirrored", -1)):
        du = np.diff(get_scenario(name).run(n_cells=512).trajectory.u)
        worst = float(np.min(sign * du))
        ok &= worst >= -1e-14
        parts.append(f"{name} min signed step {worst:.3g}")
    return _report(2, "interface monotonicity", ok, "; ".join(parts))


def criterion_3():
    res, table = fine_grid_reference("exit-baseline", (512, 1024, 2048), check=False)
    ts = table.t_star
    exited = all(t is not None for t in ts) and ts[-1] < res.config.t_end
    if not exited:
        return _report(3, "finite-time exit", False, f"t* = {ts}")
    diffs = np.diff(ts)
    ratio = abs(diffs[0] / diffs[1])
    same_sign = np.all(np.sign(diffs) == np.sign(diffs[0]))
    rel = abs(ts[0] / table.richardson_t_star - 1.0)
    ok = bool(same_sign and ratio >= 1.8 and rel <= 0.01)
    return _report(3, "finite-time exit", ok, f"t* = {[f'{t:.10f}' for t in ts]}, gap ratio {ratio:.3f}, coarse vs Richardson {rel:.3%}")


def criterion_4():
    res = get_scenario("exit-baseline").run(n_cells=512)
    rep = analysis.check_l2_decay(res)
    return _report(4, "post-exit L2 decay", rep.passed, rep.detail)


def criterion_5():
    gaps, lam = experiments.stiff_limit_gaps()
    ok = bool(np.all(np.diff(gaps) < 0))
    return _report(5, "classical Stefan limit", ok, f"lambda_N={lam:.10f}, sup gaps (k=10,100,1000) = {[f'{g:.4g}' for g in gaps]}")


def criterion_6():
    sp_cn = experiments.spatial_orders("crank_nicolson")
    sp_be = experiments.spatial_orders("backward_euler")
    t_cn = experiments.temporal_orders("crank_nicolson")
    t_be = experiments.temporal_orders("backward_euler")
    res = get_scenario("exit-baseline").run(n_cells=512)
    led = res.energy.arrays()
    step, _, scale = analysis.energy_residuals(led)
    worst = float(np.max(np.abs(step))) / scale
    ok = bool(min(sp_cn.min(), sp_be.min()) >= 1.9 and t_cn.min() >= 1.9 and t_be.min() >= 0.9 and worst <= 1e-12)
    detail = (
        f"spatial CN {np.round(sp_cn, 3).tolist()} BE {np.round(sp_be, 3).tolist()}, "
        f"temporal CN {np.round(t_cn, 3).tolist()} BE {np.round(t_be, 3).tolist()}, energy step residual {worst:.2e}"
    )
    return _report(6, "scheme verification", ok, detail)


def criterion_7():
    norms = experiments.mollified_vs_sharp()
    ok = bool(np.all(np.diff(norms) < 0))
    return _report(7, "mollified vs sharp", ok, f"eps = 8,4,2 ds: {[f'{x:.3e}' for x in norms]}")


def criterion_8():
    trials = experiments.laminate_trials(1000, seed=2024)
    a, b, ratio = experiments.entropy_residual_ratio()
    ok = (
        trials["roundtrip"] <= 1e-10
        and trials["continuity"] <= 1e-12
        and trials["lipschitz_excess"] <= 1e-6
        and trials["mm_failures"] == 0
        and 1.8 <= ratio <= 2.2
    )
    detail = (
        f"round-trip {trials['roundtrip']:.1e}, continuity {trials['continuity']:.1e}, "
        f"MM failures {trials['mm_failures']}/1000, entropy residual {a:.2e} -> {b:.2e} (ratio {ratio:.3f})"
    )
    return _report(8, "laminate geometry", ok, detail)


def shipped_laws():
    laws = [LinearLaw(1.0, 1.0), LinearLaw(2.0, 1.0), SaturatedLaw(1.0, 0.1, 1.0)]
    for name in catalog_names():
        laws.append(get_scenario(name).config().law)
    for cfg in sorted(CONFIGS.glob("*.cfg")):
        if cfg.name != "laminate.cfg":
            laws.append(load_run_config(cfg).law)
    return laws


def criterion_9():
    laws = shipped_laws()
    passed = sum(validate_sign_condition(law, m=1001).passed for law in laws)
    bad = TableLaw([0.0, 0.5, 1.0, 2.0], [1.0, -0.1, 0.0, -1.0], 1.0)
    try:
        validate_sign_condition(bad, m=1001, delta=0.5)
        rejected = False
    except SignConditionViolated as err:
        rejected = err.theta == pytest.approx(0.5)
    ok = passed == len(laws) and rejected
    return _report(9, "velocity-law contract", ok, f"{passed}/{len(laws)} shipped laws pass at m=1001; injected violation rejected at theta_T-0.5: {rejected}")


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6, criterion_7, criterion_8, criterion_9]


@pytest.mark.parametrize("criterion", CRITERIA, ids=[f"criterion_{i}" for i in range(1, 10)])
def test_criterion(criterion, capsys):
    with capsys.disabled():
        ok = criterion()
    assert ok


if __name__ == "__main__":
    results = [c() for c in CRITERIA]
    print(f"{sum(results)}/{len(results)} criteria pass")
