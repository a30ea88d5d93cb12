"""Checkers that audit a finished run against the qualitative theorems.

Each checker is read-only over a :class:`SimulationResult` and returns a
:class:`TheoremReport`.  A theorem is never judged outside its hypotheses:
runs whose initial data leave the admissible band come back as
``hypothesis_not_met`` instead of ``fail``.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

from .velocity import max_speed

PASS = "pass"
FAIL = "fail"
HYPOTHESIS_NOT_MET = "hypothesis_not_met"
INCONCLUSIVE = "inconclusive"

MAX_PRINCIPLE_TOL = 1e-10
MONOTONE_SLACK = 1e-14
DECAY_REL_TOL = 0.05
ENERGY_STEP_TOL = 1e-12
ENERGY_CUM_TOL = 1e-10
MIN_POST_EXIT_SNAPSHOTS = 50


@dataclass
class TheoremReport:
    theorem: str
    verdict: str
    margin: float
    tolerance: float
    location: Optional[tuple] = None
    detail: str = ""

    @property
    def passed(self) -> bool:
        return self.verdict == PASS

    @property
    def failed(self) -> bool:
        return self.verdict == FAIL

    def to_dict(self) -> dict:
        d = asdict(self)
        d["margin"] = _finite_or_none(self.margin)
        d["location"] = None if self.location is None else [float(x) for x in self.location]
        return d


def _finite_or_none(x):
    return float(x) if x is not None and np.isfinite(x) else None


def band(params) -> tuple[float, float]:
    """Admissible interval ``[min(0, theta_c), max(0, theta_c)]`` of the rescaled temperature."""
    return min(0.0, params.theta_c), max(0.0, params.theta_c)


def initial_in_band(result, params, tol: float = MAX_PRINCIPLE_TOL) -> bool:
    lo, hi = band(params)
    theta0 = result.snapshots[0]
    return bool(np.all(theta0 >= lo - tol) and np.all(theta0 <= hi + tol))


def check_max_principle(result, params=None, tol: float = MAX_PRINCIPLE_TOL) -> TheoremReport:
    params = params or result.params
    name = "max_principle"
    if not initial_in_band(result, params, tol):
        return TheoremReport(name, HYPOTHESIS_NOT_MET, np.nan, tol, detail="initial data outside [min(0,theta_c), max(0,theta_c)]")
    lo, hi = band(params)
    S = result.snapshots
    below = S - lo
    above = hi - S
    dist = np.minimum(below, above)
    k, i = np.unravel_index(np.argmin(dist), dist.shape)
    margin = float(dist[k, i])
    verdict = PASS if margin >= -tol else FAIL
    loc = (float(result.snapshot_times[k]), float(result.grid.nodes[i]))
    return TheoremReport(name, verdict, margin, tol, loc, f"band=[{lo:g}, {hi:g}]")


def check_monotone_interface(result, params=None, slack: float = MONOTONE_SLACK) -> TheoremReport:
    params = params or result.params
    name = "monotonicity"
    if not initial_in_band(result, params):
        return TheoremReport(name, HYPOTHESIS_NOT_MET, np.nan, slack, detail="initial data outside the admissible band")
    a = result.trajectory.arrays()
    du = np.diff(a["u"])
    active = a["gate"][:-1]
    if not np.any(active):
        return TheoremReport(name, PASS, 0.0, slack, detail="interface never active")
    sign = np.sign(params.theta_c)
    if sign == 0:
        signed = -np.abs(du[active])
    else:
        signed = sign * du[active]
    idx = np.flatnonzero(active)[np.argmin(signed)]
    margin = float(np.min(signed))
    verdict = PASS if margin >= -slack else FAIL
    direction = {1: "non-decreasing", -1: "non-increasing", 0: "constant"}[int(sign)]
    return TheoremReport(name, verdict, margin, slack, (float(a["t"][idx]), float(a["u"][idx])), f"expected {direction}")


def band_speed(law, params) -> float:
    lo, hi = band(params)
    return max_speed(law, lo + params.theta_B, hi + params.theta_B)


def check_speed_bound(result, params=None, law=None) -> TheoremReport:
    """``|u_{k+1} - u_k| / dt <= max |v|`` over the admissible temperature band."""
    params = params or result.params
    law = law or result.law
    name = "speed_bound"
    if not initial_in_band(result, params):
        return TheoremReport(name, HYPOTHESIS_NOT_MET, np.nan, 0.0, detail="initial data outside the admissible band")
    a = result.trajectory.arrays()
    if len(a["t"]) < 2:
        return TheoremReport(name, INCONCLUSIVE, np.nan, 0.0, detail="trajectory has fewer than two samples")
    vmax = band_speed(law, params)
    speed = np.abs(np.diff(a["u"])) / np.diff(a["t"])
    tol = 1e-12 * max(vmax, 1.0)
    k = int(np.argmax(speed))
    margin = float(vmax - speed[k])
    verdict = PASS if margin >= -tol else FAIL
    return TheoremReport(name, verdict, margin, tol, (float(a["t"][k]), float(a["u"][k])), f"v_max over band = {vmax:.6g}")


def exit_budget(law, params, factor: float = 10.0) -> float:
    """Time after which a missing exit counts as a failure.

    ``factor * L / v_slow`` where ``v_slow`` is the smallest ``|v|`` on the
    half of the band next to the boundary temperature (``v`` vanishes at
    ``theta_c`` itself, so the full band has no positive minimum).
    """
    c = params.theta_c
    thetas = params.theta_B + np.linspace(0.0, 0.5 * c, 201)
    slow = float(np.min(np.abs(law(thetas))))
    return np.inf if slow == 0 else factor * params.L / slow


def check_finite_exit(result, params=None, law=None, budget_factor: float = 10.0) -> TheoremReport:
    params = params or result.params
    law = law or result.law
    name = "finite_exit"
    t_end = float(result.trajectory.t[-1])
    if params.theta_c == 0:
        return TheoremReport(name, HYPOTHESIS_NOT_MET, np.nan, 0.0, detail="theta_c = 0 is outside the strict regime")
    if not initial_in_band(result, params):
        return TheoremReport(name, HYPOTHESIS_NOT_MET, np.nan, 0.0, detail="initial data outside the admissible band")
    if result.exit is not None:
        return TheoremReport(
            name, PASS, t_end - result.exit.t_star, 0.0, (result.exit.t_star, 0.0 if result.exit.side == "left" else params.L), f"exit on the {result.exit.side} at t*={result.exit.t_star:.10g}"
        )
    budget = exit_budget(law, params, budget_factor)
    if t_end < budget:
        return TheoremReport(name, INCONCLUSIVE, t_end - budget, 0.0, detail=f"no exit by t_end={t_end:g}, budget {budget:.4g} not reached")
    return TheoremReport(name, FAIL, t_end - budget, 0.0, detail=f"no exit by t_end={t_end:g} >= budget {budget:.4g}")


def fit_decay_rate(times, norms) -> float:
    """Least-squares slope of ``-log(norm)`` against time."""
    slope = np.polyfit(np.asarray(times, dtype=float), np.log(np.asarray(norms, dtype=float)), 1)[0]
    return float(-slope)


def check_l2_decay(result, params=None, rel_tol: float = DECAY_REL_TOL, min_snapshots: int = MIN_POST_EXIT_SNAPSHOTS) -> TheoremReport:
    """Exponential fit of ``||theta||_2`` after exit against the first Dirichlet eigenvalue.

    The target rate ``K pi^2 / (gamma rho0 L^2)`` is a sharpening: the
    continuum statement only says the norm tends to zero.
    """
    params = params or result.params
    name = "l2_decay"
    norms = result.l2_norms()
    if np.all(norms == 0):
        return TheoremReport(name, PASS, 0.0, rel_tol, detail="field identically zero")
    if result.exit is None:
        return TheoremReport(name, INCONCLUSIVE, np.nan, rel_tol, detail="no exit, post-exit regime not reached")
    post = (result.snapshot_times > result.exit.t_star) & (norms > 0)
    if np.count_nonzero(post) < min_snapshots:
        return TheoremReport(name, INCONCLUSIVE, np.nan, rel_tol, detail=f"only {np.count_nonzero(post)} post-exit snapshots (need {min_snapshots})")
    rate = fit_decay_rate(result.snapshot_times[post], norms[post])
    target = params.decay_rate
    rel = abs(rate / target - 1.0)
    margin = rel_tol - rel
    verdict = PASS if rate > 0 and margin >= 0 else FAIL
    return TheoremReport(name, verdict, margin, rel_tol, detail=f"fitted rate {rate:.6g}, target {target:.6g} (relative error {rel:.3%})")


def energy_residuals(ledger: dict) -> tuple[np.ndarray, np.ndarray, float]:
    """Per-step and cumulative residuals recomputed from the ledger columns, plus the scale."""
    stored = np.asarray(ledger["stored"], dtype=float)
    flux = np.asarray(ledger["flux_cum"], dtype=float)
    latent = np.asarray(ledger["latent_cum"], dtype=float)
    step = np.diff(stored) + np.diff(flux) - np.diff(latent)
    cum = (stored - stored[0]) + flux - latent
    scale = max(np.max(np.abs(stored)), np.max(np.abs(flux)), np.max(np.abs(latent)), np.finfo(float).tiny)
    return step, cum, float(scale)


def check_energy_balance(result, params=None, step_tol: float = ENERGY_STEP_TOL, cum_tol: float = ENERGY_CUM_TOL) -> TheoremReport:
    name = "energy_balance"
    ledger = result.energy.arrays() if hasattr(result.energy, "arrays") else result.energy
    if len(ledger["stored"]) < 2:
        return TheoremReport(name, INCONCLUSIVE, np.nan, step_tol, detail="empty ledger")
    step, cum, scale = energy_residuals(ledger)
    worst_step = float(np.max(np.abs(step))) / scale
    worst_cum = float(np.max(np.abs(cum))) / scale
    margin = min(step_tol - worst_step, cum_tol - worst_cum)
    k = int(np.argmax(np.abs(step)))
    verdict = PASS if worst_step <= step_tol and worst_cum <= cum_tol else FAIL
    return TheoremReport(
        name, verdict, margin, step_tol, (float(ledger["t"][k + 1]), 0.0), f"max relative step residual {worst_step:.3e}, cumulative {worst_cum:.3e} (scale {scale:.3e})"
    )


def run_all_checks(result, params=None, law=None) -> list[TheoremReport]:
    params = params or result.params
    law = law or result.law
    return [
        check_max_principle(result, params),
        check_monotone_interface(result, params),
        check_speed_bound(result, params, law),
        check_finite_exit(result, params, law),
        check_l2_decay(result, params),
        check_energy_balance(result, params),
    ]
