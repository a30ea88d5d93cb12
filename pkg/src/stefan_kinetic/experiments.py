"""Verification studies shared by the acceptance tests and ``scripts/``."""

from __future__ import annotations

import numpy as np

from .core import Grid1D, InterfaceTrajectory, make_params
from .laminate import entropy_source_identity, moving_mask_audit, random_compatible_spec, reconstruct_deformation
from .oracle import decaying_sine, neumann_comparison, observed_orders, solve_neumann
from .scenarios import get_scenario
from .solver import SolverConfig, run
from .velocity import LinearLaw

UNIT = dict(rho0=1.0, gamma=1.0, alpha=1.0, K=1.0, L=1.0)


def manufactured_error(n_cells: int, dt: float, scheme: str, t_end: float = 1.0, u0: float = 0.3, speed: float = 0.1) -> float:
    """Max nodal error at ``t_end`` against ``exp(-t) sin(pi s)`` with a prescribed moving source."""
    params = make_params(dict(UNIT, theta_T=2.0, theta_B=1.0))
    grid = Grid1D(n_cells, params.L)
    mf = decaying_sine(params, u0, speed)
    cfg = SolverConfig(dt=dt, t_end=t_end, diffusion_scheme=scheme, stride=10**9)
    res = run(lambda s: mf.theta_exact(s, 0.0), u0, params, LinearLaw(1.0, params.theta_T), cfg, grid, forcing=mf, prescribed_u=mf.u)
    return float(np.max(np.abs(res.final_field - mf.theta_exact(grid.nodes, t_end))))


def spatial_orders(scheme: str, levels=(64, 128, 256)) -> np.ndarray:
    """Observed orders in ``ds`` with ``dt`` shrunk fast enough that time error is negligible."""
    errs = []
    for n in levels:
        if scheme == "crank_nicolson":
            dt = 1e-3 / (n / 64) ** 2
        else:
            dt = 0.25 / n**2
        errs.append(manufactured_error(n, dt, scheme))
    return observed_orders([1.0 / n for n in levels], errs)


def temporal_orders(scheme: str, dts=None, n_cells=None) -> np.ndarray:
    if scheme == "crank_nicolson":
        dts, n_cells = dts or (0.1, 0.05, 0.025), n_cells or 2048
    else:
        dts, n_cells = dts or (0.02, 0.01, 0.005), n_cells or 1024
    errs = [manufactured_error(n_cells, dt, scheme) for dt in dts]
    return observed_orders(dts, errs)


def mollified_vs_sharp(n_cells: int = 512, factors=(8, 4, 2), t_end: float = 0.3, variant: str = "interface", profile: str = "bump") -> list[float]:
    """``L2(0,T;L2)`` distance between sharp and mollified runs of the baseline, per ``epsilon = f ds``."""
    params = make_params(dict(UNIT, theta_T=2.0, theta_B=1.0))
    grid = Grid1D(n_cells, params.L)
    law = LinearLaw(5.0, params.theta_T)

    def theta0(s):
        return params.theta_c * np.sin(np.pi * s)

    def go(**kw):
        return run(theta0, 0.3, params, law, SolverConfig(dt=grid.ds, t_end=t_end, **kw), grid)

    sharp = go()
    out = []
    for f in factors:
        moll = go(source_mode="mollified", epsilon=f * grid.ds, velocity_variant=variant, mollifier_profile=profile)
        diff2 = np.sum((sharp.snapshots - moll.snapshots) ** 2, axis=1) * grid.ds
        out.append(float(np.sqrt(np.sum(diff2[1:]) * grid.ds)))  # snapshot spacing is dt = ds
    return out


def stiff_limit_gaps(k_values=None) -> tuple[list[float], float]:
    """Sup-norm gaps to the Neumann trajectory over its validity horizon, one per ``k``."""
    sc = get_scenario("stiff-kinetics")
    rc = sc.config()
    sol = solve_neumann(rc.params, rc.u0)
    horizon = sol.validity_horizon(rc.params.L)
    gaps = [neumann_comparison(sc.run_with_k(k), sol, horizon)["sup_gap"] for k in (k_values or sc.k_values)]
    return gaps, sol.lam


def laminate_trials(n_trials: int = 1000, seed: int = 0) -> dict:
    """Randomized compatible laminates carried along a smooth interface path."""
    rng = np.random.default_rng(seed)
    t = np.linspace(0.0, 1.0, 65)
    u = 0.2 + 0.3 * t + 0.2 * t**2
    traj = InterfaceTrajectory.from_arrays(t, u, v=0.3 + 0.4 * t)
    worst_rt = worst_cont = worst_lip = 0.0
    mm_fail = 0
    for _ in range(n_trials):
        spec, planted = random_compatible_spec(rng, a_norm=rng.uniform(0.01, 10.0))
        worst_rt = max(worst_rt, float(np.max(np.abs(np.outer(spec.a, spec.n) - planted))))
        for snap in reconstruct_deformation(traj, spec):
            worst_cont = max(worst_cont, snap.continuity_gap())
            # a point on the interface approached from either side
            x = snap.u * snap.n
            below = snap(x - 1e-9 * snap.n)
            above = snap(x + 1e-9 * snap.n)
            worst_lip = max(worst_lip, float(np.linalg.norm(above - below)) / 2e-9 - snap.lipschitz_bound())
        if not moving_mask_audit(traj, spec, L=1.0, v_max=0.7).all_pass:
            mm_fail += 1
    return {"roundtrip": worst_rt, "continuity": worst_cont, "lipschitz_excess": worst_lip, "mm_failures": mm_fail}


def entropy_residual_ratio(n_samples: int = 200, n_cells: int = 4096) -> tuple[float, float, float]:
    """Max entropy-source residual at ``dt`` and ``dt/2`` along ``u = 0.2 + 0.3 t + 0.2 t^2``."""
    grid = Grid1D(n_cells, 1.0)

    def psi(s):
        return np.cos(np.pi * s)

    def worst(m):
        t = np.linspace(0.0, 1.0, m + 1)
        traj = InterfaceTrajectory.from_arrays(t, 0.2 + 0.3 * t + 0.2 * t**2, v=0.3 + 0.4 * t)
        return float(np.max(np.abs(entropy_source_identity(traj, psi, grid))))

    a, b = worst(n_samples), worst(2 * n_samples)
    return a, b, a / b
