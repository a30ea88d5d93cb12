"""Reference solutions that do not depend on the time stepper.

* :func:`solve_neumann` - classical two-phase similarity solution (the
  infinitely stiff kinetic limit) on the whole line.
* :func:`manufactured_forcing` - source terms for a prescribed smooth
  temperature and interface motion.
* :func:`fine_grid_reference` - self-convergence studies over registered
  scenarios.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy import optimize, special

from .core import PhysicalParams
from .errors import NoBracket, NonConverging

SQRT_PI = np.sqrt(np.pi)


def neumann_residual(lam, params: PhysicalParams, theta_left: float, theta_right: float, alpha=None):
    """Stefan balance at the interface for growth coefficient ``lam``.

    With ``x = (s - u0) / (2 sqrt(D t))`` the left phase is
    ``theta_left + (theta_T - theta_left) erfc(-x) / erfc(-lam)`` and the right
    phase ``theta_right + (theta_T - theta_right) erfc(x) / erfc(lam)``.  The
    jump in conductive flux must carry the latent heat ``alpha * u'``, which
    after cancelling common factors reads

        alpha sqrt(pi) lam = gamma rho0 [ (theta_T - theta_left) / erfcx(-lam)
                                         + (theta_T - theta_right) / erfcx(lam) ]

    Written with the scaled complementary error function so it stays finite
    for large ``|lam|``.
    """
    alpha = params.alpha if alpha is None else alpha
    lam = np.asarray(lam, dtype=float)
    c = params.heat_capacity
    rhs = c * ((params.theta_T - theta_left) / special.erfcx(-lam) + (params.theta_T - theta_right) / special.erfcx(lam))
    return alpha * SQRT_PI * lam - rhs


@dataclass(frozen=True)
class NeumannSolution:
    lam: float
    diffusivity: float
    u0: float
    theta_T: float
    theta_left: float
    theta_right: float
    residual: float

    def position(self, t):
        return self.u0 + 2.0 * self.lam * np.sqrt(self.diffusivity * np.asarray(t, dtype=float))

    def velocity(self, t):
        t = np.asarray(t, dtype=float)
        return self.lam * np.sqrt(self.diffusivity / t)

    def temperature(self, s, t):
        """Physical temperature profile at time ``t > 0``."""
        s = np.asarray(s, dtype=float)
        x = (s - self.u0) / (2.0 * np.sqrt(self.diffusivity * t))
        left = self.theta_left + (self.theta_T - self.theta_left) * special.erfc(-x) / special.erfc(-self.lam)
        right = self.theta_right + (self.theta_T - self.theta_right) * special.erfc(x) / special.erfc(self.lam)
        return np.where(x < self.lam, left, right)

    def validity_horizon(self, L: float) -> float:
        """Latest time with diffusion length ``sqrt(D t)`` below ``min(u0, L - u0) / 2``."""
        reach = 0.5 * min(self.u0, L - self.u0)
        return reach**2 / self.diffusivity


def _bracket(f, lo=-1.0, hi=1.0, limit=64.0):
    flo, fhi = f(lo), f(hi)
    while np.sign(flo) == np.sign(fhi):
        if hi >= limit:
            raise NoBracket("no sign change of the Neumann balance in [-64, 64]")
        lo, hi = 2 * lo, 2 * hi
        flo, fhi = f(lo), f(hi)
    return lo, hi


def solve_neumann(
    params: PhysicalParams,
    u0: float,
    theta_left: Optional[float] = None,
    theta_right: Optional[float] = None,
    method: str = "bisect",
    alpha: Optional[float] = None,
) -> NeumannSolution:
    """Growth coefficient of the similarity solution by bracketed root finding.

    Far-field temperatures default to ``theta_B`` on both sides.  ``method`` is
    ``"bisect"`` (bracketed bisection) or ``"secant"`` (unbracketed secant
    iteration started from the bracket midpoint); the two are independent
    cross-checks of each other.
    """
    theta_left = params.theta_B if theta_left is None else theta_left
    theta_right = params.theta_B if theta_right is None else theta_right

    def f(lam):
        return float(neumann_residual(lam, params, theta_left, theta_right, alpha))

    lo, hi = _bracket(f)
    if method == "bisect":
        lam = optimize.bisect(f, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=500)
    elif method == "secant":
        x0 = optimize.brentq(f, lo, hi, xtol=1e-3)
        lam = optimize.newton(f, x0, x1=x0 + 1e-4, tol=1e-15, maxiter=200)
    else:
        raise ValueError(f"unknown method {method!r}")
    res = f(lam)
    if abs(res) > 1e-12:
        raise NoBracket(f"root finder stopped with residual {res:.3e}")
    return NeumannSolution(
        lam=float(lam),
        diffusivity=params.diffusivity,
        u0=u0,
        theta_T=params.theta_T,
        theta_left=theta_left,
        theta_right=theta_right,
        residual=float(res),
    )


@dataclass
class ManufacturedForcing:
    """Source terms making ``theta_exact`` an exact solution for the interface path ``u``.

    ``smooth`` is the regular part ``gamma rho0 d_t theta - K d_ss theta``;
    ``interface_heat`` cancels the latent heat the solver deposits at the
    moving interface over a step.
    """

    theta_exact: Callable
    theta_t: Callable
    theta_ss: Callable
    u: Callable
    params: PhysicalParams

    def smooth(self, s, t):
        p = self.params
        return p.heat_capacity * self.theta_t(s, t) - p.K * self.theta_ss(s, t)

    def interface_heat(self, t0, t1):
        return -self.params.alpha * (self.u(t1) - self.u(t0))

    def delta_strength(self, t, h=1e-7):
        """Coefficient of ``delta(s - u(t))`` in the forcing, ``-alpha u'(t)``."""
        return -self.params.alpha * (self.u(t + h) - self.u(t - h)) / (2 * h)


def manufactured_forcing(u_prescribed, theta_exact, params: PhysicalParams, theta_t=None, theta_ss=None):
    """Forcing for a prescribed solution.

    ``theta_t`` and ``theta_ss`` are the analytic derivatives; when omitted
    they are taken by central differences with steps 1e-5 (time) and 1e-4
    (space).
    """
    if theta_t is None:
        def theta_t(s, t, h=1e-5):
            return (theta_exact(s, t + h) - theta_exact(s, t - h)) / (2 * h)
    if theta_ss is None:
        def theta_ss(s, t, h=1e-4):
            return (theta_exact(s + h, t) - 2 * theta_exact(s, t) + theta_exact(s - h, t)) / h**2
    return ManufacturedForcing(theta_exact, theta_t, theta_ss, u_prescribed, params)


def decaying_sine(params: PhysicalParams, u0: float = 0.3, speed: float = 0.1) -> ManufacturedForcing:
    """``theta = exp(-t) sin(pi s / L)`` with ``u = u0 + speed * t``."""
    k = np.pi / params.L

    def theta(s, t):
        return np.exp(-t) * np.sin(k * np.asarray(s))

    def theta_t(s, t):
        return -np.exp(-t) * np.sin(k * np.asarray(s))

    def theta_ss(s, t):
        return -(k**2) * np.exp(-t) * np.sin(k * np.asarray(s))

    return ManufacturedForcing(theta, theta_t, theta_ss, lambda t: u0 + speed * t, params)


def observed_orders(hs, errors):
    """Pairwise orders ``log(e_i / e_{i+1}) / log(h_i / h_{i+1})``."""
    hs = np.asarray(hs, dtype=float)
    errors = np.asarray(errors, dtype=float)
    return np.log(errors[:-1] / errors[1:]) / np.log(hs[:-1] / hs[1:])


@dataclass
class ConvergenceTable:
    scenario: str
    n_cells: list
    t_star: list
    l2_final: list
    gaps: list
    ratios: list
    richardson_t_star: Optional[float]

    def rows(self):
        for i, n in enumerate(self.n_cells):
            yield {
                "n_cells": n,
                "t_star": self.t_star[i],
                "l2_final": self.l2_final[i],
                "gap": self.gaps[i - 1] if 0 < i <= len(self.gaps) else float("nan"),
                "ratio": self.ratios[i - 2] if 1 < i <= len(self.ratios) + 1 else float("nan"),
            }


def richardson(values, ratio: float = 2.0, order: float = 1.0) -> float:
    """Extrapolate the last two entries of a sequence refined by ``ratio``."""
    a, b = values[-2], values[-1]
    f = ratio**order
    return b + (b - a) / (f - 1.0)


def fine_grid_reference(scenario, levels=(512, 1024, 2048), check: bool = True):
    """Run ``scenario`` at each resolution and tabulate exit times and norms.

    ``scenario`` is a :class:`~stefan_kinetic.scenarios.Scenario` or a
    catalog id.  Raises :class:`NonConverging` if ``check`` and successive
    exit-time differences fail to shrink.
    """
    from .scenarios import get_scenario

    if isinstance(scenario, str):
        scenario = get_scenario(scenario)
    results, t_star, l2 = [], [], []
    for n in levels:
        res = scenario.run(n_cells=n)
        results.append(res)
        t_star.append(res.exit.t_star if res.exit is not None else None)
        l2.append(float(res.l2_norms()[-1]))
    gaps, ratios, extrap = [], [], None
    if all(t is not None for t in t_star):
        gaps = [abs(t_star[i + 1] - t_star[i]) for i in range(len(t_star) - 1)]
        ratios = [gaps[i] / gaps[i + 1] if gaps[i + 1] > 0 else np.inf for i in range(len(gaps) - 1)]
        if len(t_star) >= 2:
            extrap = richardson(t_star)
        if check and any(gaps[i + 1] >= gaps[i] for i in range(len(gaps) - 1)):
            raise NonConverging(f"exit-time differences {gaps} do not decrease")
    table = ConvergenceTable(scenario.name, list(levels), t_star, l2, gaps, ratios, extrap)
    return results[-1], table


def neumann_comparison(result, solution: NeumannSolution, horizon: Optional[float] = None) -> dict:
    """Simulated against similarity interface positions up to ``horizon``.

    ``horizon`` defaults to the oracle's validity horizon.  Returns columns
    ``t, u_sim, u_neumann, gap`` and the sup-norm gap.
    """
    if horizon is None:
        horizon = solution.validity_horizon(result.params.L)
    a = result.trajectory.arrays()
    keep = a["t"] <= horizon * (1 + 1e-12)
    t, u = a["t"][keep], a["u"][keep]
    un = solution.position(t)
    gap = np.abs(u - un)
    return {"t": t, "u_sim": u, "u_neumann": un, "gap": gap, "sup_gap": float(np.max(gap)) if len(gap) else float("nan")}
