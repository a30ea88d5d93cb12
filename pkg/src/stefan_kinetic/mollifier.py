"""Smoothed point source: compactly supported, positive, unit-mass kernels."""

from __future__ import annotations

from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np
from scipy.integrate import quad

from .core import Grid1D
from .errors import UnresolvableWidth

PROFILES = ("bump", "cosine")


def _bump_shape(x):
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    inside = np.abs(x) < 1.0
    out[inside] = np.exp(-1.0 / (1.0 - x[inside] ** 2))
    return out


@lru_cache(maxsize=None)
def bump_mass() -> float:
    """Integral of ``exp(-1/(1-x^2))`` over (-1, 1)."""
    value, _ = quad(lambda x: float(_bump_shape(np.array([x]))[0]), -1.0, 1.0, epsabs=0.0, epsrel=1e-13, limit=200)
    return value


def kernel(x, epsilon: float, profile: str = "bump"):
    """Continuous unit-mass kernel of half-width ``epsilon`` centred at 0."""
    x = np.asarray(x, dtype=float)
    if profile == "bump":
        return _bump_shape(x / epsilon) / (epsilon * bump_mass())
    if profile == "cosine":
        return np.where(np.abs(x) < epsilon, (1.0 + np.cos(np.pi * x / epsilon)) / (2.0 * epsilon), 0.0)
    raise ValueError(f"unknown mollifier profile {profile!r}")


@dataclass(frozen=True)
class MollifiedDirac:
    epsilon: float
    center: float
    profile: str = "bump"

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")
        if self.profile not in PROFILES:
            raise ValueError(f"unknown mollifier profile {self.profile!r}")

    def density(self, s):
        return kernel(np.asarray(s, dtype=float) - self.center, self.epsilon, self.profile)

    def moved(self, center: float) -> "MollifiedDirac":
        return replace(self, center=center)


def evaluate_on_grid(d: MollifiedDirac, grid: Grid1D) -> np.ndarray:
    """Nodal weights ``w`` with ``sum(w) * ds == 1`` and zero boundary entries.

    Mass overhanging either end of the domain is mirrored back inside, then
    whatever lands on a boundary node is moved to its interior neighbour.
    """
    ds = grid.ds
    if d.epsilon < 2 * ds:
        raise UnresolvableWidth(f"epsilon={d.epsilon} is below 2*ds={2 * ds}")
    if not 0.0 <= d.center <= grid.L:
        raise ValueError(f"center {d.center} outside [0, {grid.L}]")
    s = grid.nodes
    c, eps = d.center, d.epsilon
    w = d.density(s)
    if c - eps < 0.0:
        w = w + d.density(-s)
    if c + eps > grid.L:
        w = w + d.density(2.0 * grid.L - s)
    w[1] += w[0]
    w[-2] += w[-1]
    w[0] = w[-1] = 0.0
    return w / (np.sum(w) * ds)


def weak_star_consistency(d: MollifiedDirac, psi, grid: Grid1D) -> float:
    """Discrete pairing ``sum_i w_i psi(s_i) ds``; tends to ``psi(center)`` as epsilon -> 0.

    ``psi`` is either nodal values or a callable of the node positions.
    """
    values = psi(grid.nodes) if callable(psi) else np.asarray(psi, dtype=float)
    w = evaluate_on_grid(d, grid)
    return float(np.sum(w * values) * grid.ds)
