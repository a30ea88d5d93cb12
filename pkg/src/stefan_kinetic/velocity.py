"""Kinetic laws ``theta -> v(theta)`` for the interface velocity.

Every law is positive below ``theta_T`` (martensite grows), negative above
it, and zero at ``theta_T``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import read_two_columns
from .errors import ConfigError, SignConditionViolated


@dataclass(frozen=True)
class LinearLaw:
    """``v = k (theta_T - theta)``; the classical Stefan closure is the limit k -> inf."""

    k: float
    theta_T: float
    kind = "linear"

    def __post_init__(self):
        if not self.k > 0:
            raise ConfigError(f"linear law stiffness k must be positive, got {self.k}")

    def __call__(self, theta):
        return self.k * (self.theta_T - np.asarray(theta, dtype=float))

    @property
    def v_max(self):
        return None

    def lipschitz_constant(self) -> float:
        return float(self.k)


@dataclass(frozen=True)
class SaturatedLaw:
    """``v = v_max tanh((theta_T - theta) / scale)``, bounded by ``v_max``."""

    v_max: float
    scale: float
    theta_T: float
    kind = "saturated"

    def __post_init__(self):
        if not (self.v_max > 0 and self.scale > 0):
            raise ConfigError("saturated law needs v_max > 0 and scale > 0")

    def __call__(self, theta):
        return self.v_max * np.tanh((self.theta_T - np.asarray(theta, dtype=float)) / self.scale)

    def lipschitz_constant(self) -> float:
        return self.v_max / self.scale


class TableLaw:
    """Piecewise-linear law through tabulated ``(theta, v)`` points.

    Held constant beyond the first and last abscissa.  Construction only checks
    that the abscissae are strictly increasing; use
    :func:`validate_sign_condition` (or :func:`load_table`, which calls it) to
    reject tables that break the sign pattern.
    """

    kind = "table"

    def __init__(self, theta, v, theta_T: float):
        theta = np.asarray(theta, dtype=float)
        v = np.asarray(v, dtype=float)
        if theta.ndim != 1 or theta.shape != v.shape or len(theta) < 2:
            raise ConfigError("table needs at least two (theta, v) pairs")
        if not (np.all(np.isfinite(theta)) and np.all(np.isfinite(v))):
            raise ConfigError("table contains non-finite entries")
        if np.any(np.diff(theta) <= 0):
            raise ConfigError("table abscissae must be strictly increasing")
        self.theta = theta
        self.v = v
        self.theta_T = float(theta_T)

    def __call__(self, theta):
        return np.interp(np.asarray(theta, dtype=float), self.theta, self.v)

    @property
    def v_max(self) -> float:
        return float(np.max(np.abs(self.v)))

    def lipschitz_constant(self) -> float:
        return float(np.max(np.abs(np.diff(self.v) / np.diff(self.theta))))

    def is_monotone(self) -> bool:
        return bool(np.all(np.diff(self.v) <= 0))

    def __repr__(self):
        return f"TableLaw(n={len(self.theta)}, theta_T={self.theta_T})"


def max_speed(law, theta_lo: float, theta_hi: float, samples: int = 2001) -> float:
    """Largest ``|v|`` on a closed temperature interval (sampled, endpoints included)."""
    grid = np.linspace(theta_lo, theta_hi, samples)
    if law.kind == "table":
        grid = np.union1d(grid, law.theta[(law.theta >= theta_lo) & (law.theta <= theta_hi)])
    return float(np.max(np.abs(law(grid))))


def evaluate(law, theta):
    """Velocity for a scalar or array temperature."""
    out = law(theta)
    return float(out) if np.ndim(out) == 0 else out


def lipschitz_constant(law) -> float:
    return law.lipschitz_constant()


@dataclass
class SignReport:
    passed: bool
    samples: int
    theta_range: tuple[float, float]
    min_margin: float


def validate_sign_condition(law, m: int = 1001, delta: float = 1.0, zero_tol: float = 1e-14):
    """Sample ``law`` on ``[theta_T - delta, theta_T + delta]`` and check its sign pattern.

    Raises :class:`SignConditionViolated` at the first offending sample (in
    increasing temperature order); returns a :class:`SignReport` otherwise.
    Samples that coincide with ``theta_T`` must give ``|v| <= zero_tol``.
    """
    if m < 3:
        raise ValueError("need at least 3 samples")
    theta_T = law.theta_T
    thetas = np.linspace(theta_T - delta, theta_T + delta, m)
    values = np.asarray(law(thetas), dtype=float)
    margin = np.inf
    for theta, value in zip(thetas, values):
        gap = theta_T - theta
        if gap > 0:
            ok = value > 0
        elif gap < 0:
            ok = value < 0
        else:
            ok = abs(value) <= zero_tol
        if not ok:
            raise SignConditionViolated(float(theta), float(value))
        if gap != 0:
            margin = min(margin, abs(value))
    if law.kind == "table" and not law.is_monotone():
        # sampling may step over a short excursion; the table nodes themselves must not
        for theta, value in zip(law.theta, law.v):
            if (theta < theta_T and value <= 0) or (theta > theta_T and value >= 0):
                raise SignConditionViolated(float(theta), float(value))
    return SignReport(True, m, (float(thetas[0]), float(thetas[-1])), float(margin))


def load_table(path, theta_T: float, validate: bool = True) -> TableLaw:
    """Read a two-column ``theta v`` text file (whitespace or comma separated, '#' comments)."""
    theta, v = read_two_columns(path)
    law = TableLaw(theta, v, theta_T)
    if validate:
        validate_sign_condition(law, delta=max(theta_T - law.theta[0], law.theta[-1] - theta_T))
        if not law.is_monotone():
            raise ConfigError(f"{path}: table velocities must be non-increasing in theta")
    return law


def make_law(kind: str, theta_T: float, **kw):
    """Construct a law from config values (``k`` / ``v_max``, ``scale`` / ``table``)."""
    if kind == "linear":
        return LinearLaw(k=float(kw["k"]), theta_T=theta_T)
    if kind == "saturated":
        return SaturatedLaw(v_max=float(kw["v_max"]), scale=float(kw["scale"]), theta_T=theta_T)
    if kind == "table":
        return load_table(kw["table"], theta_T)
    raise ConfigError(f"unknown law kind {kind!r}")
