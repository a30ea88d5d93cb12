"""Shared types: material constants, the uniform mesh, fields and interface history."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

import numpy as np

from .errors import BoundaryMismatch, ConfigError, MissingKey, NonPositiveParameter

PARAM_KEYS = ("rho0", "gamma", "alpha", "K", "theta_T", "theta_B", "L")
_STRICTLY_POSITIVE = ("rho0", "gamma", "K", "L", "theta_T", "theta_B")

BOUNDARY_TOL = 1e-12


@dataclass(frozen=True)
class PhysicalParams:
    """Material and geometry constants of the 1D sample.

    All temperatures are absolute; ``theta_c`` is the critical temperature
    measured from the boundary value, and its sign selects whether the
    martensite region grows (``theta_c > 0``) or shrinks (``theta_c < 0``).
    """

    rho0: float
    gamma: float
    alpha: float
    K: float
    theta_T: float
    theta_B: float
    L: float

    def __post_init__(self):
        for key in _STRICTLY_POSITIVE:
            value = getattr(self, key)
            if not np.isfinite(value) or value <= 0:
                raise NonPositiveParameter(key, value)
        if not np.isfinite(self.alpha) or self.alpha < 0:
            raise NonPositiveParameter("alpha", self.alpha)

    @property
    def theta_c(self) -> float:
        return self.theta_T - self.theta_B

    @property
    def heat_capacity(self) -> float:
        """Volumetric heat capacity gamma * rho0."""
        return self.gamma * self.rho0

    @property
    def diffusivity(self) -> float:
        return self.K / (self.gamma * self.rho0)

    @property
    def decay_rate(self) -> float:
        """First Dirichlet eigenvalue of the plain heat equation on (0, L)."""
        return self.K * np.pi**2 / (self.gamma * self.rho0 * self.L**2)

    def as_dict(self) -> dict:
        return {key: getattr(self, key) for key in PARAM_KEYS}


def make_params(raw: Mapping[str, float]) -> PhysicalParams:
    """Build validated parameters from a key-value mapping.

    >>> make_params(dict(rho0=1, gamma=1, alpha=1, K=1, theta_T=1, theta_B=0.5, L=1)).theta_c
    0.5
    """
    values = {}
    for key in PARAM_KEYS:
        if key not in raw:
            raise MissingKey(key)
        values[key] = float(raw[key])
    return PhysicalParams(**values)


UNIT_PRESET = dict(rho0=1.0, gamma=1.0, alpha=1.0, K=1.0, theta_T=1.0, theta_B=0.5, L=1.0)


@dataclass(frozen=True)
class Grid1D:
    n_cells: int
    L: float = 1.0

    def __post_init__(self):
        if int(self.n_cells) != self.n_cells or self.n_cells < 4:
            raise ValueError(f"n_cells must be an integer >= 4, got {self.n_cells}")
        if not self.L > 0:
            raise NonPositiveParameter("L", self.L)

    @property
    def ds(self) -> float:
        return self.L / self.n_cells

    @property
    def nodes(self) -> np.ndarray:
        # i * ds rather than linspace so that node i sits at exactly i*ds
        s = np.arange(self.n_cells + 1) * self.ds
        s[-1] = self.L
        return s

    @property
    def n_nodes(self) -> int:
        return self.n_cells + 1

    def locate(self, u: float) -> tuple[int, float]:
        """Cell index ``j`` and fractional offset ``xi`` with ``u = (j + xi) * ds``."""
        x = u / self.ds
        j = min(max(int(np.floor(x)), 0), self.n_cells - 1)
        return j, x - j


@dataclass
class TemperatureField:
    """Nodal rescaled temperature (physical minus boundary value)."""

    values: np.ndarray
    grid: Grid1D

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.grid.n_nodes,):
            raise ValueError(
                f"field has shape {self.values.shape}, grid expects ({self.grid.n_nodes},)"
            )
        if not np.all(np.isfinite(self.values)):
            raise ValueError("temperature field contains non-finite values")
        if self.values[0] != 0.0 or self.values[-1] != 0.0:
            raise BoundaryMismatch(
                f"rescaled boundary values must be 0, got {self.values[0]}, {self.values[-1]}"
            )

    def physical(self, params: PhysicalParams) -> np.ndarray:
        return self.values + params.theta_B

    def l2_norm(self) -> float:
        return float(np.sqrt(self.grid.ds * np.sum(self.values**2)))

    @classmethod
    def from_function(cls, func, grid: Grid1D) -> "TemperatureField":
        values = np.asarray(func(grid.nodes), dtype=float) * np.ones(grid.n_nodes)
        values[0] = values[-1] = 0.0
        return cls(values, grid)


def rescale_temperature(theta_physical, params: PhysicalParams, grid: Grid1D) -> TemperatureField:
    """Convert a nodal physical temperature to the rescaled field.

    Boundary nodes must match ``theta_B`` to within 1e-12 and are then set to
    zero exactly.
    """
    theta = np.asarray(theta_physical, dtype=float)
    if theta.shape != (grid.n_nodes,):
        raise ValueError(f"field has shape {theta.shape}, grid expects ({grid.n_nodes},)")
    for side, value in (("left", theta[0]), ("right", theta[-1])):
        if abs(value - params.theta_B) >= BOUNDARY_TOL:
            raise BoundaryMismatch(
                f"{side} boundary temperature {value!r} differs from theta_B={params.theta_B!r}"
            )
    values = theta - params.theta_B
    values[0] = values[-1] = 0.0
    return TemperatureField(values, grid)


@dataclass
class InterfaceState:
    """Position of the phase interface and its gate.

    Once the interface touches either end of the sample the gate closes for
    good and the position is frozen.
    """

    u: float
    t: float = 0.0
    active: bool = True

    def advance(self, u_new: float, t_new: float, L: float) -> None:
        if not self.active:
            self.t = t_new
            return
        if u_new <= 0.0:
            self.u, self.active = 0.0, False
        elif u_new >= L:
            self.u, self.active = L, False
        else:
            self.u = u_new
        self.t = t_new


@dataclass
class InterfaceTrajectory:
    """Time history of the interface: samples ``(t, u, theta_bar(u), v, gate)``.

    ``v[k]`` is the velocity applied over the step starting at ``t[k]``.
    """

    t: list = field(default_factory=list)
    u: list = field(default_factory=list)
    theta_at_u: list = field(default_factory=list)
    v: list = field(default_factory=list)
    gate: list = field(default_factory=list)

    def append(self, t, u, theta_at_u, v, gate) -> None:
        self.t.append(float(t))
        self.u.append(float(u))
        self.theta_at_u.append(float(theta_at_u))
        self.v.append(float(v))
        self.gate.append(bool(gate))

    def __len__(self):
        return len(self.t)

    def arrays(self) -> dict[str, np.ndarray]:
        return {
            "t": np.asarray(self.t, dtype=float),
            "u": np.asarray(self.u, dtype=float),
            "theta_at_u": np.asarray(self.theta_at_u, dtype=float),
            "v": np.asarray(self.v, dtype=float),
            "gate": np.asarray(self.gate, dtype=bool),
        }

    @classmethod
    def from_arrays(cls, t, u, theta_at_u=None, v=None, gate=None) -> "InterfaceTrajectory":
        t = np.asarray(t, dtype=float)
        u = np.asarray(u, dtype=float)
        n = len(t)
        theta_at_u = np.zeros(n) if theta_at_u is None else np.asarray(theta_at_u, dtype=float)
        if v is None:
            v = np.zeros(n)
            if n > 1:
                v[:-1] = np.diff(u) / np.diff(t)
        gate = np.ones(n, dtype=bool) if gate is None else np.asarray(gate, dtype=bool)
        traj = cls()
        traj.t, traj.u = list(t), list(u)
        traj.theta_at_u, traj.v, traj.gate = list(theta_at_u), list(np.asarray(v, float)), list(gate)
        return traj

    def lipschitz_violations(self, v_max: float, L: float, slack: float = 1e-12) -> list[int]:
        """Indices ``k`` where a sample breaks time ordering, the domain, or the speed bound."""
        a = self.arrays()
        bad = []
        for k in range(len(a["t"])):
            if not (-slack <= a["u"][k] <= L + slack):
                bad.append(k)
                continue
            if k + 1 < len(a["t"]):
                dt = a["t"][k + 1] - a["t"][k]
                if dt <= 0 or abs(a["u"][k + 1] - a["u"][k]) > v_max * dt * (1 + slack) + slack:
                    bad.append(k)
        return bad


def read_two_columns(path) -> tuple[np.ndarray, np.ndarray]:
    """Two numeric columns separated by commas or whitespace; ``#`` comments and one header line allowed."""
    rows = []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.replace(",", " ").split()
        if len(parts) != 2:
            raise ConfigError(f"{path}:{lineno}: expected two columns, got {len(parts)}")
        try:
            rows.append((float(parts[0]), float(parts[1])))
        except ValueError:
            if rows:
                raise ConfigError(f"{path}:{lineno}: non-numeric entry") from None
    if not rows:
        raise ConfigError(f"{path}: no data rows")
    arr = np.array(rows, dtype=float)
    return arr[:, 0], arr[:, 1]
