"""Time stepping for the heat equation with a moving latent-heat source.

The unknowns are the rescaled nodal temperature (zero at both ends) and the
interface position ``u``.  Diffusion is implicit (backward Euler or
Crank-Nicolson); the latent heat ``alpha * du`` released while the interface
moves by ``du`` is deposited on the nodes either with linear two-node weights
(sharp mode) or with a mollified delta (mollified mode).

Energy bookkeeping per step::

    stored(n+1) - stored(n) + boundary_outflow * dt = alpha * du (+ forcing)

holds to rounding error because the deposition weights sum to exactly one and
the discrete Laplacian telescopes onto the two boundary fluxes.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .core import Grid1D, InterfaceState, InterfaceTrajectory, PhysicalParams, TemperatureField
from .errors import (
    ConfigError,
    InvalidInitialInterface,
    NonFiniteState,
    PicardDivergence,
)
from .mollifier import MollifiedDirac, evaluate_on_grid
from .tridiag import ConstantTridiagonal, apply_second_difference

SOURCE_MODES = ("sharp", "mollified")
COUPLINGS = ("imex", "picard")
SCHEMES = ("backward_euler", "crank_nicolson")
VELOCITY_VARIANTS = ("interface", "local")


@dataclass(frozen=True)
class SolverConfig:
    dt: float
    t_end: float
    source_mode: str = "sharp"
    epsilon: Optional[float] = None
    mollifier_profile: str = "bump"
    velocity_variant: str = "interface"
    coupling: str = "imex"
    max_iter: int = 50
    tol: float = 1e-12
    diffusion_scheme: str = "backward_euler"
    interpolation: str = "linear"
    stride: int = 1

    def __post_init__(self):
        if not self.dt > 0:
            raise ConfigError(f"solver.dt must be positive, got {self.dt}")
        if not self.t_end > 0:
            raise ConfigError(f"solver.t_end must be positive, got {self.t_end}")
        if self.source_mode not in SOURCE_MODES:
            raise ConfigError(f"solver.source_mode must be one of {SOURCE_MODES}")
        if self.source_mode == "mollified" and not (self.epsilon and self.epsilon > 0):
            raise ConfigError("mollified source mode needs solver.epsilon > 0")
        if self.coupling not in COUPLINGS:
            raise ConfigError(f"solver.coupling must be one of {COUPLINGS}")
        if self.diffusion_scheme not in SCHEMES:
            raise ConfigError(f"solver.diffusion_scheme must be one of {SCHEMES}")
        if self.velocity_variant not in VELOCITY_VARIANTS:
            raise ConfigError(f"solver.velocity_variant must be one of {VELOCITY_VARIANTS}")
        if self.interpolation != "linear":
            raise ConfigError("only linear interpolation is supported")
        if not self.tol > 0 or self.max_iter < 1:
            raise ConfigError("picard needs tol > 0 and max_iter >= 1")
        if self.stride < 1:
            raise ConfigError("output stride must be >= 1")

    @property
    def n_steps(self) -> int:
        return int(round(self.t_end / self.dt))


def default_dt(grid: Grid1D, params: PhysicalParams, explicit: bool = False) -> float:
    """``ds`` for implicit runs; ``0.25 ds^2 gamma rho0 / K`` for explicit diagnostics."""
    if explicit:
        return 0.25 * grid.ds**2 * params.heat_capacity / params.K
    return grid.ds


def interpolate_at_interface(values: np.ndarray, grid: Grid1D, u: float) -> float:
    """Linear interpolation of nodal values at ``u``; exact at the nodes."""
    j, xi = grid.locate(u)
    if xi == 0.0:
        return float(values[j])
    return float((1.0 - xi) * values[j] + xi * values[j + 1])


def sharp_weights(grid: Grid1D, u: float) -> tuple[np.ndarray, np.ndarray]:
    """Node indices and weights (summing to ``1/ds``) of the two-node deposition at ``u``.

    A share that would land on a Dirichlet node goes to its interior
    neighbour instead, so the deposited heat is never lost.
    """
    j, xi = grid.locate(u)
    idx = np.array([j, j + 1])
    w = np.array([1.0 - xi, xi]) / grid.ds
    n = grid.n_cells
    idx = np.clip(idx, 1, n - 1)
    return idx, w


@dataclass
class ExitRecord:
    t_star: float
    side: str


@dataclass
class EnergyLedger:
    t: list = field(default_factory=list)
    stored: list = field(default_factory=list)
    flux_cum: list = field(default_factory=list)
    latent_cum: list = field(default_factory=list)
    residual: list = field(default_factory=list)

    def append(self, t, stored, flux_cum, latent_cum, residual):
        self.t.append(float(t))
        self.stored.append(float(stored))
        self.flux_cum.append(float(flux_cum))
        self.latent_cum.append(float(latent_cum))
        self.residual.append(float(residual))

    def arrays(self) -> dict[str, np.ndarray]:
        return {k: np.asarray(getattr(self, k), dtype=float) for k in ("t", "stored", "flux_cum", "latent_cum", "residual")}


@dataclass
class SimulationResult:
    grid: Grid1D
    params: PhysicalParams
    config: SolverConfig
    snapshot_times: np.ndarray
    snapshots: np.ndarray
    trajectory: InterfaceTrajectory
    exit: Optional[ExitRecord]
    energy: EnergyLedger
    initial_field: np.ndarray
    min_physical_temperature: float
    law: object = None
    stats: dict = field(default_factory=dict)

    @property
    def final_field(self) -> np.ndarray:
        return self.snapshots[-1]

    def l2_norms(self) -> np.ndarray:
        return np.sqrt(self.grid.ds * np.sum(self.snapshots**2, axis=1))


class Stepper:
    """Owns the factorised diffusion operator and advances one step at a time.

    ``forcing`` (optional) supplies a smooth volumetric source ``smooth(s, t)``
    and an extra interface heat ``interface_heat(t0, t1)`` deposited with the
    same weights as the latent heat; ``prescribed_u`` replaces the kinetic
    law by a given interface motion.  Both exist for manufactured-solution
    verification.
    """

    def __init__(
        self,
        grid: Grid1D,
        params: PhysicalParams,
        law,
        config: SolverConfig,
        forcing=None,
        prescribed_u: Optional[Callable[[float], float]] = None,
    ):
        if abs(grid.L - params.L) > 1e-12 * params.L:
            raise ConfigError(f"grid length {grid.L} differs from params L={params.L}")
        self.grid, self.params, self.law, self.config = grid, params, law, config
        self.forcing = forcing
        self.prescribed_u = prescribed_u
        self.dt = config.dt
        self.r = params.K * config.dt / (params.heat_capacity * grid.ds**2)
        self.cn = config.diffusion_scheme == "crank_nicolson"
        self.system = ConstantTridiagonal(grid.n_cells - 1, 0.5 * self.r if self.cn else self.r)
        self.nodes = grid.nodes
        self.interior = self.nodes[1:-1]
        self.mollifier = None
        if config.source_mode == "mollified":
            self.mollifier = MollifiedDirac(config.epsilon, params.L / 2, config.mollifier_profile)
            evaluate_on_grid(self.mollifier, grid)  # raises early if epsilon is unresolvable
        self.step_index = 0
        self._check_transport_cfl()

    def _check_transport_cfl(self):
        v_max = getattr(self.law, "v_max", None)
        if v_max is not None and self.dt * v_max > self.grid.ds:
            warnings.warn(
                f"dt*v_max={self.dt * v_max:.3g} exceeds ds={self.grid.ds:.3g}; "
                "the interface may cross more than one cell per step",
                RuntimeWarning,
                stacklevel=3,
            )

    # -- pieces ---------------------------------------------------------

    def velocity(self, theta_bar: float) -> float:
        return float(self.law(theta_bar + self.params.theta_B))

    def deposit(self, center: float) -> np.ndarray:
        """Full-length nodal weights (sum * ds == 1) for a unit source at ``center``."""
        w = np.zeros(self.grid.n_nodes)
        if self.mollifier is None:
            idx, vals = sharp_weights(self.grid, center)
            np.add.at(w, idx, vals)
        else:
            w = evaluate_on_grid(self.mollifier.moved(center), self.grid)
        return w

    def boundary_outflow(self, values: np.ndarray) -> float:
        """Heat flux leaving through both ends, ``K (theta_1 + theta_{n-1}) / ds``."""
        return self.params.K * (values[1] + values[-2]) / self.grid.ds

    def stored_heat(self, values: np.ndarray) -> float:
        return self.params.heat_capacity * self.grid.ds * float(np.sum(values[1:-1]))

    def _base_rhs(self, values: np.ndarray, t0: float, t1: float) -> np.ndarray:
        rhs = values[1:-1].copy()
        if self.cn:
            rhs -= 0.5 * self.r * apply_second_difference(values[1:-1])
        if self.forcing is not None:
            if self.cn:
                f = 0.5 * (self.forcing.smooth(self.interior, t0) + self.forcing.smooth(self.interior, t1))
            else:
                f = self.forcing.smooth(self.interior, t1)
            rhs += self.dt * f / self.params.heat_capacity
        return rhs

    def _solve(self, base_rhs: np.ndarray, heat_density: np.ndarray) -> np.ndarray:
        """New nodal field given the interior right-hand side and a nodal heat input (per length)."""
        out = np.zeros(self.grid.n_nodes)
        out[1:-1] = self.system.solve(base_rhs + heat_density[1:-1] / self.params.heat_capacity)
        return out

    def _forcing_energy(self, t0: float, t1: float) -> float:
        if self.forcing is None:
            return 0.0
        ds = self.grid.ds
        if self.cn:
            f = 0.5 * (self.forcing.smooth(self.interior, t0) + self.forcing.smooth(self.interior, t1))
        else:
            f = self.forcing.smooth(self.interior, t1)
        return self.dt * ds * float(np.sum(f))

    # -- one step --------------------------------------------------------

    def advance(self, values: np.ndarray, iface: InterfaceState):
        """Advance one step in place on ``iface``; return ``(new_values, info)``.

        ``info`` carries the applied velocity, the interface displacement, the
        total heat released, the boundary outflow integrated over the step,
        and an exit record when the interface reached an end during the step.
        """
        cfg, dt, L = self.config, self.dt, self.grid.L
        t0 = iface.t
        t1 = t0 + dt
        self.step_index += 1
        base = self._base_rhs(values, t0, t1)
        extra = 0.0
        if self.forcing is not None and hasattr(self.forcing, "interface_heat"):
            extra = self.forcing.interface_heat(t0, t1)

        theta_u0 = interpolate_at_interface(values, self.grid, iface.u)
        exit_rec = None
        if self.prescribed_u is not None:
            v0 = (self.prescribed_u(t1) - iface.u) / dt if iface.active else 0.0
            u_raw = iface.u + dt * v0
            u_new = min(max(u_raw, 0.0), L)
            du = u_new - iface.u
            w = self.deposit(0.5 * (iface.u + u_new))
            latent = self.params.alpha * du + extra
            new = self._solve(base, latent * w)
        elif not iface.active:
            v0, du, u_raw, u_new = 0.0, 0.0, iface.u, iface.u
            latent = extra
            new = self._solve(base, extra * self.deposit(iface.u)) if extra else self._solve(base, np.zeros(self.grid.n_nodes))
        elif cfg.coupling == "imex":
            v0 = self.velocity(theta_u0)
            u_raw = iface.u + dt * v0
            u_new = min(max(u_raw, 0.0), L)
            du = u_new - iface.u
            new, latent = self._deposit_and_solve(base, values, None, iface.u, u_new, du, extra)
        else:
            v0 = self.velocity(theta_u0)
            new, latent, u_raw, u_new, du = self._picard(base, values, iface.u, v0, extra)

        if not np.all(np.isfinite(new)) or not np.isfinite(u_new):
            raise NonFiniteState(self.step_index)

        if iface.active and (u_new <= 0.0 or u_new >= L):
            side = "left" if u_new <= 0.0 else "right"
            bound = 0.0 if side == "left" else L
            frac = (bound - iface.u) / (u_raw - iface.u) if u_raw != iface.u else 1.0
            exit_rec = ExitRecord(t0 + min(max(frac, 0.0), 1.0) * dt, side)

        if self.cn:
            outflow = 0.5 * (self.boundary_outflow(values) + self.boundary_outflow(new)) * dt
        else:
            outflow = self.boundary_outflow(new) * dt
        latent_total = latent + self._forcing_energy(t0, t1)
        iface.advance(u_new, t1, L)
        info = dict(v=v0, du=du, theta_at_u=theta_u0, latent=latent_total, outflow=outflow, exit=exit_rec)
        return new, info

    def _deposit_and_solve(self, base, old, v_new_field, u_old, u_new, du, extra):
        """Solve with the source for a move ``u_old -> u_new``.

        In the ``local`` velocity variant of mollified mode the source is
        ``alpha * v(theta(s)) * delta_eps(s)`` integrated over the step instead
        of ``alpha * du * delta_eps``.
        """
        alpha = self.params.alpha
        w = self.deposit(0.5 * (u_old + u_new))
        if self.mollifier is not None and self.config.velocity_variant == "local":
            local_v = self.law(old + self.params.theta_B)
            if v_new_field is not None:
                local_v = 0.5 * (local_v + v_new_field)
            density = alpha * self.dt * local_v * w
            latent = float(np.sum(density[1:-1]) * self.grid.ds)
            density = density + extra * w
            return self._solve(base, density), latent + extra
        latent = alpha * du + extra
        return self._solve(base, latent * w), latent

    def _picard(self, base, values, u_old, v0, extra):
        """Trapezoidal interface update iterated with the implicit heat solve."""
        cfg, dt, L = self.config, self.dt, self.grid.L
        u_raw = u_old + dt * v0
        local_v = None
        residual = np.inf
        for _ in range(cfg.max_iter):
            u_c = min(max(u_raw, 0.0), L)
            new, latent = self._deposit_and_solve(base, values, local_v, u_old, u_c, u_c - u_old, extra)
            v1 = self.velocity(interpolate_at_interface(new, self.grid, u_c))
            u_next = u_old + 0.5 * dt * (v0 + v1)
            residual = abs(min(max(u_next, 0.0), L) - u_c)
            if self.mollifier is not None and cfg.velocity_variant == "local":
                local_next = self.law(new + self.params.theta_B)
                change = np.inf if local_v is None else float(np.max(np.abs(local_next - local_v))) * dt
                residual = max(residual, change)
                local_v = local_next
            if residual <= cfg.tol:
                return new, latent, u_raw, u_c, u_c - u_old
            u_raw = u_next
        raise PicardDivergence(self.step_index, float(residual))


def step(field: TemperatureField, iface: InterfaceState, params: PhysicalParams, law, config: SolverConfig):
    """Advance one step; returns a new ``(TemperatureField, InterfaceState)`` pair."""
    stepper = Stepper(field.grid, params, law, config)
    state = InterfaceState(iface.u, iface.t, iface.active)
    new, _ = stepper.advance(field.values, state)
    return TemperatureField(new, field.grid), state


def run(
    theta0,
    u0: float,
    params: PhysicalParams,
    law,
    config: SolverConfig,
    grid: Optional[Grid1D] = None,
    forcing=None,
    prescribed_u=None,
) -> SimulationResult:
    """Integrate from ``(theta0, u0)`` to ``config.t_end``.

    ``theta0`` is a :class:`TemperatureField`, an array of nodal rescaled
    values, or a callable of position.  The run continues after the interface
    leaves the domain so the decay of the temperature can be observed.
    """
    if isinstance(theta0, TemperatureField):
        grid = theta0.grid
        values = theta0.values.copy()
    else:
        if grid is None:
            raise ValueError("a grid is required unless theta0 is a TemperatureField")
        values = TemperatureField.from_function(theta0, grid).values if callable(theta0) else TemperatureField(np.array(theta0, dtype=float), grid).values.copy()
    if not 0.0 < u0 < params.L:
        raise InvalidInitialInterface(f"u0={u0} must lie strictly inside (0, {params.L})")

    stepper = Stepper(grid, params, law, config, forcing=forcing, prescribed_u=prescribed_u)
    iface = InterfaceState(float(u0), 0.0, True)
    n_steps = config.n_steps
    traj = InterfaceTrajectory()
    ledger = EnergyLedger()
    snap_t = [0.0]
    snaps = [values.copy()]
    initial = values.copy()
    exit_rec = None
    min_phys = float(np.min(values) + params.theta_B)

    stored = stepper.stored_heat(values)
    flux_cum = latent_cum = 0.0
    ledger.append(0.0, stored, 0.0, 0.0, 0.0)
    for n in range(n_steps):
        t_n = iface.t
        u_n, gate_n = iface.u, iface.active
        new, info = stepper.advance(values, iface)
        traj.append(t_n, u_n, info["theta_at_u"], info["v"] if gate_n else 0.0, gate_n)
        new_stored = stepper.stored_heat(new)
        step_res = (new_stored - stored) + info["outflow"] - info["latent"]
        flux_cum += info["outflow"]
        latent_cum += info["latent"]
        stored = new_stored
        ledger.append((n + 1) * config.dt, stored, flux_cum, latent_cum, step_res)
        if info["exit"] is not None and exit_rec is None:
            exit_rec = info["exit"]
        values = new
        iface.t = (n + 1) * config.dt
        min_phys = min(min_phys, float(np.min(values) + params.theta_B))
        if (n + 1) % config.stride == 0 or n + 1 == n_steps:
            snap_t.append(iface.t)
            snaps.append(values.copy())

    theta_end = interpolate_at_interface(values, grid, iface.u)
    v_end = float(law(theta_end + params.theta_B)) if (iface.active and prescribed_u is None) else 0.0
    traj.append(iface.t, iface.u, theta_end, v_end, iface.active)
    return SimulationResult(
        grid=grid,
        params=params,
        config=config,
        snapshot_times=np.asarray(snap_t),
        snapshots=np.asarray(snaps),
        trajectory=traj,
        exit=exit_rec,
        energy=ledger,
        initial_field=initial,
        min_physical_temperature=min_phys,
        law=law,
    )
