"""Flat ``section.key = value`` configuration files.

Example::

    # baseline
    params.rho0 = 1
    params.theta_T = 2
    grid.n_cells = 512
    solver.t_end = 2.5
    law.kind = linear
    law.k = 5
    initial.kind = sine
    initial.u0 = 0.3

Lines are ``key = value``; ``#`` starts a comment.  Values are parsed as
int, float, bool (``true``/``false``), comma-separated lists of those, or
left as strings.  Unknown keys are rejected.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .core import PARAM_KEYS, Grid1D, PhysicalParams, TemperatureField, make_params, read_two_columns
from .errors import ConfigError, MissingKey, UnknownKey
from .solver import SolverConfig, default_dt
from .velocity import make_law

SOLVER_KEYS = {
    "dt", "t_end", "source_mode", "epsilon", "mollifier_profile", "velocity_variant",
    "coupling", "max_iter", "tol", "diffusion_scheme", "interpolation",
}
ALLOWED = (
    {f"params.{k}" for k in PARAM_KEYS}
    | {"grid.n_cells"}
    | {f"solver.{k}" for k in SOLVER_KEYS}
    | {"law.kind", "law.k", "law.v_max", "law.scale", "law.table"}
    | {"initial.kind", "initial.value", "initial.amplitude", "initial.file", "initial.u0"}
    | {"output.stride", "output.directory", "output.formats"}
    | {"scenario.name", "scenario.description", "scenario.levels", "scenario.k_values", "scenario.horizon"}
)
LAMINATE_KEYS = {"laminate.A", "laminate.B", "laminate.lambda"}
FILE_KEYS = ("law.table", "initial.file")


def _parse_scalar(text: str):
    low = text.lower()
    if low in ("true", "false"):
        return low == "true"
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            pass
    return text


def parse_value(text: str):
    text = text.strip()
    if len(text) >= 2 and text[0] == text[-1] and text[0] in "\"'":
        return text[1:-1]
    if "," in text:
        return [_parse_scalar(part.strip()) for part in text.split(",") if part.strip()]
    return _parse_scalar(text)


def parse_text(text: str, allowed=None, source: str = "<config>") -> dict:
    """Parse config text into a flat ``{dotted_key: value}`` dict."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        if allowed is not None and key not in allowed:
            raise UnknownKey(key)
        if key in out:
            raise ConfigError(f"{source}:{lineno}: duplicate key {key!r}")
        out[key] = parse_value(value)
    return out


def load_flat(path, allowed=ALLOWED) -> dict:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    return parse_text(path.read_text(), allowed, str(path))


def section(flat: dict, name: str) -> dict:
    prefix = name + "."
    return {k[len(prefix):]: v for k, v in flat.items() if k.startswith(prefix)}


def format_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (list, tuple)):
        return ", ".join(format_value(v) for v in value)
    return str(value)


def dump_flat(flat: dict) -> str:
    return "".join(f"{k} = {format_value(v)}\n" for k, v in flat.items())


@dataclass
class OutputConfig:
    stride: int = 1
    directory: Optional[str] = None
    formats: tuple = ("csv", "json")


@dataclass
class RunConfig:
    params: PhysicalParams
    n_cells: int
    solver: SolverConfig
    law: object
    initial: dict
    u0: float
    output: OutputConfig = field(default_factory=OutputConfig)
    raw: dict = field(default_factory=dict)

    @property
    def grid(self) -> Grid1D:
        return Grid1D(self.n_cells, self.params.L)

    def initial_field(self) -> TemperatureField:
        return build_initial(self.initial, self.params, self.grid)


def build_initial(spec: dict, params: PhysicalParams, grid: Grid1D) -> TemperatureField:
    """Rescaled initial temperature from an ``initial.*`` block.

    ``constant``: ``value`` in the interior (default 0); ``sine``:
    ``amplitude * sin(pi s / L)`` (default amplitude ``theta_c``); ``file``:
    two columns ``s theta_bar`` linearly interpolated onto the grid.
    """
    kind = spec.get("kind", "sine")
    s = grid.nodes
    if kind == "constant":
        values = np.full(grid.n_nodes, float(spec.get("value", 0.0)))
    elif kind == "sine":
        amp = float(spec.get("amplitude", params.theta_c))
        values = amp * np.sin(np.pi * s / params.L)
    elif kind == "file":
        xs, ys = read_two_columns(spec["file"])
        values = np.interp(s, xs, ys)
    else:
        raise ConfigError(f"unknown initial.kind {kind!r}")
    values[0] = values[-1] = 0.0
    return TemperatureField(values, grid)


def build_run_config(flat: dict, base_dir=".") -> RunConfig:
    """Validate a parsed flat mapping and build the run configuration."""
    base_dir = Path(base_dir)
    flat = dict(flat)
    for key in FILE_KEYS:
        if key in flat:
            path = Path(str(flat[key]))
            if not path.is_absolute():
                path = base_dir / path
            if not path.is_file():
                raise ConfigError(f"{key}: file not found: {path}")
            flat[key] = str(path)

    params = make_params(section(flat, "params"))
    if "grid.n_cells" not in flat:
        raise MissingKey("grid.n_cells")
    n_cells = int(flat["grid.n_cells"])
    try:
        grid = Grid1D(n_cells, params.L)
    except ValueError as err:
        raise ConfigError(f"grid.n_cells: {err}") from None

    solver_raw = section(flat, "solver")
    if "t_end" not in solver_raw:
        raise MissingKey("solver.t_end")
    solver_raw.setdefault("dt", default_dt(grid, params))
    stride = int(flat.get("output.stride", 1))
    solver = SolverConfig(stride=stride, **{k: v for k, v in solver_raw.items()})

    law_raw = section(flat, "law")
    if "kind" not in law_raw:
        raise MissingKey("law.kind")
    try:
        law = make_law(law_raw.pop("kind"), params.theta_T, **law_raw)
    except KeyError as err:
        raise MissingKey(f"law.{err.args[0]}") from None

    initial = section(flat, "initial")
    if "u0" not in initial:
        raise MissingKey("initial.u0")
    u0 = float(initial.pop("u0"))
    if not 0.0 < u0 < params.L:
        raise ConfigError(f"initial.u0={u0} must lie in (0, L)")

    formats = flat.get("output.formats", ["csv", "json"])
    formats = tuple(formats if isinstance(formats, list) else [formats])
    if not set(formats) <= {"csv", "json"}:
        raise ConfigError(f"output.formats must be a subset of csv, json; got {formats}")
    output = OutputConfig(stride=stride, directory=flat.get("output.directory"), formats=formats)
    return RunConfig(params, n_cells, solver, law, initial, u0, output, raw=flat)


def load_run_config(path) -> RunConfig:
    path = Path(path)
    return build_run_config(load_flat(path), base_dir=path.parent)


def load_laminate(path):
    """Read ``laminate.A``, ``laminate.B`` (row-major, 9 numbers) and ``laminate.lambda``."""
    from .laminate import LaminateSpec

    flat = load_flat(path, allowed=LAMINATE_KEYS)
    for key in LAMINATE_KEYS:
        if key not in flat:
            raise MissingKey(key)
    mats = []
    for key in ("laminate.A", "laminate.B"):
        vals = flat[key]
        if not isinstance(vals, list) or len(vals) != 9:
            raise ConfigError(f"{key} must list 9 numbers (row-major)")
        mats.append(np.array(vals, dtype=float).reshape(3, 3))
    return LaminateSpec(mats[0], mats[1], float(flat["laminate.lambda"]))
