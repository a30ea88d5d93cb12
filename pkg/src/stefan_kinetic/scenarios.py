"""Named parameter sets shipped with the package.

Each catalog entry is a config file in ``catalog/``; a :class:`Scenario`
wraps the parsed mapping and runs it at any resolution.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources

from .config import build_run_config, parse_text, ALLOWED
from .errors import UnknownScenario
from .solver import run as run_solver
from .velocity import make_law


@dataclass(frozen=True)
class Scenario:
    name: str
    flat: dict

    @property
    def description(self) -> str:
        return str(self.flat.get("scenario.description", ""))

    @property
    def levels(self) -> tuple:
        return tuple(int(n) for n in self.flat.get("scenario.levels", [self.flat["grid.n_cells"]]))

    @property
    def k_values(self) -> tuple:
        ks = self.flat.get("scenario.k_values")
        if ks is None:
            return ()
        return tuple(float(k) for k in (ks if isinstance(ks, list) else [ks]))

    def config(self, n_cells=None, **overrides):
        """Run configuration at ``n_cells``; other dotted keys may be overridden.

        Without an explicit ``solver.dt`` the step is ``ds`` at the chosen
        resolution, and the output stride is scaled with ``n_cells`` so every
        level keeps the same number of snapshots.
        """
        flat = dict(self.flat)
        base_n = int(flat["grid.n_cells"])
        if n_cells is not None:
            flat["grid.n_cells"] = int(n_cells)
            if "output.stride" not in overrides and "solver.dt" not in flat:
                stride = int(flat.get("output.stride", 1))
                flat["output.stride"] = max(1, stride * int(n_cells) // base_n)
        flat.update(overrides)
        return build_run_config(flat)

    def run(self, n_cells=None, **overrides):
        rc = self.config(n_cells, **overrides)
        return run_solver(rc.initial_field(), rc.u0, rc.params, rc.law, rc.solver)

    def run_with_k(self, k: float, n_cells=None, **overrides):
        """Same scenario with a linear law of rate ``k``."""
        rc = self.config(n_cells, **overrides)
        law = make_law("linear", rc.params.theta_T, k=k)
        return run_solver(rc.initial_field(), rc.u0, rc.params, law, rc.solver)


def catalog_names() -> list[str]:
    files = resources.files(__package__).joinpath("catalog").iterdir()
    return sorted(f.name[:-4] for f in files if f.name.endswith(".cfg"))


def get_scenario(name: str) -> Scenario:
    path = resources.files(__package__).joinpath("catalog", f"{name}.cfg")
    if not path.is_file():
        raise UnknownScenario(f"unknown scenario {name!r}; known: {', '.join(catalog_names())}")
    return Scenario(name, parse_text(path.read_text(), ALLOWED, f"catalog/{name}.cfg"))
