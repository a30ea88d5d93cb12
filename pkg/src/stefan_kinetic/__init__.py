"""1D two-phase Stefan problem with a kinetic interface law."""

from .core import Grid1D, InterfaceState, InterfaceTrajectory, PhysicalParams, TemperatureField, make_params
from .errors import StefanError
from .solver import SolverConfig, run, step
from .velocity import LinearLaw, SaturatedLaw, TableLaw, validate_sign_condition

__all__ = [
    "Grid1D",
    "InterfaceState",
    "InterfaceTrajectory",
    "LinearLaw",
    "PhysicalParams",
    "SaturatedLaw",
    "SolverConfig",
    "StefanError",
    "TableLaw",
    "TemperatureField",
    "make_params",
    "run",
    "step",
    "validate_sign_condition",
]
