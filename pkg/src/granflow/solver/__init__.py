"""Time integration of the depth-averaged granular flow models."""

from .core import (
    BC_CODES,
    Grid1D,
    SimState,
    SolverConfig,
    StepInfo,
    basal_friction,
    cfl_dt,
    coulomb_projection,
    hydrostatic_reconstruct,
    run,
    rusanov_flux,
    step,
    viscous_solve,
)

__all__ = [
    "BC_CODES",
    "Grid1D",
    "SimState",
    "SolverConfig",
    "StepInfo",
    "basal_friction",
    "cfl_dt",
    "coulomb_projection",
    "hydrostatic_reconstruct",
    "run",
    "rusanov_flux",
    "step",
    "viscous_solve",
]
