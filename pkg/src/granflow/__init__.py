"""1D finite-volume simulation of dry granular avalanches.

Savage-Hutter and depth-averaged mu(I) models on an inclined bed, with
Coulomb arrest and a shared well-balanced solver.
"""

from ._jit import BACKEND
from .constitutive import MaterialParams, PouliquenParams, SymTensor2
from .models import MuIRheology, SavageHutter
from .solver import Grid1D, SimState, SolverConfig, run, step

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "Grid1D",
    "MaterialParams",
    "MuIRheology",
    "PouliquenParams",
    "SavageHutter",
    "SimState",
    "SolverConfig",
    "SymTensor2",
    "run",
    "step",
]
