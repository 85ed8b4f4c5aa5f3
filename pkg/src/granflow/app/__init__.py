"""Scenario files, CSV output, model comparison and the command line."""

from .diagnostics import Diagnostics, compute_diagnostics
from .driver import ModelRunError, run, run_compare, run_to_directory
from .scenario import Scenario, build_initial_state, load_scenario, parse_scenario

__all__ = [
    "Diagnostics", "compute_diagnostics", "ModelRunError", "run", "run_compare",
    "run_to_directory", "Scenario", "build_initial_state", "load_scenario", "parse_scenario",
]
