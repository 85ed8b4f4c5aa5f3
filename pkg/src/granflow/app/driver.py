"""Scenario execution: single runs and side-by-side model comparison."""

from __future__ import annotations

from pathlib import Path
from typing import Iterator

from ..errors import GranflowError
from ..solver import SimState
from ..solver import run as solver_run
from .diagnostics import Diagnostics, compute_diagnostics
from .output import FrameSink, write_compare
from .scenario import Scenario, build_initial_state, build_model

MODEL_DIRS = {"savage_hutter": "savage_hutter", "mu_i": "mu_i"}


class ModelRunError(GranflowError, RuntimeError):
    def __init__(self, model: str, exc: Exception):
        super().__init__(f"{model}: {exc}")
        self.model = model
        self.__cause__ = exc


def run(scenario: Scenario) -> Iterator[tuple[SimState, Diagnostics]]:
    """Frames of a scenario run as ``(state, diagnostics)`` pairs."""
    grid, state = build_initial_state(scenario)
    h_eps = scenario.solver.h_eps
    frames = solver_run(state, grid, scenario.model, scenario.solver,
                        frame_interval=scenario.frame_interval or None)
    for st, dt in frames:
        yield st, compute_diagnostics(st, grid, dt, h_eps)


def run_to_directory(scenario: Scenario, out_dir: str | Path | None = None) -> list[Diagnostics]:
    """Run a scenario and write its CSV files; returns the diagnostics of every frame."""
    out = Path(out_dir if out_dir is not None else scenario.output_dir)
    grid, _ = build_initial_state(scenario)
    sink = FrameSink.fresh(out)
    diags = []
    for st, diag in run(scenario):
        sink.write(st, diag, grid, scenario.solver.h_eps)
        diags.append(diag)
    return diags


def sibling_models(scenario: Scenario):
    """The Savage-Hutter and mu(I) configurations sharing the scenario's frame and material."""
    m = scenario.model
    sh = build_model("savage_hutter", m.theta, m.g, scenario.material, scenario.pouliquen,
                     scenario.sh_options, scenario.mui_options)
    mui = build_model("mu_i", m.theta, m.g, scenario.material, scenario.pouliquen,
                      scenario.sh_options, scenario.mui_options)
    return sh, mui


def run_compare(scenario: Scenario, out_dir: str | Path | None = None) -> Path:
    """Run both models on the same grid and initial condition.

    Writes ``savage_hutter/`` and ``mu_i/`` output directories and a
    ``compare.csv`` with front positions and maximum speeds per frame time.
    """
    out = Path(out_dir if out_dir is not None else scenario.output_dir)
    try:
        sh, mui = sibling_models(scenario)
    except GranflowError as exc:
        raise ModelRunError("mu_i" if scenario.pouliquen is None else "savage_hutter", exc) from exc
    results = {}
    for model in (sh, mui):
        try:
            results[model.variant] = run_to_directory(scenario.with_model(model),
                                                      out / MODEL_DIRS[model.variant])
        except (GranflowError, OSError) as exc:
            raise ModelRunError(model.variant, exc) from exc
    a, b = results["savage_hutter"], results["mu_i"]
    rows = [(da.t, da.front_x, db.front_x, da.max_speed, db.max_speed) for da, db in zip(a, b)]
    write_compare(out / "compare.csv", rows)
    return out
