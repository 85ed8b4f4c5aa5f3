"""Per-frame integral diagnostics."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..models import H_EPS
from ..solver import Grid1D, SimState


@dataclass(frozen=True)
class Diagnostics:
    t: float
    mass: float
    momentum: float
    front_x: float | None  # None when the domain is dry
    max_speed: float
    dt: float


def _ordered_sum(values: np.ndarray) -> float:
    # strict left-to-right accumulation; np.sum uses pairwise summation
    return float(np.add.accumulate(values)[-1]) if values.size else 0.0


def compute_diagnostics(state: SimState, grid: Grid1D, dt: float = 0.0,
                        h_eps: float = H_EPS) -> Diagnostics:
    wet = state.h >= h_eps
    u = np.where(wet, state.hu / np.where(wet, state.h, 1.0), 0.0)
    front = float(grid.x[np.nonzero(wet)[0][-1]]) if wet.any() else None
    return Diagnostics(
        t=float(state.t),
        mass=_ordered_sum(state.h * grid.dx),
        momentum=_ordered_sum(state.hu * grid.dx),
        front_x=front,
        max_speed=float(np.abs(u).max()) if u.size else 0.0,
        dt=float(dt),
    )
