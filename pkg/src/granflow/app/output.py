"""CSV emission for simulation frames."""

from __future__ import annotations

from pathlib import Path
from typing import TextIO

import numpy as np

from ..models import H_EPS
from ..solver import Grid1D, SimState
from .diagnostics import Diagnostics

FIELDS_HEADER = "t,x,h,u,b"
DIAGNOSTICS_HEADER = "t,mass,momentum,front_x,max_speed,dt"
COMPARE_HEADER = "t,front_x_sh,front_x_mui,max_speed_sh,max_speed_mui"


def fmt(v: float | None) -> str:
    """Round-trip scientific notation; ``None`` becomes ``none``."""
    return "none" if v is None else f"{float(v):.16e}"


class FrameSink:
    """Append-only writer for ``fields.csv`` and ``diagnostics.csv`` in one directory.

    Headers are written when a file is new or empty; existing rows are kept.
    """

    def __init__(self, directory: str | Path):
        self.directory = Path(directory)
        try:
            self.directory.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise OSError(f"cannot create output directory {self.directory}: {exc}") from exc
        self.fields_path = self.directory / "fields.csv"
        self.diag_path = self.directory / "diagnostics.csv"

    @classmethod
    def fresh(cls, directory: str | Path) -> "FrameSink":
        """Sink whose files are truncated first, so reruns reproduce the same bytes."""
        sink = cls(directory)
        for p in (sink.fields_path, sink.diag_path):
            p.unlink(missing_ok=True)
        return sink

    def _open(self, path: Path, header: str) -> TextIO:
        try:
            new = not path.exists() or path.stat().st_size == 0
            fh = open(path, "a", encoding="utf-8", newline="\n")
        except OSError as exc:
            raise OSError(f"cannot open {path}: {exc}") from exc
        if new:
            fh.write(header + "\n")
        return fh

    def write(self, state: SimState, diag: Diagnostics, grid: Grid1D, h_eps: float = H_EPS) -> None:
        write_frame(state, diag, grid, self, h_eps)


def write_frame(state: SimState, diag: Diagnostics, grid: Grid1D, sink: FrameSink,
                h_eps: float = H_EPS) -> None:
    """Append one frame: a row per cell to fields.csv and one row to diagnostics.csv."""
    wet = state.h >= h_eps
    u = np.where(wet, state.hu / np.where(wet, state.h, 1.0), 0.0)
    t = fmt(state.t)
    rows = "".join(f"{t},{fmt(x)},{fmt(h)},{fmt(v)},{fmt(b)}\n"
                   for x, h, v, b in zip(grid.x, state.h, u, grid.b))
    path = sink.fields_path
    try:
        with sink._open(path, FIELDS_HEADER) as fh:
            fh.write(rows)
        path = sink.diag_path
        with sink._open(path, DIAGNOSTICS_HEADER) as fh:
            fh.write(",".join(fmt(v) for v in (diag.t, diag.mass, diag.momentum, diag.front_x,
                                                diag.max_speed, diag.dt)) + "\n")
    except OSError as exc:
        raise OSError(f"failed writing {path}: {exc}") from exc


def write_compare(path: str | Path, rows) -> None:
    """``rows`` yields ``(t, front_sh, front_mui, speed_sh, speed_mui)``."""
    path = Path(path)
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(COMPARE_HEADER + "\n")
            for row in rows:
                fh.write(",".join(fmt(v) for v in row) + "\n")
    except OSError as exc:
        raise OSError(f"failed writing {path}: {exc}") from exc
