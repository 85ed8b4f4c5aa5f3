"""Compare the numba and numpy solver backends.

Usage::

    python3 benchmarks/bench_kernels.py [--n 200 800 3200] [--steps 500]

Each backend runs in its own interpreter because the backend is fixed at
import time by ``GRANFLOW_BACKEND``. Kernels are compiled before timing.
"""

from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys

WORKER = r"""
import json, math, sys, time
import numpy as np
from granflow.constitutive import PouliquenParams
from granflow.models import MuIRheology
from granflow.solver import Grid1D, SimState, SolverConfig, step

n, steps = int(sys.argv[1]), int(sys.argv[2])
p = PouliquenParams(math.radians(21), math.radians(31), 0.136, 1e-3)
cfg = MuIRheology(math.radians(26), p)
grid = Grid1D.uniform(n, 0.0, 1.0)
scfg = SolverConfig(t_end=1e9, bc="reflective")

def fresh():
    return SimState(0.0, np.where(grid.x < 0.5, 0.05, 0.0), np.zeros(n))

s = fresh()
for _ in range(3):
    s, _ = step(s, grid, cfg, scfg)
s = fresh()
t0 = time.perf_counter()
for _ in range(steps):
    s, _ = step(s, grid, cfg, scfg)
elapsed = time.perf_counter() - t0
print(json.dumps({"seconds": elapsed, "checksum": float(s.h.sum())}))
"""


def time_backend(backend: str, n: int, steps: int) -> dict:
    env = dict(os.environ, GRANFLOW_BACKEND=backend)
    out = subprocess.run([sys.executable, "-c", WORKER, str(n), str(steps)],
                         env=env, capture_output=True, text=True, check=True)
    return json.loads(out.stdout)


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, nargs="+", default=[200, 800, 3200])
    ap.add_argument("--steps", type=int, default=500)
    args = ap.parse_args(argv)

    print(f"{'cells':>7} {'numba ms/step':>14} {'numpy ms/step':>14} {'speedup':>8}  checksums agree")
    for n in args.n:
        jit = time_backend("numba", n, args.steps)
        ref = time_backend("numpy", n, args.steps)
        a = 1e3 * jit["seconds"] / args.steps
        b = 1e3 * ref["seconds"] / args.steps
        agree = abs(jit["checksum"] - ref["checksum"]) <= 1e-10 * abs(ref["checksum"])
        print(f"{n:>7} {a:>14.4f} {b:>14.4f} {b / a:>8.2f}  {agree}")


if __name__ == "__main__":
    main()
