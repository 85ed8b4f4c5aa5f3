"""Finite-volume time stepping for the depth-averaged granular models.

One step is split as

1. well-balanced Rusanov update with hydrostatic reconstruction, plus the
   downslope gravity term;
2. Coulomb friction projection (arrests cells instead of reversing them);
3. backward-Euler solve of the depth-averaged viscous term (mu(I) only).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from .. import _jit
from ..errors import InvalidInput, NonFiniteState
from ..models import H_EPS, FluxVector, ModelConfig, MuIRheology, flux_core, speeds_core

if _jit.BACKEND == "numba":
    from . import kernels_numba as K
else:
    from . import kernels_numpy as K

BC_CODES = {"open": 0, "reflective": 1, "periodic": 2}


@dataclass(frozen=True)
class Grid1D:
    """Uniform cell-centred grid with bed elevation ``b`` (normal to the incline)."""

    x: np.ndarray
    dx: float
    b: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        b = np.asarray(self.b, dtype=float)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "b", b)
        if x.ndim != 1 or x.size < 2:
            raise InvalidInput("grid needs at least two cells")
        if not self.dx > 0:
            raise InvalidInput("dx must be positive")
        if b.shape != x.shape:
            raise InvalidInput("bed elevation must have one value per cell")
        if not np.allclose(np.diff(x), self.dx, rtol=1e-9, atol=0.0):
            raise InvalidInput("cell centres must be uniformly spaced by dx")

    @classmethod
    def uniform(cls, n: int, x_min: float, x_max: float, b=None) -> "Grid1D":
        if n < 2 or not x_max > x_min:
            raise InvalidInput("need n >= 2 and x_min < x_max")
        dx = (x_max - x_min) / n
        x = x_min + (np.arange(n) + 0.5) * dx
        if b is None:
            b = np.zeros(n)
        elif callable(b):
            b = np.asarray(b(x), dtype=float)
        return cls(x, dx, np.broadcast_to(np.asarray(b, dtype=float), x.shape).copy())

    @property
    def n(self) -> int:
        return self.x.size


@dataclass
class SimState:
    t: float
    h: np.ndarray
    hu: np.ndarray

    def copy(self) -> "SimState":
        return SimState(self.t, self.h.copy(), self.hu.copy())

    def velocity(self, h_eps: float = H_EPS) -> np.ndarray:
        return K.velocities(self.h, self.hu, h_eps)


@dataclass(frozen=True)
class SolverConfig:
    t_end: float
    cfl: float = 0.9
    h_eps: float = H_EPS
    dt_max: float = 1e-2
    bc: str = "reflective"
    viscous_scheme: str = "implicit"

    def __post_init__(self):
        if not 0 < self.cfl <= 1:
            raise InvalidInput(f"cfl must lie in (0, 1], got {self.cfl}")
        if not self.h_eps > 0 or not self.dt_max > 0:
            raise InvalidInput("h_eps and dt_max must be positive")
        if not (math.isfinite(self.t_end) and self.t_end >= 0):
            raise InvalidInput("t_end must be finite and non-negative")
        if self.bc not in BC_CODES:
            raise InvalidInput(f"unknown boundary condition {self.bc!r}")
        if self.viscous_scheme not in ("implicit", "off"):
            raise InvalidInput(f"unknown viscous scheme {self.viscous_scheme!r}")


def hydrostatic_reconstruct(h_L: float, b_L: float, h_R: float, b_R: float) -> tuple[float, float]:
    """Interface depths ``max(0, h + b - max(b_L, b_R))`` on both sides."""
    if h_L < 0 or h_R < 0:
        raise InvalidInput("depths must be non-negative")
    bstar = max(b_L, b_R)
    return max(0.0, h_L + b_L - bstar), max(0.0, h_R + b_R - bstar)


def rusanov_flux(left: tuple[float, float], right: tuple[float, float], cfg: ModelConfig,
                 K_coef: float | None = None, h_eps: float = H_EPS) -> FluxVector:
    """Local Lax-Friedrichs flux between two ``(h, hu)`` states."""
    if K_coef is None:
        K_coef = cfg.K
    gc = cfg.g * cfg.cos_theta
    fl, fr = [0.0, 0.0], [0.0, 0.0]
    a = 0.0
    for (h, hu), f in ((left, fl), (right, fr)):
        if h >= h_eps:
            u = hu / h
            f[:] = flux_core(h, u, K_coef, cfg.chi, gc)
            lo, hi = speeds_core(h, u, K_coef, cfg.chi, gc)
            a = max(a, abs(lo), abs(hi))
    hl, hul = left
    hr, hur = right
    return FluxVector(0.5 * (fl[0] + fr[0]) - 0.5 * a * (hr - hl),
                      0.5 * (fl[1] + fr[1]) - 0.5 * a * (hur - hul))


def _gc(cfg):
    return cfg.g * cfg.cos_theta


def cfl_dt(state: SimState, grid: Grid1D, cfg: ModelConfig, scfg: SolverConfig,
           t_stop: float | None = None) -> float:
    """Courant-limited step, capped at ``dt_max`` and at the time left to ``t_stop``."""
    amax = K.max_wave_speed(state.h, state.hu, _gc(cfg), cfg.chi, cfg.K_max, scfg.h_eps)
    dt = scfg.dt_max if amax == 0.0 else min(scfg.cfl * grid.dx / amax, scfg.dt_max)
    t_stop = scfg.t_end if t_stop is None else t_stop
    return min(dt, t_stop - state.t)


def basal_friction(state: SimState, cfg: ModelConfig, h_eps: float = H_EPS) -> np.ndarray:
    """Per-cell basal friction coefficient for the current state."""
    if isinstance(cfg, MuIRheology):
        p = cfg.pouliquen
        u = K.velocities(state.h, state.hu, h_eps)
        return K.basal_mu_mui(state.h, u, cfg.g, cfg.cos_theta, p.mu1, p.mu2, p.beta, p.ell, h_eps)
    return np.full(state.h.shape, cfg.material.tan_delta0)


def coulomb_projection(state: SimState, dt: float, cfg: ModelConfig, mu: np.ndarray | None = None,
                       held: np.ndarray | None = None, h_eps: float = H_EPS) -> SimState:
    """Apply the friction impulse ``J = dt g h cos(theta) mu`` to every cell.

    ``|hu| <= J`` arrests the cell; otherwise ``|hu|`` shrinks by ``J``.
    ``mu`` defaults to the basal friction of ``state`` itself.
    """
    if mu is None:
        mu = basal_friction(state, cfg, h_eps)
    if held is None:
        held = np.zeros(state.h.shape, dtype=bool)
    hu = K.coulomb_project(state.h, state.hu, np.asarray(mu, dtype=float), held, dt, _gc(cfg), h_eps)
    return SimState(state.t, state.h, hu)


def viscous_solve(state: SimState, dt: float, grid: Grid1D, cfg: ModelConfig, bc: str = "periodic",
                  frozen: np.ndarray | None = None, h_eps: float = H_EPS,
                  nu: float | None = None) -> SimState:
    """Backward-Euler step of ``h du/dt = d/dx(nu h^(3/2) du/dx)`` with ``h`` frozen.

    Interface diffusivity is ``nu * ((h_i + h_{i+1}) / 2)^(3/2)``. Dry and
    ``frozen`` cells are decoupled and keep their momentum.
    """
    if nu is None:
        nu = cfg.nu()
    if nu == 0.0:
        return state
    h = state.h
    n = h.size
    wet = h >= h_eps
    active = wet if frozen is None else wet & ~frozen
    u = K.velocities(h, state.hu, h_eps)

    if bc == "periodic":
        h_next, act_next = np.roll(h, -1), np.roll(active, -1)
    else:
        h_next, act_next = np.append(h[1:], h[-1]), np.append(active[1:], False)
    diff = nu * (0.5 * (h + h_next)) ** 1.5
    diff = np.where(active & act_next, diff, 0.0)  # diff[i] sits on interface i+1/2
    diff_prev = np.roll(diff, 1)
    if bc != "periodic":
        diff_prev[0] = 0.0

    r = dt / grid.dx ** 2
    a = -r * diff_prev
    c = -r * diff
    m = np.where(active, h, 1.0)
    bdiag = m + r * (diff_prev + diff)
    rhs = m * np.where(active, u, 0.0)
    if bc == "periodic":
        u_new = K.cyclic_thomas(a, bdiag, c, rhs)
    else:
        u_new = K.thomas(a, bdiag, c, rhs)
    hu = np.where(active, h * u_new, state.hu)
    return SimState(state.t, h, hu)


@dataclass
class StepInfo:
    dt: float
    held: np.ndarray = field(repr=False)


def step(state: SimState, grid: Grid1D, cfg: ModelConfig, scfg: SolverConfig,
         dt: float | None = None) -> tuple[SimState, float]:
    """Advance by one step (``cfl_dt`` unless ``dt`` is given)."""
    new, info = _step(state, grid, cfg, scfg, dt)
    return new, info.dt


def _step(state, grid, cfg, scfg, dt=None):
    if dt is None:
        dt = cfl_dt(state, grid, cfg, scfg)
    h_eps = scfg.h_eps
    gc = _gc(cfg)
    bc = BC_CODES[scfg.bc]
    # friction coefficient is taken from the start-of-step state
    mu = basal_friction(state, cfg, h_eps)
    h1, hu1, held = K.convective_update(
        state.h, state.hu, grid.b, grid.dx, dt, bc, h_eps, gc, cfg.g * cfg.sin_theta,
        cfg.chi, cfg.K_act, cfg.K_pas, cfg.mu_hold,
    )
    hu2 = K.coulomb_project(h1, hu1, mu, held, dt, gc, h_eps)
    t_new = state.t + dt
    new = SimState(t_new, h1, hu2)
    if scfg.viscous_scheme == "implicit" and isinstance(cfg, MuIRheology) and cfg.viscosity != "off":
        new = viscous_solve(new, dt, grid, cfg, scfg.bc, frozen=held, h_eps=h_eps)
    if not (np.isfinite(new.h).all() and np.isfinite(new.hu).all()):
        raise NonFiniteState("non-finite field after step", t=state.t)
    return new, StepInfo(dt, held)


def run(state: SimState, grid: Grid1D, cfg: ModelConfig, scfg: SolverConfig,
        frame_interval: float | None = None, max_steps: int | None = None
        ) -> Iterator[tuple[SimState, float]]:
    """Yield ``(state, last_dt)`` at ``t = 0``, every ``frame_interval`` and at ``t_end``.

    Steps are shortened to land exactly on output times, so runs with
    different models share their frame times.
    """
    state = state.copy()
    yield state.copy(), 0.0
    if frame_interval is None or frame_interval <= 0:
        frame_interval = scfg.t_end
    k = 1
    steps = 0
    while state.t < scfg.t_end:
        target = min(k * frame_interval, scfg.t_end) if frame_interval > 0 else scfg.t_end
        dt = cfl_dt(state, grid, cfg, scfg, t_stop=target)
        new, _ = step(state, grid, cfg, scfg, dt=dt)
        if target - new.t <= 1e-12 * max(1.0, abs(target)):
            new.t = target
        state = new
        steps += 1
        if state.t >= target:
            yield state.copy(), dt
            k += 1
        if max_steps is not None and steps >= max_steps:
            break
