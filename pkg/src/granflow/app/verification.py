"""Verification suites run by ``granflow verify``.

Each suite returns a :class:`CheckResult`; tolerances and budgets are fixed
module constants.
"""

from __future__ import annotations

import filecmp
import math
import tempfile
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np

from .. import constitutive as cl
from ..constitutive import MaterialParams, PouliquenParams, SymTensor2
from ..models import MuIRheology, SavageHutter, steady_velocity
from ..solver import Grid1D, SimState, SolverConfig, run, step, viscous_solve
from .driver import run_compare, run_to_directory
from .scenario import parse_scenario

WELL_BALANCE_TOL = 1e-12
MASS_TOL = 1e-12
RITTER_MIN_ORDER = 0.8
FLOW_RULE_TOL = 1e-6
STRESS_TOL = 1e-12
SUBSTITUTION_TOL = 1e-12
VISCOUS_MOMENTUM_TOL = 1e-12
VISCOUS_REF_TOL = 1e-6

BUDGET = {
    "well_balance": 1.0, "mass": 5.0, "ritter": 5.0, "flow_rule": 10.0, "arrest": 2.0,
    "coincidence": 2.0, "constitutive": 1.0, "viscous": 2.0, "determinism": None,
}

G = 9.81
deg = math.radians


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0

    def line(self) -> str:
        budget = BUDGET.get(self.name)
        timing = f"{self.seconds:.2f}s" + (f" (< {budget:g}s)" if budget else "")
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.name:<13} {timing:<16} {self.detail}"


def _timed(name: str, fn: Callable[[], tuple[bool, str]]) -> CheckResult:
    t0 = time.perf_counter()
    ok, detail = fn()
    elapsed = time.perf_counter() - t0
    budget = BUDGET.get(name)
    if budget is not None and elapsed >= budget:
        ok = False
        detail += f"; over time budget ({elapsed:.2f}s >= {budget:g}s)"
    return CheckResult(name, ok, detail, elapsed)


# shared fixtures ---------------------------------------------------------

GLASS_BEADS = MaterialParams(d=1e-3, rho_star=2500.0, phi_s=0.6, phi_int=deg(35), delta0=deg(30))
FRICTIONLESS = MaterialParams(d=1e-3, rho_star=2500.0, phi_s=0.6, phi_int=0.0, delta0=0.0)
POULIQUEN = PouliquenParams(theta1=deg(21), theta2=deg(31), beta=0.136, ell=1e-3)


def warmup() -> None:
    """Compile every kernel once so timed checks measure simulation work only."""
    g = Grid1D.uniform(4, 0.0, 1.0, b=np.array([0.0, 0.0, 0.1, 0.1]))
    s = SimState(0.0, np.array([1.0, 0.5, 0.0, 0.0]), np.array([0.1, 0.0, 0.0, 0.0]))
    for cfg in (SavageHutter(deg(10), GLASS_BEADS),
                MuIRheology(deg(26), POULIQUEN)):
        for bc in ("open", "reflective", "periodic"):
            step(s, g, cfg, SolverConfig(t_end=1.0, bc=bc))


# oracles -----------------------------------------------------------------

def ritter_depth(x, t, x0, h0, g=G):
    """Analytic depth of the frictionless dam break onto a dry bed."""
    c0 = math.sqrt(g * h0)
    xi = (np.asarray(x, dtype=float) - x0) / t
    return np.where(xi <= -c0, h0, np.where(xi >= 2 * c0, 0.0, (2 * c0 - xi) ** 2 / (9 * g)))


def ritter_cell_average(x, dx, t, x0, h0, g=G, samples=64):
    off = (np.arange(samples) + 0.5) / samples - 0.5
    return ritter_depth(np.asarray(x)[:, None] + off[None, :] * dx, t, x0, h0, g).mean(axis=1)


def explicit_diffusion_reference(h, u, dx, nu, t_final, dt):
    """Forward-Euler integration of ``h du/dt = d/dx(nu hbar^1.5 du/dx)`` on a periodic row."""
    diff = nu * (0.5 * (h + np.roll(h, -1))) ** 1.5
    u = u.copy()
    nsteps = int(round(t_final / dt))
    for _ in range(nsteps):
        flux = diff * (np.roll(u, -1) - u)
        u = u + dt / dx ** 2 * (flux - np.roll(flux, 1)) / h
    return u


# suites --------------------------------------------------------------------

def _step_topography(n=200):
    return Grid1D.uniform(n, 0.0, 1.0, b=lambda x: np.where(x >= 0.5, 0.5, 0.0))


def check_well_balance() -> CheckResult:
    def body():
        grid = _step_topography()
        h0 = np.maximum(0.0, 1.0 - grid.b)
        scfg = SolverConfig(t_end=1e9, bc="reflective")
        cases = {
            "mu_i": MuIRheology(0.0, POULIQUEN, viscosity="constant", nu_const=0.05),
            "sh(K=1)": SavageHutter(0.0, GLASS_BEADS),
            "sh(K=1,frictionless)": SavageHutter(0.0, FRICTIONLESS),
        }
        worst_u = worst_h = 0.0
        parts = []
        for label, cfg in cases.items():
            s = SimState(0.0, h0.copy(), np.zeros_like(h0))
            for _ in range(1000):
                s, _ = step(s, grid, cfg, scfg)
            du = float(np.abs(s.velocity()).max())
            dh = float(np.abs(s.h - h0).max())
            worst_u, worst_h = max(worst_u, du), max(worst_h, dh)
            parts.append(f"{label}: |u|={du:.1e} |dh|={dh:.1e}")
        ok = worst_u < WELL_BALANCE_TOL and worst_h < WELL_BALANCE_TOL
        return ok, "; ".join(parts)
    return _timed("well_balance", body)


def check_mass() -> CheckResult:
    def body():
        grid = Grid1D.uniform(200, 0.0, 1.0)
        scfg = SolverConfig(t_end=1e9, bc="reflective")
        worst = 0.0
        parts = []
        for cfg in (SavageHutter(deg(20), GLASS_BEADS), MuIRheology(deg(26), POULIQUEN)):
            s = SimState(0.0, np.where(grid.x < 0.5, 1.0, 0.0), np.zeros(grid.n))
            m0 = float(np.sum(s.h) * grid.dx)
            for _ in range(10_000):
                s, _ = step(s, grid, cfg, scfg)
            drift = abs(float(np.sum(s.h) * grid.dx) - m0) / m0
            worst = max(worst, drift)
            parts.append(f"{cfg.variant}: {drift:.1e}")
        return worst < MASS_TOL, "relative drift " + ", ".join(parts)
    return _timed("mass", body)


def ritter_errors(ns=(200, 400), t_final=0.1, cfl=0.9):
    """L1 depth error against the Ritter solution for each grid size."""
    cfg = SavageHutter(0.0, FRICTIONLESS)
    x0, h0 = 1.0, 1.0
    errors = []
    for n in ns:
        grid = Grid1D.uniform(n, 0.0, 2.0)
        s = SimState(0.0, np.where(grid.x < x0, h0, 0.0), np.zeros(n))
        scfg = SolverConfig(t_end=t_final, bc="open", cfl=cfl, dt_max=1.0)
        for s, _ in run(s, grid, cfg, scfg):
            pass
        exact = ritter_cell_average(grid.x, grid.dx, t_final, x0, h0, cfg.g)
        errors.append(float(np.sum(np.abs(s.h - exact)) * grid.dx))
    return errors


def check_ritter() -> CheckResult:
    def body():
        e200, e400 = ritter_errors()
        order = math.log2(e200 / e400)
        return order >= RITTER_MIN_ORDER, (
            f"L1(n=200)={e200:.4e} L1(n=400)={e400:.4e} observed order {order:.3f} "
            f"(need >= {RITTER_MIN_ORDER})")
    return _timed("ritter", body)


def check_flow_rule() -> CheckResult:
    def body():
        cfg = MuIRheology(deg(26), POULIQUEN)
        grid = Grid1D.uniform(100, 0.0, 1.0)
        h = np.full(grid.n, 0.01)
        u0 = float(steady_velocity(0.01, cfg))
        s = SimState(0.0, h.copy(), h * u0)
        for s, _ in run(s, grid, cfg, SolverConfig(t_end=10.0, bc="periodic")):
            pass
        dev = float(np.abs(s.velocity() / u0 - 1.0).max())
        return dev < FLOW_RULE_TOL, f"u_ss={u0:.6f} m/s, max relative deviation {dev:.2e} at t={s.t:g} s"
    return _timed("flow_rule", body)


def arrest_pile(grid):
    return 0.02 * np.exp(-0.5 * ((grid.x - 0.5) / 0.1) ** 2)


def check_arrest() -> CheckResult:
    def body():
        cfg = SavageHutter(deg(15), GLASS_BEADS)
        grid = Grid1D.uniform(200, 0.0, 1.0)
        scfg = SolverConfig(t_end=1e9, bc="reflective")
        h0 = arrest_pile(grid)
        s = SimState(0.0, h0.copy(), np.zeros(grid.n))
        for _ in range(1000):
            s, _ = step(s, grid, cfg, scfg)
        fixed = np.array_equal(s.h, h0) and not np.any(s.hu)

        s = SimState(0.0, h0.copy(), 0.1 * h0)
        momentum = [float(np.sum(s.hu))]
        speed = [float(np.abs(s.velocity()).max())]
        steps = 0
        while np.any(s.hu) and steps < 100_000:
            s, _ = step(s, grid, cfg, scfg)
            momentum.append(float(np.sum(s.hu)))
            speed.append(float(np.abs(s.velocity()).max()))
            steps += 1
        stopped = not np.any(s.hu)
        monotone = bool(np.all(np.diff(momentum) <= 0) and np.all(np.diff(speed) <= 0))
        ok = fixed and stopped and monotone
        return ok, (f"static pile bitwise fixed: {fixed}; moving pile stopped: {stopped} "
                    f"after {steps} steps (t={s.t:.4f} s), monotone deceleration: {monotone}")
    return _timed("arrest", body)


COINCIDENCE_SCENARIO = """\
name = coincidence
[model]
type = savage_hutter
theta = 20 deg
k = 1
chi = 1
viscosity = off
[material]
delta0 = 25 deg
phi_int = 30 deg
theta1 = 25 deg
theta2 = 25 deg
beta = 0.136
ell = 0.001 m
[grid]
n = 200
x_min = 0 m
x_max = 1 m
[ic]
type = dam_break
h_left = 0.1 m
h_right = 0 m
x0 = 0.3 m
[solver]
t_end = 0.2 s
bc = reflective
[output]
interval = 0.05 s
"""


def _same_tree(a: Path, b: Path, names) -> bool:
    return all(filecmp.cmp(a / n, b / n, shallow=False) for n in names)


def check_coincidence() -> CheckResult:
    def body():
        scenario = parse_scenario(COINCIDENCE_SCENARIO)
        with tempfile.TemporaryDirectory() as tmp:
            out = run_compare(scenario, Path(tmp) / "cmp")
            same = _same_tree(out / "savage_hutter", out / "mu_i", ("fields.csv", "diagnostics.csv"))
            rows = (out / "compare.csv").read_text().count("\n") - 1
        return same, f"savage_hutter/ and mu_i/ byte-identical: {same} ({rows} frames)"
    return _timed("coincidence", body)


def check_constitutive(seed: int = 20240611, npts: int = 1000) -> CheckResult:
    def body():
        rng = np.random.default_rng(seed)
        msgs = []
        ok = True
        p = POULIQUEN
        mu1, mu2 = p.mu1, p.mu2

        lim0 = cl.mu_of_I(0.0, mu1, mu2, 0.3) == mu1
        lim_inf = abs(cl.mu_of_I(1e12, mu1, mu2, 0.3) - mu2) < 1e-9
        ok &= lim0 and lim_inf
        msgs.append(f"limits {lim0 and lim_inf}")

        I = np.sort(rng.uniform(1e-4, 10.0, npts))
        mono_I = bool(np.all(np.diff(cl.mu_of_I(I, mu1, mu2, 0.3)) > 0))
        Fr = np.sort(rng.uniform(1e-3, 10.0, npts))
        mono_fr = bool(np.all(np.diff(cl.mu_basal(Fr, 0.01, p)) > 0))
        hs = np.sort(rng.uniform(1e-3, 1.0, npts))
        mono_h = bool(np.all(np.diff(cl.mu_basal(1.0, hs, p)) < 0))
        ok &= mono_I and mono_fr and mono_h
        msgs.append(f"monotone {mono_I and mono_fr and mono_h}")

        h = rng.uniform(1e-3, 1.0, npts)
        theta = rng.uniform(0.0, deg(60), npts)
        Ir = rng.uniform(1e-3, 2.0, npts)
        mat = GLASS_BEADS
        subst_rel = 0.0
        for hk, tk, ik in zip(h, theta, Ir):
            fr = cl.froude(cl.bagnold_mean_velocity(ik, hk, tk, mat), hk, tk)
            lhs = cl.mu_basal(fr, hk, p)
            rhs = cl.mu_of_I(ik, mu1, mu2, cl.i_zero(hk, mat, p))
            subst_rel = max(subst_rel, abs(lhs - rhs) / abs(rhs))
        ok &= subst_rel < SUBSTITUTION_TOL
        msgs.append(f"substitution identity max rel {subst_rel:.1e}")

        stress_rel = 0.0
        for _ in range(npts):
            a, c = rng.normal(size=2) * 10.0
            D = SymTensor2(a, c, -a)
            pr = rng.uniform(1.0, 1e4)
            I0 = rng.uniform(0.05, 2.0)
            tau = cl.mu_I_stress(pr, D, I0, mu1, mu2, mat)
            expected = cl.mu_of_I(cl.inertial_number(cl.second_invariant(D), pr, mat), mu1, mu2, I0) * pr
            stress_rel = max(stress_rel, abs(cl.second_invariant(tau) - expected) / expected)
            stress_rel = max(stress_rel, abs(float(tau.trace)) / expected)
        ok &= stress_rel < STRESS_TOL
        msgs.append(f"|tau| = mu p max rel {stress_rel:.1e}")

        k_ok = True
        for _ in range(npts):
            phi = rng.uniform(0.0, deg(80))
            delta = rng.uniform(0.0, phi)
            m = MaterialParams(1e-3, 2500.0, 0.6, phi, delta)
            for conv in ("printed", "sqrt"):
                k_ok &= cl.earth_pressure_K(1, m, conv) <= cl.earth_pressure_K(-1, m, conv)
        ok &= k_ok
        msgs.append(f"K_act <= K_pas {k_ok}")
        return bool(ok), "; ".join(msgs)
    return _timed("constitutive", body)


def viscous_case():
    """Periodic sinusoidal velocity on a gently varying depth."""
    n = 64
    grid = Grid1D.uniform(n, 0.0, 1.0)
    h = 0.05 + 0.01 * np.sin(2 * np.pi * grid.x)
    u = 0.2 + 0.1 * np.sin(2 * np.pi * grid.x)
    cfg = MuIRheology(deg(26), POULIQUEN, viscosity="constant", nu_const=1.0)
    return grid, h, u, cfg


def check_viscous(t_final: float = 0.01, nsteps: int = 1600, ref_dt: float = 1e-6) -> CheckResult:
    def body():
        grid, h, u0, cfg = viscous_case()
        s = SimState(0.0, h.copy(), h * u0)
        dt = t_final / nsteps
        p0 = float(np.sum(s.hu) * grid.dx)
        amp = [np.ptp(u0) / 2]
        mom_rel = 0.0
        for _ in range(nsteps):
            s = viscous_solve(s, dt, grid, cfg, bc="periodic")
            amp.append(np.ptp(s.velocity()) / 2)
            mom_rel = max(mom_rel, abs(float(np.sum(s.hu) * grid.dx) - p0) / abs(p0))
        decreasing = bool(np.all(np.diff(amp) < 0))
        ref = explicit_diffusion_reference(h, u0, grid.dx, cfg.nu_const, t_final, ref_dt)
        err = float(np.abs(s.velocity() - ref).max())
        ok = decreasing and mom_rel < VISCOUS_MOMENTUM_TOL and err < VISCOUS_REF_TOL
        return ok, (f"amplitude strictly decreasing: {decreasing}; momentum drift {mom_rel:.1e}; "
                    f"L_inf vs explicit reference {err:.2e}")
    return _timed("viscous", body)


DETERMINISM_SCENARIO = """\
name = determinism
[model]
type = mu_i
theta = 26 deg
viscosity = formula
[material]
delta0 = 25 deg
phi_int = 30 deg
theta1 = 21 deg
theta2 = 31 deg
beta = 0.136
ell = 0.001 m
[grid]
n = 150
x_min = 0 m
x_max = 1 m
[ic]
type = gaussian_pile
h0 = 0.05 m
x0 = 0.3 m
width = 0.05 m
[solver]
t_end = 0.2 s
bc = open
[output]
interval = 0.02 s
"""


def check_determinism() -> CheckResult:
    def body():
        scenario = parse_scenario(DETERMINISM_SCENARIO)
        with tempfile.TemporaryDirectory() as tmp:
            tmp = Path(tmp)
            run_to_directory(scenario, tmp / "a")
            run_to_directory(scenario, tmp / "b")
            same_run = _same_tree(tmp / "a", tmp / "b", ("fields.csv", "diagnostics.csv"))
            run_compare(scenario, tmp / "c1")
            run_compare(scenario, tmp / "c2")
            names = ("compare.csv", "savage_hutter/fields.csv", "savage_hutter/diagnostics.csv",
                     "mu_i/fields.csv", "mu_i/diagnostics.csv")
            same_cmp = _same_tree(tmp / "c1", tmp / "c2", names)
        return same_run and same_cmp, f"run byte-identical: {same_run}; compare byte-identical: {same_cmp}"
    return _timed("determinism", body)


SUITES: dict[str, Callable[[], CheckResult]] = {
    "well_balance": check_well_balance,
    "mass": check_mass,
    "ritter": check_ritter,
    "flow_rule": check_flow_rule,
    "arrest": check_arrest,
    "coincidence": check_coincidence,
    "constitutive": check_constitutive,
    "viscous": check_viscous,
    "determinism": check_determinism,
}


def run_suites(names=None) -> list[CheckResult]:
    names = list(SUITES) if names in (None, "all", ["all"]) else list(names)
    unknown = [n for n in names if n not in SUITES]
    if unknown:
        raise KeyError(f"unknown suite(s) {unknown}; choose from {sorted(SUITES)} or 'all'")
    warmup()
    return [SUITES[n]() for n in names]
