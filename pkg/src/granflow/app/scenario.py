"""Scenario files: parsing, validation and initial-state construction.

A scenario is a UTF-8 ``key = value`` document with ``#`` comments and the
sections ``[model] [material] [grid] [ic] [solver] [output]``. Angles need an
explicit ``deg`` or ``rad`` suffix; other dimensional values may carry their
SI unit (``m``, ``s``, ``m/s``, ...) which is checked when present.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from ..constitutive import MaterialParams, PouliquenParams
from ..errors import BadValue, GranflowError, InconsistentModel, MissingKey
from ..models import G, H_EPS, ModelConfig, MuIRheology, SavageHutter, steady_velocity
from ..solver import Grid1D, SimState, SolverConfig

SECTIONS = ("model", "material", "grid", "ic", "solver", "output")
_NUMBER = re.compile(r"^([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*(\S*)$")


@dataclass(frozen=True)
class Topography:
    kind: str = "flat"  # flat | step | table
    b0: float = 0.0
    x0: float = 0.0
    table: tuple[tuple[float, float], ...] = ()

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        if self.kind == "step":
            return np.where(x >= self.x0, self.b0, 0.0)
        if self.kind == "table":
            xs, bs = zip(*self.table)
            return np.interp(x, xs, bs)
        return np.zeros_like(x)


@dataclass(frozen=True)
class InitialCondition:
    kind: str
    params: dict = field(default_factory=dict)


@dataclass(frozen=True)
class GridSpec:
    n: int
    x_min: float
    x_max: float


@dataclass(frozen=True)
class Scenario:
    name: str
    model: ModelConfig
    material: MaterialParams
    pouliquen: PouliquenParams | None
    grid: GridSpec
    topography: Topography
    ic: InitialCondition
    solver: SolverConfig
    output_dir: str = "out"
    frame_interval: float = 0.0
    # model-independent options kept so `compare` can build the sibling model
    sh_options: dict = field(default_factory=dict)
    mui_options: dict = field(default_factory=dict)

    def with_model(self, model: ModelConfig) -> "Scenario":
        return replace(self, model=model)


class _Doc:
    """Parsed key/value document that remembers line numbers."""

    def __init__(self, text: str):
        self.values: dict[tuple[str, str], tuple[str, int]] = {}
        self.used: set[tuple[str, str]] = set()
        section = ""
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if line.startswith("["):
                if not line.endswith("]"):
                    raise BadValue(line, "malformed section header", lineno)
                section = line[1:-1].strip().lower()
                if section not in SECTIONS:
                    raise BadValue(f"[{section}]", f"unknown section, expected one of {SECTIONS}", lineno)
                continue
            if "=" not in line:
                raise BadValue(line, "expected 'key = value'", lineno)
            key, value = (s.strip() for s in line.split("=", 1))
            if not key:
                raise BadValue(line, "empty key", lineno)
            k = (section, key.lower())
            if k in self.values:
                raise BadValue(self._name(k), f"duplicate key (first on line {self.values[k][1]})", lineno)
            self.values[k] = (value, lineno)

    @staticmethod
    def _name(k):
        return f"{k[0]}.{k[1]}" if k[0] else k[1]

    def has(self, section, key):
        return (section, key) in self.values

    def raw(self, section, key, default=None, required=False):
        k = (section, key)
        if k not in self.values:
            if required:
                raise MissingKey(self._name(k))
            return default, None
        self.used.add(k)
        return self.values[k]

    def text(self, section, key, default=None, choices=None):
        value, line = self.raw(section, key, default, required=default is None)
        value = value.strip().lower() if isinstance(value, str) else value
        if choices is not None and value not in choices:
            raise BadValue(self._name((section, key)), f"expected one of {sorted(choices)}, got {value!r}", line)
        return value

    def number(self, section, key, default=None, unit=None, positive=False, nonneg=False):
        value, line = self.raw(section, key, default, required=default is None)
        if line is None:
            return float(value)
        name = self._name((section, key))
        m = _NUMBER.match(value)
        if not m:
            raise BadValue(name, f"not a number: {value!r}", line)
        num, suffix = float(m.group(1)), m.group(2)
        if unit == "angle":
            if suffix == "deg":
                num = math.radians(num)
            elif suffix != "rad":
                raise BadValue(name, "angles need an explicit 'deg' or 'rad' suffix", line)
        elif suffix and suffix != unit:
            raise BadValue(name, f"expected unit {unit or 'none'!r}, got {suffix!r}", line)
        if not math.isfinite(num):
            raise BadValue(name, "must be finite", line)
        if positive and not num > 0:
            raise BadValue(name, "must be positive", line)
        if nonneg and num < 0:
            raise BadValue(name, "must be non-negative", line)
        return num

    def integer(self, section, key, default=None):
        value, line = self.raw(section, key, default, required=default is None)
        try:
            return int(value)
        except ValueError:
            raise BadValue(self._name((section, key)), f"not an integer: {value!r}", line) from None

    def line(self, section, key):
        return self.values.get((section, key), (None, None))[1]

    def unused(self):
        return sorted((self.values[k][1], self._name(k)) for k in self.values if k not in self.used)


def parse_scenario(text: str, base_dir: str | Path = ".") -> Scenario:
    """Parse and fully validate a scenario document.

    Raises:
        MissingKey: a required key is absent.
        BadValue: a value is malformed, out of range or has the wrong unit.
        InconsistentModel: the model cannot be built from the given parameters.
    """
    doc = _Doc(text)
    name, _ = doc.raw("", "name", default="scenario")

    if not doc.has("model", "type"):
        raise MissingKey("model")
    variant = doc.text("model", "type", choices={"savage_hutter", "mu_i"})
    theta = doc.number("model", "theta", default=0.0, unit="angle", nonneg=True)
    g = doc.number("model", "g", default=G, unit="m/s2", positive=True)

    material = _material(doc)
    pouliquen = _pouliquen(doc)

    sh_options = dict(
        k_policy=doc.text("model", "k_policy", default="constant", choices={"constant", "active_passive"}),
        K=doc.number("model", "k", default=1.0, positive=True),
        k_convention=doc.text("model", "k_convention", default="printed", choices={"printed", "sqrt"}),
    )
    mui_options = dict(
        chi=doc.number("model", "chi", default=1.0, positive=True),
        viscosity=doc.text("model", "viscosity", default="formula", choices={"formula", "constant", "off"}),
        nu_const=doc.number("model", "nu", default=0.0, nonneg=True),
    )
    if mui_options["viscosity"] == "constant" and not doc.has("model", "nu"):
        raise MissingKey("model.nu")

    model = _build_model(variant, theta, g, material, pouliquen, sh_options, mui_options, doc)

    n = doc.integer("grid", "n")
    x_min = doc.number("grid", "x_min", unit="m")
    x_max = doc.number("grid", "x_max", unit="m")
    if n < 2:
        raise BadValue("grid.n", "need at least 2 cells", doc.line("grid", "n"))
    if not x_min < x_max:
        raise BadValue("grid.x_max", "must exceed x_min", doc.line("grid", "x_max"))
    topo = _topography(doc, Path(base_dir))

    ic = _initial_condition(doc, model)

    try:
        solver = SolverConfig(
            t_end=doc.number("solver", "t_end", unit="s", nonneg=True),
            cfl=doc.number("solver", "cfl", default=0.9, positive=True),
            h_eps=doc.number("solver", "h_eps", default=H_EPS, unit="m", positive=True),
            dt_max=doc.number("solver", "dt_max", default=1e-2, unit="s", positive=True),
            bc=doc.text("solver", "bc", default="reflective", choices={"open", "reflective", "periodic"}),
            viscous_scheme=doc.text("solver", "viscous_scheme", default="implicit", choices={"implicit", "off"}),
        )
    except GranflowError as exc:
        if isinstance(exc, (MissingKey, BadValue)):
            raise
        raise BadValue("solver", str(exc)) from None

    output_dir, _ = doc.raw("output", "directory", default="out")
    interval = doc.number("output", "interval", default=0.0, unit="s", nonneg=True)

    leftovers = doc.unused()
    if leftovers:
        line, key = leftovers[0]
        raise BadValue(key, "unknown key", line)

    return Scenario(name=name, model=model, material=material, pouliquen=pouliquen,
                    grid=GridSpec(n, x_min, x_max), topography=topo, ic=ic, solver=solver,
                    output_dir=output_dir, frame_interval=interval,
                    sh_options=sh_options, mui_options=mui_options)


def load_scenario(path: str | Path) -> Scenario:
    path = Path(path)
    return parse_scenario(path.read_text(encoding="utf-8"), base_dir=path.parent)


def _material(doc: _Doc) -> MaterialParams:
    delta0 = doc.number("material", "delta0", default=0.0, unit="angle", nonneg=True)
    phi_int = doc.number("material", "phi_int", default=None, unit="angle") \
        if doc.has("material", "phi_int") else delta0
    try:
        return MaterialParams(
            d=doc.number("material", "d", default=1e-3, unit="m", positive=True),
            rho_star=doc.number("material", "rho_star", default=2500.0, unit="kg/m3", positive=True),
            phi_s=doc.number("material", "phi_s", default=0.6, positive=True),
            phi_int=phi_int,
            delta0=delta0,
        )
    except GranflowError as exc:
        raise BadValue("material", str(exc), doc.line("material", "delta0")) from None


def _pouliquen(doc: _Doc) -> PouliquenParams | None:
    keys = ("theta1", "theta2", "beta", "ell")
    present = [k for k in keys if doc.has("material", k)]
    if not present:
        return None
    for k in keys:
        if k not in present:
            raise MissingKey(f"material.{k}")
    try:
        return PouliquenParams(
            theta1=doc.number("material", "theta1", unit="angle"),
            theta2=doc.number("material", "theta2", unit="angle"),
            beta=doc.number("material", "beta", positive=True),
            ell=doc.number("material", "ell", unit="m", positive=True),
        )
    except GranflowError as exc:
        if isinstance(exc, (MissingKey, BadValue)):
            raise
        raise BadValue("material.theta1", str(exc), doc.line("material", "theta1")) from None


def build_model(variant, theta, g, material, pouliquen, sh_options, mui_options) -> ModelConfig:
    if variant == "savage_hutter":
        return SavageHutter(theta=theta, material=material, g=g, **sh_options)
    if pouliquen is None:
        raise InconsistentModel("material.theta1", "mu_i model needs theta1, theta2, beta and ell")
    return MuIRheology(theta=theta, pouliquen=pouliquen, g=g, material=material, **mui_options)


def _build_model(variant, theta, g, material, pouliquen, sh_options, mui_options, doc) -> ModelConfig:
    if variant == "mu_i" and pouliquen is None:
        raise MissingKey("material.theta1")
    try:
        return build_model(variant, theta, g, material, pouliquen, sh_options, mui_options)
    except InconsistentModel:
        raise
    except GranflowError as exc:
        raise InconsistentModel("model.theta", str(exc), doc.line("model", "theta")) from None


def _topography(doc: _Doc, base_dir: Path) -> Topography:
    kind = doc.text("grid", "topography", default="flat", choices={"flat", "step", "table"})
    if kind == "step":
        return Topography("step", b0=doc.number("grid", "step_b0", unit="m"),
                          x0=doc.number("grid", "step_x0", unit="m"))
    if kind == "table":
        value, line = doc.raw("grid", "table", required=True)
        path = Path(value)
        if not path.is_absolute():
            path = base_dir / path
        if not path.is_file():
            raise BadValue("grid.table", f"file not found: {path}", line)
        try:
            data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
        except ValueError as exc:
            raise BadValue("grid.table", f"cannot read {path}: {exc}", line) from None
        if data.shape[1] != 2 or data.shape[0] < 2 or np.any(np.diff(data[:, 0]) <= 0):
            raise BadValue("grid.table", "need columns x,b with at least two increasing x", line)
        return Topography("table", table=tuple(map(tuple, data.tolist())))
    return Topography()


_IC_KEYS = {
    "dam_break": (("h_left", "m"), ("h_right", "m"), ("x0", "m")),
    "uniform": (("h0", "m"), ("u0", "m/s")),
    "gaussian_pile": (("h0", "m"), ("x0", "m"), ("width", "m"), ("u0", "m/s")),
    "lake_at_rest": (("eta", "m"),),
    "steady_uniform": (("h0", "m"),),
}
_IC_OPTIONAL = {("gaussian_pile", "u0"): 0.0, ("uniform", "u0"): 0.0}
_SIGNED = {"u0", "x0", "eta"}


def _initial_condition(doc: _Doc, model: ModelConfig) -> InitialCondition:
    kind = doc.text("ic", "type", choices=set(_IC_KEYS))
    params = {}
    for key, unit in _IC_KEYS[kind]:
        default = _IC_OPTIONAL.get((kind, key))
        params[key] = doc.number("ic", key, default=default, unit=unit, nonneg=key not in _SIGNED)
    if kind == "gaussian_pile" and params["width"] <= 0:
        raise BadValue("ic.width", "must be positive", doc.line("ic", "width"))
    if kind == "steady_uniform":
        if not isinstance(model, MuIRheology):
            raise InconsistentModel("ic.type", "steady_uniform needs the mu_i model", doc.line("ic", "type"))
        p = model.pouliquen
        if not p.theta1 < model.theta < p.theta2:
            raise InconsistentModel("model.theta", "steady_uniform needs theta1 < theta < theta2",
                                    doc.line("model", "theta"))
    return InitialCondition(kind, params)


def build_grid(scenario: Scenario) -> Grid1D:
    gs = scenario.grid
    return Grid1D.uniform(gs.n, gs.x_min, gs.x_max, b=scenario.topography.evaluate)


def build_initial_state(scenario: Scenario) -> tuple[Grid1D, SimState]:
    """Cell-centred realization of the scenario's initial condition."""
    grid = build_grid(scenario)
    x, b = grid.x, grid.b
    p = scenario.ic.params
    kind = scenario.ic.kind
    if kind == "dam_break":
        h = np.where(x < p["x0"], p["h_left"], p["h_right"])
        u = np.zeros_like(x)
    elif kind == "uniform":
        h = np.full_like(x, p["h0"])
        u = np.full_like(x, p["u0"])
    elif kind == "gaussian_pile":
        h = p["h0"] * np.exp(-0.5 * ((x - p["x0"]) / p["width"]) ** 2)
        u = np.full_like(x, p["u0"])
    elif kind == "lake_at_rest":
        h = np.maximum(0.0, p["eta"] - b)
        u = np.zeros_like(x)
    elif kind == "steady_uniform":
        h = np.full_like(x, p["h0"])
        u = np.full_like(x, float(steady_velocity(p["h0"], scenario.model)))
    else:  # pragma: no cover - rejected by the parser
        raise ValueError(kind)
    h = np.asarray(h, dtype=float)
    hu = np.where(h >= scenario.solver.h_eps, h * u, 0.0)
    return grid, SimState(0.0, h, hu)
