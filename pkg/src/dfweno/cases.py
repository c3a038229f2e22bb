"""Benchmark problem definitions.

Meshes, initial fields, boundary handling, exact solutions for the smooth
cases, and the Mach-number maps used by the robustness sweeps.  All cases
run with gamma = 1.4.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .pipeline import BC_CODES, fill_ghosts_1d, fill_ghosts_2d
from .state import Field1D, Field2D, GammaModel, Mesh1D, Mesh2D

GAMMA = GammaModel(1.4)

# 3-point Gauss rule on a unit cell, as offsets from the center in units
# of the cell width; degree-5 exactness keeps the initialization error far
# below the scheme's discretization error.
_G3_OFFSET = (-0.5 * math.sqrt(0.6), 0.0, 0.5 * math.sqrt(0.6))
_G3_WEIGHT = (5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0)

HURRICANE_ENTROPY = 25.0
RAREFACTION_ENTROPY = 1.5
_DIAG_SPEED = 0.6323


@dataclass(frozen=True)
class CaseSpec:
    """Static description of one benchmark problem."""

    name: str
    ndim: int
    xlim: tuple[float, float]
    nx: int
    bcx: str
    cfl: float = 0.5
    ylim: tuple[float, float] | None = None
    ny: int = 0
    bcy: str = "free"
    t_end: float | None = None
    max_steps: int | None = None
    dt_ratio: float | None = None  # fixed dt = dt_ratio * dx when set
    sweep_param: str | None = None
    sweep_default: float | None = None
    has_exact: bool = False
    collision_free: bool = False  # smooth accuracy runs drop the numerical
    #                               collision time entirely


CASES: dict[str, CaseSpec] = {
    "sine_1d": CaseSpec(
        name="sine_1d", ndim=1, xlim=(0.0, 2.0), nx=80, bcx="periodic",
        cfl=0.5, t_end=2.0, dt_ratio=0.25, has_exact=True,
        collision_free=True),
    "sine_2d": CaseSpec(
        name="sine_2d", ndim=2, xlim=(-1.0, 1.0), nx=80, bcx="periodic",
        ylim=(-1.0, 1.0), ny=80, bcy="periodic", cfl=0.1, t_end=2.0,
        has_exact=True, collision_free=True),
    "shu_osher": CaseSpec(
        name="shu_osher", ndim=1, xlim=(0.0, 10.0), nx=400, bcx="free",
        cfl=0.5, t_end=1.8),
    "problem_123": CaseSpec(
        name="problem_123", ndim=1, xlim=(0.0, 1.0), nx=100, bcx="free",
        cfl=0.5, t_end=0.14, sweep_param="p0", sweep_default=0.4),
    "hurricane": CaseSpec(
        name="hurricane", ndim=2, xlim=(-2.0, 2.0), nx=400,
        bcx="non_reflecting", ylim=(-2.0, 2.0), ny=400,
        bcy="non_reflecting", cfl=0.5, max_steps=50, sweep_param="v0",
        sweep_default=2.0 * math.sqrt(35.0)),
    "config3": CaseSpec(
        name="config3", ndim=2, xlim=(0.0, 1.0), nx=500, bcx="free",
        ylim=(0.0, 1.0), ny=500, bcy="free", cfl=0.5, t_end=0.6),
    "config6": CaseSpec(
        name="config6", ndim=2, xlim=(0.0, 2.0), nx=800, bcx="free",
        ylim=(0.0, 2.0), ny=800, bcy="free", cfl=0.5, t_end=1.6),
    "rarefaction": CaseSpec(
        name="rarefaction", ndim=2, xlim=(0.0, 1.0), nx=400, bcx="free",
        ylim=(0.0, 1.0), ny=400, bcy="free", cfl=0.5, t_end=0.15,
        sweep_param="p_side", sweep_default=0.4),
}

_ALIASES = {"config2": "rarefaction", "123": "problem_123"}

CASE_NAMES = tuple(CASES) + tuple(_ALIASES)


def fixed_step(spec: CaseSpec, mesh, flux_name: str) -> float | None:
    """Fixed accuracy-test time step, or None for adaptive stepping.

    The fourth-order time lane marches at dt_ratio * dx so spatial and
    temporal accuracy are exercised together.  The third-order lane would
    be swamped by its O(dt^3) error at that step, so it shrinks the step
    to dt_ratio * dx^(5/3), keeping the temporal error below the
    fifth-order spatial one.
    """
    if spec.dt_ratio is None:
        return None
    if flux_name == "lf":
        return spec.dt_ratio * mesh.dx ** (5.0 / 3.0)
    return spec.dt_ratio * mesh.dx


def get_case(name: str) -> CaseSpec:
    key = _ALIASES.get(name, name)
    try:
        return CASES[key]
    except KeyError:
        raise ValueError(
            f"unknown case {name!r}; available: {', '.join(sorted(CASE_NAMES))}"
        ) from None


def make_mesh(spec: CaseSpec, nx: int | None = None, ny: int | None = None):
    nx = spec.nx if nx is None else nx
    if spec.ndim == 1:
        return Mesh1D(nx, spec.xlim[0], spec.xlim[1])
    ny = (spec.ny if ny is None else ny) or nx
    return Mesh2D(nx, ny, spec.xlim[0], spec.xlim[1],
                  spec.ylim[0], spec.ylim[1])


# ---------------------------------------------------------------------------
# helpers

def _conserved_arrays(rho, u, v, p, gm: GammaModel = GAMMA) -> np.ndarray:
    rho = np.asarray(rho, dtype=float)
    u = np.broadcast_to(np.asarray(u, dtype=float), rho.shape)
    v = np.broadcast_to(np.asarray(v, dtype=float), rho.shape)
    p = np.broadcast_to(np.asarray(p, dtype=float), rho.shape)
    E = p / (gm.gamma - 1.0) + 0.5 * rho * (u * u + v * v)
    return np.stack([rho, rho * u, rho * v, E], axis=-1)


def _cell_average_1d(f, centers: np.ndarray, dx: float) -> np.ndarray:
    """3-point Gauss cell averages of a smooth profile f(x)."""
    acc = np.zeros_like(centers)
    for off, w in zip(_G3_OFFSET, _G3_WEIGHT):
        acc += w * f(centers + off * dx)
    return acc


def _field_1d(mesh: Mesh1D, rho, u, v, p) -> Field1D:
    field = Field1D.allocate(mesh)
    field.interior[:] = _conserved_arrays(rho, u, v, p)
    return field


def _field_2d(mesh: Mesh2D, rho, u, v, p) -> Field2D:
    field = Field2D.allocate(mesh)
    field.interior[:] = _conserved_arrays(rho, u, v, p)
    return field


# ---------------------------------------------------------------------------
# smooth accuracy cases

def _sine_average_1d(centers: np.ndarray, dx: float, shift: float,
                     wavenumber: float = math.pi) -> np.ndarray:
    return _cell_average_1d(
        lambda x: np.sin(wavenumber * (x - shift)), centers, dx)


def init_sine_1d(mesh: Mesh1D) -> Field1D:
    """Advecting density wave: rho = 1 + 0.2 sin(pi x), u = 1, p = 1."""
    rho = 1.0 + 0.2 * _sine_average_1d(mesh.centers(), mesh.dx, 0.0)
    return _field_1d(mesh, rho, 1.0, 0.0, 1.0)


def exact_sine_1d(mesh: Mesh1D, t: float) -> np.ndarray:
    """Cell-averaged exact solution at time t (interior shape)."""
    rho = 1.0 + 0.2 * _sine_average_1d(mesh.centers(), mesh.dx, t)
    return _conserved_arrays(rho, 1.0, 0.0, 1.0)


def init_sine_2d(mesh: Mesh2D) -> Field2D:
    """rho = 1 + 0.2 sin(pi x) sin(pi y), u = v = 1, p = 1."""
    sx = _sine_average_1d(mesh.centers_x(), mesh.dx, 0.0)
    sy = _sine_average_1d(mesh.centers_y(), mesh.dy, 0.0)
    rho = 1.0 + 0.2 * np.outer(sx, sy)
    return _field_2d(mesh, rho, 1.0, 1.0, 1.0)


def exact_sine_2d(mesh: Mesh2D, t: float) -> np.ndarray:
    sx = _sine_average_1d(mesh.centers_x(), mesh.dx, t)
    sy = _sine_average_1d(mesh.centers_y(), mesh.dy, t)
    rho = 1.0 + 0.2 * np.outer(sx, sy)
    return _conserved_arrays(rho, 1.0, 1.0, 1.0)


# ---------------------------------------------------------------------------
# shock cases

def init_shu_osher(mesh: Mesh1D) -> Field1D:
    """Mach-3 shock running into a sinusoidally perturbed density field."""
    x = mesh.centers()
    left = x < 1.0
    rho = np.where(left, 3.857134,
                   1.0 + 0.2 * _cell_average_1d(
                       lambda s: np.sin(5.0 * s), x, mesh.dx))
    u = np.where(left, 2.629369, 0.0)
    p = np.where(left, 10.33333, 1.0)
    return _field_1d(mesh, rho, u, 0.0, p)


def init_123(mesh: Mesh1D, p0: float) -> Field1D:
    """Two rarefactions pulling the center toward vacuum."""
    if not p0 > 0.0:
        raise ValueError(f"p0 must be positive, got {p0}")
    x = mesh.centers()
    u = np.where(x < 0.5, -2.0, 2.0)
    return _field_1d(mesh, np.ones_like(x), u, 0.0, p0)


def mach_123(p0: float) -> float:
    if not p0 > 0.0:
        raise ValueError(f"p0 must be positive, got {p0}")
    return 2.0 / math.sqrt(GAMMA.gamma * p0)


def p0_for_mach_123(ma: float) -> float:
    if not ma > 0.0:
        raise ValueError(f"Mach number must be positive, got {ma}")
    return 4.0 / (GAMMA.gamma * ma * ma)


def init_hurricane(mesh: Mesh2D, v0: float) -> Field2D:
    """Solid rotation around a central vacuum point at entropy 25."""
    if not v0 > 0.0:
        raise ValueError(f"v0 must be positive, got {v0}")
    x = mesh.centers_x()[:, None]
    y = mesh.centers_y()[None, :]
    theta = np.arctan2(y, x)
    rho = np.ones((mesh.nx, mesh.ny))
    u = v0 * np.sin(theta) * np.ones_like(rho)
    v = -v0 * np.cos(theta) * np.ones_like(rho)
    p = HURRICANE_ENTROPY  # A * rho0**gamma with rho0 = 1
    return _field_2d(mesh, rho, u, v, p)


def mach_hurricane(v0: float) -> float:
    return v0 / math.sqrt(GAMMA.gamma * HURRICANE_ENTROPY)


def v0_for_mach_hurricane(ma: float) -> float:
    if not ma > 0.0:
        raise ValueError(f"Mach number must be positive, got {ma}")
    return ma * math.sqrt(GAMMA.gamma * HURRICANE_ENTROPY)


def _rarefaction_side_state(p_side: float) -> tuple[float, float]:
    if not p_side > 0.0:
        raise ValueError(f"side pressure must be positive, got {p_side}")
    rho = (p_side / RAREFACTION_ENTROPY) ** (1.0 / GAMMA.gamma)
    return rho, p_side


def mach_rarefaction(p_side: float) -> float:
    rho, _ = _rarefaction_side_state(p_side)
    c = math.sqrt(GAMMA.gamma * RAREFACTION_ENTROPY
                  * rho ** (GAMMA.gamma - 1.0))
    return _DIAG_SPEED * math.sqrt(2.0) / c


def p_side_for_mach_rarefaction(ma: float) -> float:
    if not ma > 0.0:
        raise ValueError(f"Mach number must be positive, got {ma}")
    c = _DIAG_SPEED * math.sqrt(2.0) / ma
    rho = (c * c / (GAMMA.gamma * RAREFACTION_ENTROPY)) \
        ** (1.0 / (GAMMA.gamma - 1.0))
    return RAREFACTION_ENTROPY * rho ** GAMMA.gamma


# quadrant states listed counter-clockwise from the lower-left:
# (x < cx, y < cy), (x >= cx, y < cy), (x >= cx, y >= cy), (x < cx, y >= cy)
_QUADRANT_CORNER = {"config3": (0.7, 0.7), "config6": (1.0, 1.0),
                    "rarefaction": (0.5, 0.5)}
_QUADRANT_STATES = {
    "config3": ((0.138, 1.206, 1.206, 0.129),
                (0.5323, 0.0, 1.206, 0.3),
                (1.5, 0.0, 0.0, 1.5),
                (0.5323, 1.206, 0.0, 0.3)),
    "config6": ((1.0, -0.75, 0.5, 1.0),
                (3.0, -0.75, -0.5, 1.0),
                (1.0, 0.75, -0.5, 1.0),
                (2.0, 0.75, 0.5, 1.0)),
}


def init_riemann_quadrant(case: str, mesh: Mesh2D,
                          p_side: float | None = None) -> Field2D:
    """Piecewise-constant four-quadrant field for the 2-D Riemann cases."""
    key = _ALIASES.get(case, case)
    if key not in _QUADRANT_CORNER:
        raise ValueError(f"not a quadrant case: {case!r}")
    cx, cy = _QUADRANT_CORNER[key]
    if key == "rarefaction":
        if p_side is None:
            p_side = CASES[key].sweep_default
        rho_s, p_s = _rarefaction_side_state(p_side)
        d = _DIAG_SPEED
        states = ((1.0, -d, -d, 1.5), (rho_s, d, -d, p_s),
                  (1.0, d, d, 1.5), (rho_s, -d, d, p_s))
    else:
        states = _QUADRANT_STATES[key]
    x = mesh.centers_x()[:, None] >= cx
    y = mesh.centers_y()[None, :] >= cy
    quadrant = np.where(x, np.where(y, 2, 1), np.where(y, 3, 0))
    table = np.array([_conserved_arrays(*s) for s in states])
    field = Field2D.allocate(mesh)
    field.interior[:] = table[quadrant]
    return field


# ---------------------------------------------------------------------------
# dispatch helpers

def initial_field(spec: CaseSpec, mesh, sweep_value: float | None = None):
    """Initial condition of a case; sweep_value overrides the default
    sweep parameter where one exists."""
    if spec.name == "sine_1d":
        return init_sine_1d(mesh)
    if spec.name == "sine_2d":
        return init_sine_2d(mesh)
    if spec.name == "shu_osher":
        return init_shu_osher(mesh)
    if spec.name == "problem_123":
        p0 = spec.sweep_default if sweep_value is None else sweep_value
        return init_123(mesh, p0)
    if spec.name == "hurricane":
        v0 = spec.sweep_default if sweep_value is None else sweep_value
        return init_hurricane(mesh, v0)
    if spec.name in ("config3", "config6"):
        return init_riemann_quadrant(spec.name, mesh)
    if spec.name == "rarefaction":
        return init_riemann_quadrant(spec.name, mesh, sweep_value)
    raise ValueError(f"unknown case {spec.name!r}")


def exact_solution(spec: CaseSpec, mesh, t: float):
    """Cell-averaged exact solution, or None when the case has none."""
    if spec.name == "sine_1d":
        return exact_sine_1d(mesh, t)
    if spec.name == "sine_2d":
        return exact_sine_2d(mesh, t)
    return None


def mach_of(spec: CaseSpec, value: float) -> float:
    """Reference Mach number of a sweep-parameter value."""
    if spec.sweep_param == "p0":
        return mach_123(value)
    if spec.sweep_param == "v0":
        return mach_hurricane(value)
    if spec.sweep_param == "p_side":
        return mach_rarefaction(value)
    raise ValueError(f"case {spec.name!r} has no sweep parameter")


def sweep_value_for_mach(spec: CaseSpec, ma: float) -> float:
    """Sweep-parameter value that realizes a requested Mach number."""
    if spec.sweep_param == "p0":
        return p0_for_mach_123(ma)
    if spec.sweep_param == "v0":
        return v0_for_mach_hurricane(ma)
    if spec.sweep_param == "p_side":
        return p_side_for_mach_rarefaction(ma)
    raise ValueError(f"case {spec.name!r} has no sweep parameter")


def apply_boundary(field, spec: CaseSpec):
    """Fill all ghost layers of a field per the case boundary types."""
    if spec.ndim == 1:
        fill_ghosts_1d(field.data, field.mesh.ng, BC_CODES[spec.bcx])
    else:
        fill_ghosts_2d(field.data, field.mesh.ng, BC_CODES[spec.bcx],
                       BC_CODES[spec.bcy])
    return field
