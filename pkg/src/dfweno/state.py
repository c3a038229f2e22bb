"""Gas states, meshes and fields for the structured finite-volume solver.

Conserved variables are ordered (rho, rho*u, rho*v, rho*E) everywhere,
including 1-D runs where the v slot stays zero.  Fields carry ``NG`` ghost
layers on every side; kernels index the padded array directly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

NG = 3

IRHO, IMX, IMY, IE = 0, 1, 2, 3


@dataclass(frozen=True)
class GammaModel:
    """Ideal-gas model: ratio of specific heats plus the derived internal
    degree-of-freedom count used by the kinetic flux."""

    gamma: float = 1.4

    def __post_init__(self):
        if not 1.0 < self.gamma <= 2.0:
            raise ValueError(f"gamma out of range (1, 2]: {self.gamma}")

    @property
    def K(self) -> float:
        return (4.0 - 2.0 * self.gamma) / (self.gamma - 1.0)


@dataclass(frozen=True)
class PrimitiveState:
    rho: float
    u: float
    v: float
    p: float


@dataclass(frozen=True)
class ConservedState:
    rho: float
    mx: float
    my: float
    E: float

    def as_array(self) -> np.ndarray:
        return np.array([self.rho, self.mx, self.my, self.E])


def primitive_to_conserved(prim: PrimitiveState, gm: GammaModel) -> ConservedState:
    if prim.rho <= 0.0 or prim.p <= 0.0:
        raise ValueError(f"non-physical primitive state: rho={prim.rho}, p={prim.p}")
    E = prim.p / (gm.gamma - 1.0) + 0.5 * prim.rho * (prim.u**2 + prim.v**2)
    return ConservedState(prim.rho, prim.rho * prim.u, prim.rho * prim.v, E)


def conserved_to_primitive(w: ConservedState, gm: GammaModel) -> PrimitiveState:
    if w.rho <= 0.0:
        raise ValueError(f"non-physical conserved state: rho={w.rho}")
    u = w.mx / w.rho
    v = w.my / w.rho
    p = (gm.gamma - 1.0) * (w.E - 0.5 * w.rho * (u * u + v * v))
    if p <= 0.0:
        raise ValueError(f"non-physical conserved state: p={p}")
    return PrimitiveState(w.rho, u, v, p)


def is_physical(w: ConservedState, gm: GammaModel) -> bool:
    if not all(math.isfinite(x) for x in (w.rho, w.mx, w.my, w.E)):
        return False
    if w.rho <= 0.0:
        return False
    p = (gm.gamma - 1.0) * (w.E - 0.5 * (w.mx**2 + w.my**2) / w.rho)
    return p > 0.0


def sound_speed(prim: PrimitiveState, gm: GammaModel) -> float:
    return math.sqrt(gm.gamma * prim.p / prim.rho)


# ---------------------------------------------------------------------------
# frame rotation

def rotate_to_local(w: ConservedState, n: tuple[float, float]) -> ConservedState:
    """Rotate momentum into the frame of unit normal ``n``; rho, E unchanged.

    Local x is the normal direction, local y the tangent (n rotated +90deg).
    """
    nx, ny = n
    mn = nx * w.mx + ny * w.my
    mt = -ny * w.mx + nx * w.my
    return ConservedState(w.rho, mn, mt, w.E)


def rotate_to_global(w: ConservedState, n: tuple[float, float]) -> ConservedState:
    nx, ny = n
    mx = nx * w.mx - ny * w.my
    my = ny * w.mx + nx * w.my
    return ConservedState(w.rho, mx, my, w.E)


# ---------------------------------------------------------------------------
# characteristic transform
#
# Left/right eigenvector matrices of the conserved-variable Euler Jacobian
# in the axis direction, evaluated at a single reference state.  Rows of L
# are ordered (u-c, u entropy, u shear, u+c).

@njit(cache=True, inline='always')
def eigen_x(w, gamma, L, R):
    """Fill L, R for the x-direction Jacobian at conserved state w (len 4).

    Returns True when w is physical; otherwise leaves identity matrices so
    callers can fall back to component-wise reconstruction.
    """
    for a in range(4):
        for b in range(4):
            L[a, b] = 1.0 if a == b else 0.0
            R[a, b] = 1.0 if a == b else 0.0
    rho = w[0]
    if not rho > 0.0:
        return False
    u = w[1] / rho
    v = w[2] / rho
    ek = 0.5 * (u * u + v * v)
    p = (gamma - 1.0) * (w[3] - rho * ek)
    if not p > 0.0:
        return False
    c = math.sqrt(gamma * p / rho)
    H = (w[3] + p) / rho
    b1 = (gamma - 1.0) / (c * c)
    b2 = b1 * ek

    R[0, 0] = 1.0;       R[0, 1] = 1.0;  R[0, 2] = 0.0; R[0, 3] = 1.0
    R[1, 0] = u - c;     R[1, 1] = u;    R[1, 2] = 0.0; R[1, 3] = u + c
    R[2, 0] = v;         R[2, 1] = v;    R[2, 2] = 1.0; R[2, 3] = v
    R[3, 0] = H - u * c; R[3, 1] = ek;   R[3, 2] = v;   R[3, 3] = H + u * c

    L[0, 0] = 0.5 * (b2 + u / c)
    L[0, 1] = -0.5 * (b1 * u + 1.0 / c)
    L[0, 2] = -0.5 * b1 * v
    L[0, 3] = 0.5 * b1
    L[1, 0] = 1.0 - b2
    L[1, 1] = b1 * u
    L[1, 2] = b1 * v
    L[1, 3] = -b1
    L[2, 0] = -v
    L[2, 1] = 0.0
    L[2, 2] = 1.0
    L[2, 3] = 0.0
    L[3, 0] = 0.5 * (b2 - u / c)
    L[3, 1] = -0.5 * (b1 * u - 1.0 / c)
    L[3, 2] = -0.5 * b1 * v
    L[3, 3] = 0.5 * b1
    return True


_ROT_Y = np.array([
    [1.0, 0.0, 0.0, 0.0],
    [0.0, 0.0, 1.0, 0.0],
    [0.0, -1.0, 0.0, 0.0],
    [0.0, 0.0, 0.0, 1.0],
])


def characteristic_matrices(wl: ConservedState, wr: ConservedState, axis: str,
                            gm: GammaModel) -> tuple[np.ndarray, np.ndarray, bool]:
    """(L, R, ok) at the arithmetic average of the two interface-adjacent
    cell averages.  ok=False means the average was non-physical and the
    matrices degenerate to identity."""
    wavg = 0.5 * (wl.as_array() + wr.as_array())
    L = np.empty((4, 4))
    R = np.empty((4, 4))
    if axis == "x":
        ok = eigen_x(wavg, gm.gamma, L, R)
        return L, R, bool(ok)
    if axis == "y":
        wloc = _ROT_Y @ wavg
        ok = eigen_x(wloc, gm.gamma, L, R)
        if not ok:
            return np.eye(4), np.eye(4), False
        # compose with the frame rotation so L acts on global states
        return L @ _ROT_Y, _ROT_Y.T @ R, True
    raise ValueError(f"axis must be 'x' or 'y', got {axis!r}")


def characteristic_project(stencil, wl: ConservedState, wr: ConservedState,
                           axis: str, gm: GammaModel) -> tuple[np.ndarray, bool]:
    """Project conserved stencil states onto characteristic variables.

    The same matrix (from the wl/wr average) is applied to every stencil
    entry so the per-component reconstructions stay consistent.
    """
    L, _, ok = characteristic_matrices(wl, wr, axis, gm)
    arr = np.array([s.as_array() if isinstance(s, ConservedState) else np.asarray(s)
                    for s in stencil])
    return arr @ L.T, ok


def characteristic_unproject(qs: np.ndarray, wl: ConservedState, wr: ConservedState,
                             axis: str, gm: GammaModel) -> np.ndarray:
    _, R, _ = characteristic_matrices(wl, wr, axis, gm)
    return np.atleast_2d(qs) @ R.T


# ---------------------------------------------------------------------------
# meshes and fields

@dataclass(frozen=True)
class Mesh1D:
    nx: int
    x0: float
    x1: float
    ng: int = NG

    def __post_init__(self):
        if self.nx < 2 * self.ng:
            raise ValueError(f"nx={self.nx} too small for ng={self.ng}")
        if not self.x1 > self.x0:
            raise ValueError("empty domain")

    @property
    def dx(self) -> float:
        return (self.x1 - self.x0) / self.nx

    def centers(self) -> np.ndarray:
        return self.x0 + (np.arange(self.nx) + 0.5) * self.dx


@dataclass(frozen=True)
class Mesh2D:
    nx: int
    ny: int
    x0: float
    x1: float
    y0: float
    y1: float
    ng: int = NG

    def __post_init__(self):
        if self.nx < 2 * self.ng or self.ny < 2 * self.ng:
            raise ValueError(f"mesh {self.nx}x{self.ny} too small for ng={self.ng}")
        if not (self.x1 > self.x0 and self.y1 > self.y0):
            raise ValueError("empty domain")

    @property
    def dx(self) -> float:
        return (self.x1 - self.x0) / self.nx

    @property
    def dy(self) -> float:
        return (self.y1 - self.y0) / self.ny

    def centers_x(self) -> np.ndarray:
        return self.x0 + (np.arange(self.nx) + 0.5) * self.dx

    def centers_y(self) -> np.ndarray:
        return self.y0 + (np.arange(self.ny) + 0.5) * self.dy


class Field1D:
    """Cell-averaged conserved field on a 1-D mesh, with ghost padding."""

    def __init__(self, mesh: Mesh1D, data: np.ndarray):
        expected = (mesh.nx + 2 * mesh.ng, 4)
        if data.shape != expected:
            raise ValueError(f"field shape {data.shape}, expected {expected}")
        self.mesh = mesh
        self.data = data

    @classmethod
    def allocate(cls, mesh: Mesh1D) -> "Field1D":
        return cls(mesh, np.zeros((mesh.nx + 2 * mesh.ng, 4)))

    @property
    def interior(self) -> np.ndarray:
        ng = self.mesh.ng
        return self.data[ng:ng + self.mesh.nx]

    def copy(self) -> "Field1D":
        return Field1D(self.mesh, self.data.copy())


class Field2D:
    """Cell-averaged conserved field on a 2-D mesh, with ghost padding.

    data[i, j, comp] with i the x index and j the y index.
    """

    def __init__(self, mesh: Mesh2D, data: np.ndarray):
        expected = (mesh.nx + 2 * mesh.ng, mesh.ny + 2 * mesh.ng, 4)
        if data.shape != expected:
            raise ValueError(f"field shape {data.shape}, expected {expected}")
        self.mesh = mesh
        self.data = data

    @classmethod
    def allocate(cls, mesh: Mesh2D) -> "Field2D":
        return cls(mesh, np.zeros((mesh.nx + 2 * mesh.ng, mesh.ny + 2 * mesh.ng, 4)))

    @property
    def interior(self) -> np.ndarray:
        ng = self.mesh.ng
        return self.data[ng:ng + self.mesh.nx, ng:ng + self.mesh.ny]

    def copy(self) -> "Field2D":
        return Field2D(self.mesh, self.data.copy())


def primitives_from_conserved_array(W: np.ndarray, gamma: float) -> np.ndarray:
    """Vectorized conserved -> (rho, u, v, p); shape preserved, last axis 4."""
    rho = W[..., IRHO]
    u = W[..., IMX] / rho
    v = W[..., IMY] / rho
    p = (gamma - 1.0) * (W[..., IE] - 0.5 * rho * (u * u + v * v))
    return np.stack([rho, u, v, p], axis=-1)
