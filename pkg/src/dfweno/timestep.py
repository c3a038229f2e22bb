"""Time integration drivers.

CFL step-size control, the three-stage strong-stability RK scheme for the
Lax-Friedrichs flux, the two-stage fourth-order scheme for the gas-kinetic
flux, and per-step failure reporting.

The two step combinators (ssp_rk3_step, s2o4_step) are generic: they treat
the state as a plain array and take the right-hand side as a callable, so
the same code advances a scalar ODE in tests and a full 2-D field in
production.  advance() wires them to the mesh sweeps; the right-hand side
closures validate the incoming state, so a breakdown in any stage surfaces
as a failed StepReport with the offending location.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dataclass_field

import numpy as np
from numba import njit

from .flux_gks import GksParams
from .pipeline import (
    BC_FREE,
    alpha_from_pairs_1d,
    alpha_from_pairs_2d,
    check_field_1d,
    check_field_2d,
    fill_ghosts_1d,
    fill_ghosts_2d,
    fill_ghosts_alpha_1d,
    fill_ghosts_alpha_2d,
    flux_interfaces_gks_1d,
    flux_interfaces_lf_1d,
    recon_interfaces_1d,
    swap_field_xy,
    swap_flux_back,
    sweep_x,
)
from .recon import MODE_CODES, ReconConfig
from .state import GammaModel


@dataclass
class StepContext:
    """Mesh, physics and scheme parameters shared by every step.

    ny == 0 marks a 1-D setup; dy/bcy are then ignored.
    """

    gm: GammaModel
    cfg: ReconConfig
    mode: str
    flux: str
    ng: int
    nx: int
    dx: float
    bcx: int
    ny: int = 0
    dy: float = 0.0
    bcy: int = BC_FREE
    gks: GksParams = dataclass_field(default_factory=GksParams)

    def __post_init__(self) -> None:
        if self.mode not in MODE_CODES:
            raise ValueError(f"unknown reconstruction mode {self.mode!r}")
        if self.flux not in ("gks", "lf"):
            raise ValueError(f"unknown flux {self.flux!r}")

    @property
    def mcode(self) -> int:
        return MODE_CODES[self.mode]

    @property
    def is_2d(self) -> bool:
        return self.ny > 0


@dataclass(frozen=True)
class StepReport:
    """Outcome of one time step; where holds grid indices (and the variable
    index for a cell-average failure) when ok is False."""

    ok: bool
    dt: float
    stages: int
    reason: str = ""
    where: tuple = ()


class StageFailure(Exception):
    """Internal signal: a stage produced a non-physical state or the flux
    solver broke down."""

    def __init__(self, reason: str, where: tuple):
        super().__init__(reason)
        self.reason = reason
        self.where = where


# ---------------------------------------------------------------------------
# CFL step size

@njit(cache=True)
def _max_signal_1d(W, ng, nx, gamma):
    smax = 0.0
    for i in range(nx):
        ia = ng + i
        rho = W[ia, 0]
        if not (rho > 0.0 and np.isfinite(rho)):
            return -1.0
        u = W[ia, 1] / rho
        v = W[ia, 2] / rho
        p = (gamma - 1.0) * (W[ia, 3] - 0.5 * rho * (u * u + v * v))
        if not (p > 0.0 and np.isfinite(p)):
            return -1.0
        s = abs(u) + np.sqrt(gamma * p / rho)
        if s > smax:
            smax = s
    return smax


@njit(cache=True)
def _max_signal_2d(W, ng, nx, ny, gamma):
    smax = 0.0
    for i in range(nx):
        for j in range(ny):
            ia = ng + i
            ja = ng + j
            rho = W[ia, ja, 0]
            if not (rho > 0.0 and np.isfinite(rho)):
                return -1.0
            u = W[ia, ja, 1] / rho
            v = W[ia, ja, 2] / rho
            p = (gamma - 1.0) * (W[ia, ja, 3] - 0.5 * rho * (u * u + v * v))
            if not (p > 0.0 and np.isfinite(p)):
                return -1.0
            s = abs(u) + abs(v) + np.sqrt(gamma * p / rho)
            if s > smax:
                smax = s
    return smax


def compute_dt(W: np.ndarray, cfl: float, ctx: StepContext) -> float:
    """CFL step from the fastest signal speed over interior cells."""
    if ctx.is_2d:
        s = _max_signal_2d(W, ctx.ng, ctx.nx, ctx.ny, ctx.gm.gamma)
        h = min(ctx.dx, ctx.dy)
    else:
        s = _max_signal_1d(W, ctx.ng, ctx.nx, ctx.gm.gamma)
        h = ctx.dx
    if s <= 0.0:
        raise ValueError("non-physical state in time-step estimate")
    return cfl * h / s


# ---------------------------------------------------------------------------
# interface time limiter

def time_limiter_weight(betas_left, betas_right, tau_z_left, tau_z_right,
                        eps: float = 1e-6) -> float:
    """Nonlinear weight damping the flux time derivative at an interface.

    Each side contributes 2*a2/(a1 + a2) built from the extreme smoothness
    indicators of its stencil; the interface takes the smaller side.
    """

    def side(betas, tz):
        bmin = min(betas)
        bmax = max(betas)
        a1 = 1.0 + (tz / (bmin + eps)) ** 2
        a2 = 1.0 + (tz / (bmax + eps)) ** 2
        return 2.0 * a2 / (a1 + a2)

    return min(side(betas_left, tau_z_left), side(betas_right, tau_z_right))


# ---------------------------------------------------------------------------
# generic step combinators

def ssp_rk3_step(w, dt, rhs):
    """Three-stage strong-stability update of an arbitrary state array."""
    w1 = w + dt * rhs(w)
    w2 = 0.75 * w + 0.25 * (w1 + dt * rhs(w1))
    return w / 3.0 + (2.0 / 3.0) * (w2 + dt * rhs(w2))


def s2o4_step(w, dt, rhs2):
    """Two-stage fourth-order update.

    rhs2 maps a state to (L, dtL, dtL_limited); the limited time derivative
    enters only the final correction, the predictor uses the raw one.
    """
    L1, Lt1, Lt1_lim = rhs2(w)
    ws = w + (0.5 * dt) * L1 + (0.125 * dt * dt) * Lt1
    _, _, Lt2_lim = rhs2(ws)
    return w + dt * L1 + (dt * dt) * (
        0.5 * Lt1 - Lt1_lim / 3.0 + Lt2_lim / 3.0)


# ---------------------------------------------------------------------------
# production right-hand sides

_VAR_NAME = {0: "density", 3: "pressure"}
_FLUX_FAIL = {
    1: "left interface state",
    2: "right interface state",
    3: "equilibrium interface state",
}


def _check_state(W, ctx: StepContext) -> None:
    if ctx.is_2d:
        code, i, j, comp = check_field_2d(W, ctx.ng, ctx.nx, ctx.ny,
                                          ctx.gm.gamma)
        if code:
            raise StageFailure(
                f"non-physical {_VAR_NAME[comp]} at cell ({i}, {j})",
                (i, j, comp))
    else:
        code, i, comp = check_field_1d(W, ctx.ng, ctx.nx, ctx.gm.gamma)
        if code:
            raise StageFailure(
                f"non-physical {_VAR_NAME[comp]} at cell {i}", (i, comp))


def _rhs_1d(W, alpha, dt, ctx: StepContext, want_time_flux: bool):
    """Fill ghosts, reconstruct and flux one 1-D field.

    Returns (L, Lt_raw, Lt_lim, gpa); the time-flux entries are None for
    the L-F path, gpa holds the interface pair factors of this stage."""
    _check_state(W, ctx)
    fill_ghosts_1d(W, ctx.ng, ctx.bcx)
    ng, nx = ctx.ng, ctx.nx
    nI = nx + 1
    wl = np.empty((nI, 4))
    wxl = np.empty((nI, 4))
    wr = np.empty((nI, 4))
    wxr = np.empty((nI, 4))
    omega = np.empty(nI)
    recon_interfaces_1d(W, alpha, ng, nx, ctx.dx, ctx.mcode,
                        ctx.cfg.alpha_thres, ctx.cfg.d_high, ctx.cfg.d_low,
                        ctx.cfg.eps, ctx.gm.gamma, wl, wxl, wr, wxr, omega)
    F = np.empty((nI, 4))
    gpa = np.empty(nI)
    inv = 1.0 / ctx.dx
    interior = slice(ng, ng + nx)
    if want_time_flux:
        Ft_raw = np.empty((nI, 4))
        Ft_lim = np.empty((nI, 4))
        code, i = flux_interfaces_gks_1d(wl, wxl, wr, wxr, omega, dt,
                                         ctx.gm.gamma, ctx.gm.K, ctx.gks.c1,
                                         ctx.gks.c2, F, Ft_raw, Ft_lim, gpa)
        if code:
            raise StageFailure(
                f"flux breakdown ({_FLUX_FAIL[code]}) at interface {i}", (i,))
        L = np.zeros_like(W)
        Lt_raw = np.zeros_like(W)
        Lt_lim = np.zeros_like(W)
        L[interior] = (F[:-1] - F[1:]) * inv
        Lt_raw[interior] = (Ft_raw[:-1] - Ft_raw[1:]) * inv
        Lt_lim[interior] = (Ft_lim[:-1] - Ft_lim[1:]) * inv
        return L, Lt_raw, Lt_lim, gpa
    code, i = flux_interfaces_lf_1d(wl, wr, ctx.gm.gamma, F, gpa)
    if code:
        raise StageFailure(
            f"flux breakdown ({_FLUX_FAIL[code]}) at interface {i}", (i,))
    L = np.zeros_like(W)
    L[interior] = (F[:-1] - F[1:]) * inv
    return L, None, None, gpa


def _rhs_2d(W, alpha, dt, ctx: StepContext, want_time_flux: bool):
    """Fill ghosts and run both directional sweeps of one 2-D field."""
    _check_state(W, ctx)
    fill_ghosts_2d(W, ctx.ng, ctx.bcx, ctx.bcy)
    ng, nx, ny = ctx.ng, ctx.nx, ctx.ny
    flux = "gks" if want_time_flux else "lf"
    resx = sweep_x(W, alpha, ng, nx, ny, ctx.dx, ctx.dy, ctx.mcode,
                   ctx.cfg.alpha_thres, ctx.cfg, ctx.gm, flux, dt, ctx.gks)
    if resx.code:
        i, j = resx.where
        raise StageFailure(
            "flux breakdown ({}) at x interface ({}, {})".format(
                _FLUX_FAIL[resx.code], i, j), (i, j))
    Ws = swap_field_xy(W)
    alphaT = np.ascontiguousarray(alpha.T)
    resy = sweep_x(Ws, alphaT, ng, ny, nx, ctx.dy, ctx.dx, ctx.mcode,
                   ctx.cfg.alpha_thres, ctx.cfg, ctx.gm, flux, dt, ctx.gks)
    if resy.code:
        j, i = resy.where
        raise StageFailure(
            "flux breakdown ({}) at y interface ({}, {})".format(
                _FLUX_FAIL[resy.code], i, j), (i, j))
    inx = 1.0 / ctx.dx
    iny = 1.0 / ctx.dy
    interior = (slice(ng, ng + nx), slice(ng, ng + ny))

    def divergence(Fx, Gy_local):
        G = swap_flux_back(Gy_local)
        out = np.zeros_like(W)
        out[interior] = (Fx[:-1] - Fx[1:]) * inx \
            + ((G[:-1] - G[1:]) * iny).transpose(1, 0, 2)
        return out

    L = divergence(resx.F, resy.F)
    pairs = (resx.gpa, resy.gpa)
    if want_time_flux:
        Lt_raw = divergence(resx.Ft_raw, resy.Ft_raw)
        Lt_lim = divergence(resx.Ft_lim, resy.Ft_lim)
        return L, Lt_raw, Lt_lim, pairs
    return L, None, None, pairs


def _update_alpha(alpha, pairs, ctx: StepContext) -> None:
    """Refresh the cell feedback factors from the pair factors recorded
    during the step's final stage; the next step uses them unchanged."""
    ng, nx = ctx.ng, ctx.nx
    if ctx.is_2d:
        gpx, gpy = pairs
        code = alpha_from_pairs_2d(gpx, gpy, ng, nx, ctx.ny, alpha)
        if code:
            raise StageFailure(
                "non-physical state while refreshing feedback factors", ())
        fill_ghosts_alpha_2d(alpha, ng, ctx.bcx, ctx.bcy)
    else:
        code = alpha_from_pairs_1d(pairs, ng, nx, alpha)
        if code:
            raise StageFailure(
                "non-physical state while refreshing feedback factors", ())
        fill_ghosts_alpha_1d(alpha, ng, ctx.bcx)


# ---------------------------------------------------------------------------
# full steps

def advance_rk3(W, alpha, dt, ctx: StepContext) -> StepReport:
    """One SSP-RK3 step with the L-F flux; W and alpha update in place."""
    last = {}

    def rhs(w):
        L, _, _, pairs = (_rhs_2d if ctx.is_2d else _rhs_1d)(
            w, alpha, dt, ctx, want_time_flux=False)
        last["pairs"] = pairs
        return L

    try:
        Wn1 = ssp_rk3_step(W, dt, rhs)
        W[...] = Wn1
        _check_state(W, ctx)
        _update_alpha(alpha, last["pairs"], ctx)
    except StageFailure as e:
        return StepReport(False, dt, 3, e.reason, e.where)
    return StepReport(True, dt, 3)


def advance_s2o4(W, alpha, dt, ctx: StepContext) -> StepReport:
    """One two-stage fourth-order step with the gas-kinetic flux."""
    last = {}

    def rhs2(w):
        L, Lt_raw, Lt_lim, pairs = (_rhs_2d if ctx.is_2d else _rhs_1d)(
            w, alpha, dt, ctx, want_time_flux=True)
        last["pairs"] = pairs
        return L, Lt_raw, Lt_lim

    try:
        Wn1 = s2o4_step(W, dt, rhs2)
        W[...] = Wn1
        _check_state(W, ctx)
        _update_alpha(alpha, last["pairs"], ctx)
    except StageFailure as e:
        return StepReport(False, dt, 2, e.reason, e.where)
    return StepReport(True, dt, 2)


def advance(W, alpha, dt, ctx: StepContext) -> StepReport:
    """One step with the integrator belonging to the configured flux."""
    if ctx.flux == "gks":
        return advance_s2o4(W, alpha, dt, ctx)
    return advance_rk3(W, alpha, dt, ctx)
