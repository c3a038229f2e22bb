"""High-order interface reconstruction.

Three modes share one local convention: the owning cell spans [-dx, 0] with
the target interface at x = 0, and stencils are ordered so positive offsets
step across the target interface.  Kernels work in the scaled coordinate
u = x/dx, so smoothness indicators are pure functions of the stencil data;
derivatives returned by kernels are d/du and callers divide by dx.

* weno_ao_point: adaptive-order blend of one quartic (5-cell) and three
  quadratic (3-cell) candidates with WENO-Z style weights.
* df_cubic_point: mean-preserving quadratic whose deviation from the cell
  average is damped by a discontinuity-feedback factor alpha in (0, 1].
* vanleer_point: classic limited linear reconstruction.

Right-side states at an interface are obtained by mirroring the stencil and
negating the returned derivative; the helpers at the bottom of this module
do that bookkeeping for a single interface and are the reference against
which the bulk field kernels are tested.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .state import ConservedState, GammaModel, PrimitiveState, characteristic_matrices

# Gauss point locations on an edge: fractions (1-GC, GC) of the edge length
# from its lower endpoint, each with weight 1/2.
GAUSS_C = 0.5 + math.sqrt(3.0) / 6.0
GAUSS_OFFSETS = (-GAUSS_C, -(1.0 - GAUSS_C))
GAUSS_WEIGHT = 0.5

MODE_WENO_AO = 0
MODE_HYBRID = 1
MODE_VAN_LEER = 2

MODE_CODES = {"weno_ao": MODE_WENO_AO, "hybrid": MODE_HYBRID, "van_leer": MODE_VAN_LEER}


@dataclass(frozen=True)
class ReconConfig:
    """Knobs of the hybrid reconstruction.

    d_high is the linear weight granted to the quartic candidate, d_low the
    share of the remainder granted to the centered quadratic; eps regularizes
    the nonlinear weights; alpha_thres gates the feedback branch (a cell-side
    switches to the damped quadratic only when the largest feedback factor in
    its 3-cell neighborhood is strictly below the threshold).
    """

    d_high: float = 0.85
    d_low: float = 0.85
    eps: float = 1.0e-6
    alpha_thres: float = 0.5

    def __post_init__(self):
        if not 0.0 < self.d_high < 1.0:
            raise ValueError(f"d_high out of (0,1): {self.d_high}")
        if not 0.0 < self.d_low < 1.0:
            raise ValueError(f"d_low out of (0,1): {self.d_low}")
        if not self.eps > 0.0:
            raise ValueError("eps must be positive")
        if not 0.0 <= self.alpha_thres <= 1.0:
            raise ValueError(f"alpha_thres out of [0,1]: {self.alpha_thres}")


@dataclass(frozen=True)
class StencilValues:
    """Five cell averages (q[-2]..q[+2]) around the owning cell, plus dx."""

    q: np.ndarray
    dx: float

    def __post_init__(self):
        if np.shape(self.q) != (5,):
            raise ValueError("stencil must hold exactly 5 cell averages")
        if not self.dx > 0.0:
            raise ValueError("dx must be positive")


@dataclass(frozen=True)
class ReconResult:
    value: float
    deriv: float
    betas: np.ndarray
    tau_z: float


@njit(cache=True, inline='always')
def stencil_smoothness(qm2, qm1, q0, qp1, qp2):
    """Smoothness indicators (b0, b1, b2, b3, tau_z) of the four candidates.

    Each b is the sum over derivative orders q of dx^(2q-1) * integral over
    the owning cell of the squared q-th derivative, written in the scaled
    coordinate where it collapses to a data-only expression.
    """
    # quadratic candidates: p = a + b*u + c*u^2 on the cell u in [-1, 0]
    b0l = qm2 - 3.0 * qm1 + 2.0 * q0
    c0l = 0.5 * (qm2 - 2.0 * qm1 + q0)
    b1l = qp1 - q0
    c1l = 0.5 * (qm1 - 2.0 * q0 + qp1)
    b2l = qp1 - q0
    c2l = 0.5 * (q0 - 2.0 * qp1 + qp2)
    b0 = b0l * b0l - 2.0 * b0l * c0l + (16.0 / 3.0) * c0l * c0l
    b1 = b1l * b1l - 2.0 * b1l * c1l + (16.0 / 3.0) * c1l * c1l
    b2 = b2l * b2l - 2.0 * b2l * c2l + (16.0 / 3.0) * c2l * c2l

    # quartic candidate, coefficients of u^k
    c1 = (qm1 - 15.0 * q0 + 15.0 * qp1 - qp2) / 12.0
    c2 = (-qm2 + 6.0 * qm1 - 8.0 * q0 + 2.0 * qp1 + qp2) / 8.0
    c3 = (-qm1 + 3.0 * q0 - 3.0 * qp1 + qp2) / 6.0
    c4 = (qm2 - 4.0 * qm1 + 6.0 * q0 - 4.0 * qp1 + qp2) / 24.0
    i1 = (c1 * c1 + (4.0 / 3.0) * c2 * c2 + (9.0 / 5.0) * c3 * c3
          + (16.0 / 7.0) * c4 * c4 - 2.0 * c1 * c2 + 2.0 * c1 * c3
          - 2.0 * c1 * c4 - 3.0 * c2 * c3 + (16.0 / 5.0) * c2 * c4
          - 4.0 * c3 * c4)
    i2 = (4.0 * c2 * c2 + 12.0 * c3 * c3 + (144.0 / 5.0) * c4 * c4
          - 12.0 * c2 * c3 + 16.0 * c2 * c4 - 36.0 * c3 * c4)
    i3 = 36.0 * c3 * c3 + 192.0 * c4 * c4 - 144.0 * c3 * c4
    i4 = 576.0 * c4 * c4
    b3 = i1 + i2 + i3 + i4

    tz = (abs(b3 - b0) + abs(b3 - b1) + abs(b3 - b2)) / 3.0
    return b0, b1, b2, b3, tz


@njit(cache=True, inline='always')
def weno_ao_point(qm2, qm1, q0, qp1, qp2, d_high, d_low, eps, u_eval):
    """Adaptive-order reconstruction evaluated at scaled coordinate u_eval.

    Returns (value, d/du, b0, b1, b2, b3, tau_z).
    """
    b0, b1, b2, b3, tz = stencil_smoothness(qm2, qm1, q0, qp1, qp2)

    d3 = d_high
    d1 = (1.0 - d_high) * d_low
    d0 = 0.5 * (1.0 - d_high) * (1.0 - d_low)
    d2 = d0

    r0 = tz / (b0 + eps)
    r1 = tz / (b1 + eps)
    r2 = tz / (b2 + eps)
    r3 = tz / (b3 + eps)
    w0 = d0 * (1.0 + r0 * r0)
    w1 = d1 * (1.0 + r1 * r1)
    w2 = d2 * (1.0 + r2 * r2)
    w3 = d3 * (1.0 + r3 * r3)
    ws = w0 + w1 + w2 + w3
    w0 /= ws
    w1 /= ws
    w2 /= ws
    w3 /= ws

    # quadratic candidates
    a0 = (2.0 * qm2 - 7.0 * qm1 + 11.0 * q0) / 6.0
    b0l = qm2 - 3.0 * qm1 + 2.0 * q0
    c0l = 0.5 * (qm2 - 2.0 * qm1 + q0)
    a1 = (-qm1 + 5.0 * q0 + 2.0 * qp1) / 6.0
    b1l = qp1 - q0
    c1l = 0.5 * (qm1 - 2.0 * q0 + qp1)
    a2 = (2.0 * q0 + 5.0 * qp1 - qp2) / 6.0
    b2l = qp1 - q0
    c2l = 0.5 * (q0 - 2.0 * qp1 + qp2)

    # quartic candidate
    e0 = (2.0 * qm2 - 13.0 * qm1 + 47.0 * q0 + 27.0 * qp1 - 3.0 * qp2) / 60.0
    e1 = (qm1 - 15.0 * q0 + 15.0 * qp1 - qp2) / 12.0
    e2 = (-qm2 + 6.0 * qm1 - 8.0 * q0 + 2.0 * qp1 + qp2) / 8.0
    e3 = (-qm1 + 3.0 * q0 - 3.0 * qp1 + qp2) / 6.0
    e4 = (qm2 - 4.0 * qm1 + 6.0 * q0 - 4.0 * qp1 + qp2) / 24.0

    u = u_eval
    p0 = a0 + b0l * u + c0l * u * u
    p1 = a1 + b1l * u + c1l * u * u
    p2 = a2 + b2l * u + c2l * u * u
    p3 = e0 + u * (e1 + u * (e2 + u * (e3 + u * e4)))
    g0 = b0l + 2.0 * c0l * u
    g1 = b1l + 2.0 * c1l * u
    g2 = b2l + 2.0 * c2l * u
    g3 = e1 + u * (2.0 * e2 + u * (3.0 * e3 + u * 4.0 * e4))

    # the quartic enters through its deviation from the linear-weight blend
    # of the quadratics, so smooth data recovers it exactly
    val = (w3 * (p3 - d0 * p0 - d1 * p1 - d2 * p2) / d3
           + w0 * p0 + w1 * p1 + w2 * p2)
    der = (w3 * (g3 - d0 * g0 - d1 * g1 - d2 * g2) / d3
           + w0 * g0 + w1 * g1 + w2 * g2)
    return val, der, b0, b1, b2, b3, tz


@njit(cache=True, inline='always')
def df_cubic_point(qm, q0, qp, alpha, u_eval):
    """Feedback-damped quadratic at scaled coordinate u_eval.

    p(u) = q0 + alpha*((qp-q0)*(u+1/2) + (qm/2 - q0 + qp/2)*(u^2 - 1/3)),
    which keeps the cell average equal to q0 for every alpha.  Returns
    (value, d/du).
    """
    lin = qp - q0
    quad = 0.5 * qm - q0 + 0.5 * qp
    u = u_eval
    val = q0 + alpha * (lin * (u + 0.5) + quad * (u * u - 1.0 / 3.0))
    der = alpha * (lin + 2.0 * quad * u)
    return val, der


@njit(cache=True, inline='always')
def vanleer_slope(qm, q0, qp):
    """Harmonic-mean limited slope per cell width; zero at extrema."""
    dm = q0 - qm
    dp = qp - q0
    if dm * dp <= 0.0:
        return 0.0
    return (dm * abs(dp) + dp * abs(dm)) / (abs(dp) + abs(dm))


@njit(cache=True, inline='always')
def vanleer_prim_point(wm, w0, wp, gamma, u_eval, val, der):
    """Limited linear reconstruction in primitive variables at offset u_eval.

    wm, w0, wp are conserved cell (or line) averages in the evaluation
    frame.  The slope of each primitive component (rho, u, v, p) is limited
    separately, so the point value stays between the neighboring primitive
    states and a physical triple can never produce a negative density or
    pressure.  val receives the conserved point state; der receives the
    conserved derivative per cell width (chain rule at the point state).
    """
    g1 = gamma - 1.0
    rm = wm[0]
    r0 = w0[0]
    rp = wp[0]
    um = wm[1] / rm
    u0 = w0[1] / r0
    up = wp[1] / rp
    vm = wm[2] / rm
    v0 = w0[2] / r0
    vp = wp[2] / rp
    pm = g1 * (wm[3] - 0.5 * rm * (um * um + vm * vm))
    p0 = g1 * (w0[3] - 0.5 * r0 * (u0 * u0 + v0 * v0))
    pp = g1 * (wp[3] - 0.5 * rp * (up * up + vp * vp))
    sr = vanleer_slope(rm, r0, rp)
    su = vanleer_slope(um, u0, up)
    sv = vanleer_slope(vm, v0, vp)
    sp = vanleer_slope(pm, p0, pp)
    r = r0 + sr * u_eval
    u = u0 + su * u_eval
    v = v0 + sv * u_eval
    p = p0 + sp * u_eval
    val[0] = r
    val[1] = r * u
    val[2] = r * v
    val[3] = p / g1 + 0.5 * r * (u * u + v * v)
    der[0] = sr
    der[1] = u * sr + r * su
    der[2] = v * sr + r * sv
    der[3] = sp / g1 + 0.5 * (u * u + v * v) * sr + r * u * su + r * v * sv


@njit(cache=True)
def df_factor_point(rl, ul, vl, pl, rr, ur, vr, pr, gamma):
    """Discontinuity feedback factor in (0, 1] from the two states meeting
    at an interface Gauss point, expressed in the interface frame (u normal,
    v tangential)."""
    cl = math.sqrt(gamma * pl / rl)
    cr = math.sqrt(gamma * pr / rr)
    dp = abs(pl - pr)
    dman = ul / cl - ur / cr
    dmat = vl / cl - vr / cr
    d = dp / pl + dp / pr + dman * dman + dmat * dmat
    return 1.0 / (1.0 + d * d)


# ---------------------------------------------------------------------------
# scalar API used by tests and by the per-interface reference path

def weno_ao_reconstruct(s: StencilValues, cfg: ReconConfig, x_eval: float = 0.0) -> ReconResult:
    """Reconstruct at local physical coordinate x_eval (interface at 0)."""
    q = np.asarray(s.q, dtype=float)
    val, der, b0, b1, b2, b3, tz = weno_ao_point(
        q[0], q[1], q[2], q[3], q[4], cfg.d_high, cfg.d_low, cfg.eps, x_eval / s.dx)
    return ReconResult(val, der / s.dx, np.array([b0, b1, b2, b3]), tz)


def df_cubic_reconstruct(qm: float, q0: float, qp: float, alpha: float,
                         dx: float, x_eval: float = 0.0) -> tuple[float, float]:
    if not 0.0 < alpha <= 1.0:
        raise ValueError(f"alpha out of (0,1]: {alpha}")
    val, der = df_cubic_point(qm, q0, qp, alpha, x_eval / dx)
    return val, der / dx


def van_leer_reconstruct(qm: float, q0: float, qp: float) -> tuple[float, float, float]:
    """Returns (value at the cell's lower interface, value at the upper
    interface, limited slope per cell width)."""
    s = vanleer_slope(qm, q0, qp)
    return q0 - 0.5 * s, q0 + 0.5 * s, s


def df_factor(left: PrimitiveState, right: PrimitiveState, gm: GammaModel) -> float:
    if min(left.rho, left.p, right.rho, right.p) <= 0.0:
        raise ValueError("df_factor needs physical states on both sides")
    return df_factor_point(left.rho, left.u, left.v, left.p,
                           right.rho, right.u, right.v, right.p, gm.gamma)


def df_cell_product(factors) -> float:
    """Cell feedback value: product of the factors of all Gauss points on
    the cell's interfaces (8 in 2-D, 2 in 1-D)."""
    out = 1.0
    for f in factors:
        if not 0.0 < f <= 1.0:
            raise ValueError(f"feedback factor out of (0,1]: {f}")
        out *= f
    return out


def hybrid_select(alpha_tri, alpha_thres: float) -> bool:
    """True when the damped-quadratic branch fires: the largest cell
    feedback value in the 3-cell neighborhood is strictly below threshold."""
    a = max(alpha_tri)
    return a < alpha_thres


# ---------------------------------------------------------------------------
# per-interface reference reconstruction (both sides of one interface)

@dataclass(frozen=True)
class LineRecon:
    """Line-averaged interface states: value and normal derivative per side."""

    wl: np.ndarray
    wxl: np.ndarray
    wr: np.ndarray
    wxr: np.ndarray


def _side_values(stencil5: np.ndarray, proj: np.ndarray | None,
                 unproj: np.ndarray | None, cfg: ReconConfig,
                 u_evals) -> tuple[np.ndarray, np.ndarray]:
    """WENO-AO on each component of a 5x4 stencil (optionally in the
    projected basis), evaluated at the given scaled offsets."""
    data = stencil5 if proj is None else stencil5 @ proj.T
    vals = np.empty((len(u_evals), 4))
    ders = np.empty((len(u_evals), 4))
    for c in range(4):
        q = data[:, c]
        for k, u in enumerate(u_evals):
            v, d, *_ = weno_ao_point(q[0], q[1], q[2], q[3], q[4],
                                     cfg.d_high, cfg.d_low, cfg.eps, u)
            vals[k, c] = v
            ders[k, c] = d
    if unproj is not None:
        vals = vals @ unproj.T
        ders = ders @ unproj.T
    return vals, ders


def reconstruct_interface_line(window6: np.ndarray, alpha_l3, alpha_r3,
                               cfg: ReconConfig, mode: str, gm: GammaModel,
                               axis: str, dx: float) -> LineRecon:
    """Normal-direction pass at one interface.

    window6 holds the six conserved cell averages (i-2 .. i+3) straddling
    the interface between cells i (index 2) and i+1 (index 3); alpha_l3 and
    alpha_r3 are the cell feedback triplets centered on the owning cell of
    each side.  Derivatives are physical d/dx along +axis.
    """
    window6 = np.asarray(window6, dtype=float)
    if window6.shape != (6, 4):
        raise ValueError("window6 must be (6, 4)")
    mcode = MODE_CODES[mode]

    wl_ref = ConservedState(*window6[2])
    wr_ref = ConservedState(*window6[3])

    def one_side(stencil5, qm, q0, qp, alpha_tri, mirrored):
        sgn = -1.0 if mirrored else 1.0
        if mcode == MODE_VAN_LEER:
            val = np.empty(4)
            der = np.empty(4)
            vanleer_prim_point(qm, q0, qp, gm.gamma, 0.5, val, der)
            for c in range(4):
                der[c] = sgn * der[c] / dx
            return val, der
        if mcode == MODE_HYBRID and hybrid_select(alpha_tri, cfg.alpha_thres):
            val = np.empty(4)
            der = np.empty(4)
            for c in range(4):
                v, d = df_cubic_point(qm[c], q0[c], qp[c], alpha_tri[1], 0.0)
                val[c] = v
                der[c] = sgn * d / dx
            return val, der
        L, R, ok = characteristic_matrices(wl_ref, wr_ref, axis, gm)
        proj, unproj = (L, R) if ok else (None, None)
        vals, ders = _side_values(stencil5, proj, unproj, cfg, (0.0,))
        return vals[0], sgn * ders[0] / dx

    wl, wxl = one_side(window6[0:5], window6[1], window6[2], window6[3],
                       alpha_l3, mirrored=False)
    wr, wxr = one_side(window6[5:0:-1], window6[4], window6[3], window6[2],
                       alpha_r3, mirrored=True)
    return LineRecon(wl, wxl, wr, wxr)


def reconstruct_gauss_points(line5: np.ndarray, dline_center: np.ndarray,
                             alpha_tri, ref_pair, cfg: ReconConfig, mode: str,
                             gm: GammaModel, axis: str, dt_len: float):
    """Tangential pass for one side of one interface.

    line5 holds the side's line-averaged values on the five edges j-2..j+2
    (conserved components), dline_center the normal derivative of the center
    edge, alpha_tri the same-side cell feedback triplet (j-1, j, j+1), and
    ref_pair the two conserved cell averages adjacent to the interface (used
    for the characteristic basis; ``axis`` is the normal direction of the
    interface).  dt_len is the edge length (the tangential cell width).

    Returns (w, wn, wt): values, normal derivatives and tangential
    derivatives at the two Gauss points, each shaped (2, 4).  The normal
    derivative is held at the line value on both points.
    """
    line5 = np.asarray(line5, dtype=float)
    if line5.shape != (5, 4):
        raise ValueError("line5 must be (5, 4)")
    mcode = MODE_CODES[mode]
    offs = GAUSS_OFFSETS

    w = np.empty((2, 4))
    wt = np.empty((2, 4))
    wn = np.vstack([dline_center, dline_center])

    if mcode == MODE_VAN_LEER:
        for k, u in enumerate(offs):
            vanleer_prim_point(line5[1], line5[2], line5[3], gm.gamma,
                               u + 0.5, w[k], wt[k])
            wt[k] /= dt_len
        return w, wn, wt

    if mcode == MODE_HYBRID and hybrid_select(alpha_tri, cfg.alpha_thres):
        for c in range(4):
            for k, u in enumerate(offs):
                v, d = df_cubic_point(line5[1, c], line5[2, c], line5[3, c],
                                      alpha_tri[1], u)
                w[k, c] = v
                wt[k, c] = d / dt_len
        return w, wn, wt

    # the tangential pass is never mirrored: both Gauss points lie inside the
    # owning edge, at symmetric offsets from its upper end
    wl_ref = ConservedState(*np.asarray(ref_pair[0], dtype=float))
    wr_ref = ConservedState(*np.asarray(ref_pair[1], dtype=float))
    L, R, ok = characteristic_matrices(wl_ref, wr_ref, axis, gm)
    proj, unproj = (L, R) if ok else (None, None)
    vals, ders = _side_values(line5, proj, unproj, cfg, offs)
    return vals, wn, ders / dt_len
