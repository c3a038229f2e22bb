"""Second-order gas-kinetic (BGK) interface flux.

The interface distribution combines an equilibrium part, relaxed toward over
the collision time, with two free-streaming half-Maxwellians carrying the
reconstructed left/right states and their slopes:

    f(t,u,xi) = (1 - e^(-t/tau)) g_c
              + ((t + tau) e^(-t/tau) - tau) (a_x^c u + a_y^c v) g_c
              + (t - tau + tau e^(-t/tau)) A_c g_c
              + e^(-t/tau) g_l (1 - (tau + t)(a^l.u) - tau A^l) H(u)
              + e^(-t/tau) g_r (1 - (tau + t)(a^r.u) - tau A^r) (1 - H(u))

All velocity-space integrals reduce to products of one-dimensional moments
of each Maxwellian; the time integral of every coefficient is done in closed
form, so evaluating the time-accumulated flux over a window costs a fixed
number of flops.

Conventions: psi = (1, u, v, (u^2+v^2+xi^2)/2); moments are normalized by
density (so <1> = 1) and multiplied back at assembly; slope vectors are
(a1, a2, a3, a4) in  a = a1 + a2 u + a3 v + a4 (u^2+v^2+xi^2)/2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .state import GammaModel

NMOM = 7  # u and v moment orders 0..6 cover every term assembled below


@dataclass(frozen=True)
class GksParams:
    """Collision-time model tau_n = (c1 + c2 * |dp|/(p_l+p_r)) * dt."""

    c1: float = 0.01
    c2: float = 5.0

    def __post_init__(self):
        # c1 = c2 = 0 selects the collisionless (pure equilibrium) limit
        if self.c1 < 0.0 or self.c2 < 0.0:
            raise ValueError("collision-time coefficients out of range")


@dataclass(frozen=True)
class MaxwellianState:
    rho: float
    U: float
    V: float
    lam: float


@dataclass(frozen=True)
class GaussPointRecon:
    """Left/right conserved values and spatial slopes at one Gauss point,
    in the interface frame (x normal, y tangential)."""

    wl: np.ndarray
    wxl: np.ndarray
    wyl: np.ndarray
    wr: np.ndarray
    wxr: np.ndarray
    wyr: np.ndarray


def maxwellian_from_conserved(w, gm: GammaModel) -> MaxwellianState:
    """Equivalent Maxwellian of a conserved state; lam = rho/(2p)."""
    w = np.asarray(w, dtype=float)
    rho = w[0]
    if not rho > 0.0:
        raise ValueError(f"non-physical density {rho}")
    U = w[1] / rho
    V = w[2] / rho
    ein = w[3] - 0.5 * rho * (U * U + V * V)
    if not ein > 0.0:
        raise ValueError("non-physical internal energy")
    lam = (gm.K + 2.0) * rho / (4.0 * ein)
    return MaxwellianState(rho, U, V, lam)


def conserved_from_maxwellian(m: MaxwellianState, gm: GammaModel) -> np.ndarray:
    E = 0.5 * m.rho * (m.U * m.U + m.V * m.V) + m.rho * (gm.K + 2.0) / (4.0 * m.lam)
    return np.array([m.rho, m.rho * m.U, m.rho * m.V, E])


def collision_time(p_left: float, p_right: float, dt: float,
                   params: GksParams = GksParams()) -> float:
    if p_left <= 0.0 or p_right <= 0.0 or dt <= 0.0:
        raise ValueError("collision_time needs positive pressures and dt")
    jump = abs(p_left - p_right) / (p_left + p_right)
    return (params.c1 + params.c2 * jump) * dt


# ---------------------------------------------------------------------------
# moment kernels

@njit(cache=True, inline='always')
def fill_moments_full(U, lam, out):
    """Normalized full moments <u^n>, n = 0..NMOM-1, by recursion."""
    out[0] = 1.0
    out[1] = U
    for n in range(NMOM - 2):
        out[n + 2] = U * out[n + 1] + (n + 1) / (2.0 * lam) * out[n]


@njit(cache=True, inline='always')
def fill_moments_upper(U, lam, out):
    """Normalized half moments <u^n>_{u>0}; same recursion, erfc/exp seeds."""
    sq = math.sqrt(lam)
    out[0] = 0.5 * math.erfc(-sq * U)
    out[1] = U * out[0] + 0.5 * math.exp(-lam * U * U) / math.sqrt(math.pi * lam)
    for n in range(NMOM - 2):
        out[n + 2] = U * out[n + 1] + (n + 1) / (2.0 * lam) * out[n]


@njit(cache=True, inline='always')
def _phi(mu, mv, xi2, m, n, out):
    """<u^m v^n psi> given a u-moment table (full or half) and full v table."""
    out[0] = mu[m] * mv[n]
    out[1] = mu[m + 1] * mv[n]
    out[2] = mu[m] * mv[n + 1]
    out[3] = 0.5 * (mu[m + 2] * mv[n] + mu[m] * mv[n + 2] + mu[m] * mv[n] * xi2)


@njit(cache=True, inline='always')
def _msp(mu, mv, xi2, xi4, a, m, n, out, t):
    """<a(u,v,xi) u^m v^n psi> for slope vector a; t is 4-vector scratch."""
    _phi(mu, mv, xi2, m, n, t)
    for c in range(4):
        out[c] = a[0] * t[c]
    _phi(mu, mv, xi2, m + 1, n, t)
    for c in range(4):
        out[c] += a[1] * t[c]
    _phi(mu, mv, xi2, m, n + 1, t)
    for c in range(4):
        out[c] += a[2] * t[c]
    # quadratic part of the slope: (u^2 + v^2 + xi^2)/2
    _phi(mu, mv, xi2, m + 2, n, t)
    for c in range(4):
        out[c] += 0.5 * a[3] * t[c]
    _phi(mu, mv, xi2, m, n + 2, t)
    for c in range(4):
        out[c] += 0.5 * a[3] * t[c]
    # xi^2 carried term: <u^m v^n xi^2 psi>
    out[0] += 0.5 * a[3] * mu[m] * mv[n] * xi2
    out[1] += 0.5 * a[3] * mu[m + 1] * mv[n] * xi2
    out[2] += 0.5 * a[3] * mu[m] * mv[n + 1] * xi2
    out[3] += 0.5 * a[3] * 0.5 * (mu[m + 2] * mv[n] * xi2 + mu[m] * mv[n + 2] * xi2
                                  + mu[m] * mv[n] * xi4)


@njit(cache=True, inline='always')
def _moment_matrix(mu, mv, xi2, xi4, M):
    """M_ij = <psi_i psi_j> (normalized); symmetric positive definite."""
    p4u = 0.5 * (mu[3] + mu[1] * mv[2] + mu[1] * xi2)
    p4v = 0.5 * (mu[2] * mv[1] + mv[3] + mv[1] * xi2)
    p40 = 0.5 * (mu[2] + mv[2] + xi2)
    M[0, 0] = 1.0
    M[0, 1] = mu[1]
    M[0, 2] = mv[1]
    M[0, 3] = p40
    M[1, 0] = mu[1]
    M[1, 1] = mu[2]
    M[1, 2] = mu[1] * mv[1]
    M[1, 3] = p4u
    M[2, 0] = mv[1]
    M[2, 1] = mu[1] * mv[1]
    M[2, 2] = mv[2]
    M[2, 3] = p4v
    M[3, 0] = p40
    M[3, 1] = p4u
    M[3, 2] = p4v
    M[3, 3] = 0.25 * (mu[4] + mv[4] + xi4
                      + 2.0 * mu[2] * mv[2] + 2.0 * mu[2] * xi2 + 2.0 * mv[2] * xi2)


@njit(cache=True, inline='always')
def _solve4(M, B, X):
    """Solve M X = B for 3 right-hand sides (columns of B), Gaussian
    elimination with partial pivoting; M and B are clobbered."""
    for col in range(4):
        piv = col
        big = abs(M[col, col])
        for r in range(col + 1, 4):
            if abs(M[r, col]) > big:
                big = abs(M[r, col])
                piv = r
        if big == 0.0:
            return False
        if piv != col:
            for c in range(4):
                tmp = M[col, c]
                M[col, c] = M[piv, c]
                M[piv, c] = tmp
            for c in range(B.shape[1]):
                tmp = B[col, c]
                B[col, c] = B[piv, c]
                B[piv, c] = tmp
        inv = 1.0 / M[col, col]
        for r in range(col + 1, 4):
            fac = M[r, col] * inv
            if fac != 0.0:
                for c in range(col, 4):
                    M[r, c] -= fac * M[col, c]
                for c in range(B.shape[1]):
                    B[r, c] -= fac * B[col, c]
    for col in range(B.shape[1]):
        for r in range(3, -1, -1):
            acc = B[r, col]
            for c in range(r + 1, 4):
                acc -= M[r, c] * X[c, col]
            X[r, col] = acc / M[r, r]
    return True


@njit(cache=True, inline='always')
def _state_from_w(w, K):
    """(ok, rho, U, V, lam, p) from conserved w."""
    rho = w[0]
    if not rho > 0.0:
        return False, 0.0, 0.0, 0.0, 0.0, 0.0
    U = w[1] / rho
    V = w[2] / rho
    ein = w[3] - 0.5 * rho * (U * U + V * V)
    if not ein > 0.0:
        return False, 0.0, 0.0, 0.0, 0.0, 0.0
    lam = (K + 2.0) * rho / (4.0 * ein)
    p = 0.5 * rho / lam
    return True, rho, U, V, lam, p


# flat scratch layout shared by the point-moment and flux-pair workers:
# eight NMOM moment tables, twenty 4-vectors, then a 4x8 matrix block
# (Gram matrix, unit-lower factor)
_WS_TABLES = 8 * NMOM
_WS_VECEND = _WS_TABLES + 20 * 4
WS_PAIR = _WS_VECEND + 4 * 8


@njit(cache=True, inline='always')
def _ldlt4(M, L, d):
    """LDL^T factor of a symmetric 4x4 (lower triangle read).

    The moment matrix is the Gram matrix of the collision invariants under
    a Maxwellian, positive definite whenever the state is physical, so no
    pivoting is needed; a non-positive pivot reports failure instead."""
    for j in range(4):
        piv = M[j, j]
        for k in range(j):
            piv -= L[j, k] * L[j, k] * d[k]
        if not piv > 0.0:
            return False
        d[j] = piv
        for i in range(j + 1, 4):
            acc = M[i, j]
            for k in range(j):
                acc -= L[i, k] * L[j, k] * d[k]
            L[i, j] = acc / piv
    return True


@njit(cache=True, inline='always')
def _ldlt_solve(L, d, b, x):
    """Solve L D L^T x = b with a unit lower factor; b is preserved."""
    x[0] = b[0]
    x[1] = b[1] - L[1, 0] * x[0]
    x[2] = b[2] - L[2, 0] * x[0] - L[2, 1] * x[1]
    x[3] = b[3] - L[3, 0] * x[0] - L[3, 1] * x[1] - L[3, 2] * x[2]
    x[3] /= d[3]
    x[2] = x[2] / d[2] - L[3, 2] * x[3]
    x[1] = x[1] / d[1] - L[2, 1] * x[2] - L[3, 1] * x[3]
    x[0] = x[0] / d[0] - L[1, 0] * x[1] - L[2, 0] * x[2] - L[3, 0] * x[3]


@njit(cache=True, inline='always')
def _micro_slopes(mu, mv, xi2, xi4, rho, wx, wy, Msave, Lf, dpiv, bv,
                  t1, t2, tm, ax, ay, A, need_A):
    """Solve the micro-slope systems of one Maxwellian.

    M a = dW/rho for the two spatial directions and, when need_A is set,
    the compatibility system for the temporal coefficient A.  One factor
    serves all right-hand sides; returns False when the moment matrix has
    lost positive definiteness.
    """
    _moment_matrix(mu, mv, xi2, xi4, Msave)
    if not _ldlt4(Msave, Lf, dpiv):
        return False
    for r in range(4):
        bv[r] = wx[r] / rho
    _ldlt_solve(Lf, dpiv, bv, ax)
    for r in range(4):
        bv[r] = wy[r] / rho
    _ldlt_solve(Lf, dpiv, bv, ay)
    if not need_A:
        return True
    _msp(mu, mv, xi2, xi4, ax, 1, 0, t1, tm)
    _msp(mu, mv, xi2, xi4, ay, 0, 1, t2, tm)
    for r in range(4):
        bv[r] = -(t1[r] + t2[r])
    _ldlt_solve(Lf, dpiv, bv, A)
    return True


@njit(cache=True)
def _point_moments(wl, wxl, wyl, wr, wxr, wyr, K, mom, ws, need_ne):
    """gks_point_moments worker; ws is caller-owned WS_PAIR scratch.

    With need_ne False (collisionless limit) the free-streaming moment
    vectors mom[1] and mom[3..5] are left at zero: their time coefficients
    vanish identically, so the window integral never reads them."""
    okl, rl, Ul, Vl, laml, pl = _state_from_w(wl, K)
    if not okl:
        return 1, 0.0, 0.0
    okr, rr, Ur, Vr, lamr, pr = _state_from_w(wr, K)
    if not okr:
        return 2, 0.0, 0.0

    mt = ws[:_WS_TABLES].reshape(8, NMOM)
    vs = ws[_WS_TABLES:_WS_VECEND].reshape(20, 4)
    ms = ws[_WS_VECEND:WS_PAIR].reshape(4, 8)
    mul = mt[0]
    mul_p = mt[1]
    mvl = mt[2]
    mur = mt[3]
    mur_n = mt[4]
    mvr = mt[5]
    muc = mt[6]
    mvc = mt[7]
    t1 = vs[0]
    t2 = vs[1]
    tm = vs[2]
    axl = vs[3]
    ayl = vs[4]
    Al = vs[5]
    axr = vs[6]
    ayr = vs[7]
    Ar = vs[8]
    axc = vs[9]
    ayc = vs[10]
    Ac = vs[11]
    wc = vs[12]
    wcx = vs[13]
    wcy = vs[14]
    dpiv = vs[17]
    bv = vs[18]
    Msave = ms[:, 0:4]
    Lf = ms[:, 4:8]

    xi2l = 0.5 * K / laml
    xi4l = 0.25 * K * (K + 2.0) / (laml * laml)
    xi2r = 0.5 * K / lamr
    xi4r = 0.25 * K * (K + 2.0) / (lamr * lamr)

    fill_moments_full(Ul, laml, mul)
    fill_moments_upper(Ul, laml, mul_p)
    fill_moments_full(Vl, laml, mvl)
    fill_moments_full(Ur, lamr, mur)
    fill_moments_upper(Ur, lamr, mur_n)
    for n in range(NMOM):
        mur_n[n] = mur[n] - mur_n[n]  # lower half <u^n>_{u<0}
    fill_moments_full(Vr, lamr, mvr)

    if not _micro_slopes(mul, mvl, xi2l, xi4l, rl, wxl, wyl, Msave, Lf, dpiv,
                         bv, t1, t2, tm, axl, ayl, Al, need_ne):
        return 1, pl, pr
    if not _micro_slopes(mur, mvr, xi2r, xi4r, rr, wxr, wyr, Msave, Lf, dpiv,
                         bv, t1, t2, tm, axr, ayr, Ar, need_ne):
        return 2, pl, pr

    # kinetic merge: equilibrium state and its slopes from the two half fluxes
    _phi(mul_p, mvl, xi2l, 0, 0, t1)
    _phi(mur_n, mvr, xi2r, 0, 0, t2)
    for c in range(4):
        wc[c] = rl * t1[c] + rr * t2[c]
    _msp(mul_p, mvl, xi2l, xi4l, axl, 0, 0, t1, tm)
    _msp(mur_n, mvr, xi2r, xi4r, axr, 0, 0, t2, tm)
    for c in range(4):
        wcx[c] = rl * t1[c] + rr * t2[c]
    _msp(mul_p, mvl, xi2l, xi4l, ayl, 0, 0, t1, tm)
    _msp(mur_n, mvr, xi2r, xi4r, ayr, 0, 0, t2, tm)
    for c in range(4):
        wcy[c] = rl * t1[c] + rr * t2[c]

    okc, rc, Uc, Vc, lamc, _pc = _state_from_w(wc, K)
    if not okc:
        return 3, pl, pr
    xi2c = 0.5 * K / lamc
    xi4c = 0.25 * K * (K + 2.0) / (lamc * lamc)
    fill_moments_full(Uc, lamc, muc)
    fill_moments_full(Vc, lamc, mvc)
    if not _micro_slopes(muc, mvc, xi2c, xi4c, rc, wcx, wcy, Msave, Lf, dpiv,
                         bv, t1, t2, tm, axc, ayc, Ac, True):
        return 3, pl, pr

    # assemble the six moment vectors
    _phi(muc, mvc, xi2c, 1, 0, t1)
    for c in range(4):
        mom[0, c] = rc * t1[c]
    _msp(muc, mvc, xi2c, xi4c, Ac, 1, 0, t1, tm)
    for c in range(4):
        mom[2, c] = rc * t1[c]
    if not need_ne:
        for c in range(4):
            mom[1, c] = 0.0
            mom[3, c] = 0.0
            mom[4, c] = 0.0
            mom[5, c] = 0.0
        return 0, pl, pr

    _msp(muc, mvc, xi2c, xi4c, axc, 2, 0, t1, tm)
    _msp(muc, mvc, xi2c, xi4c, ayc, 1, 1, t2, tm)
    for c in range(4):
        mom[1, c] = rc * (t1[c] + t2[c])

    _phi(mul_p, mvl, xi2l, 1, 0, t1)
    _phi(mur_n, mvr, xi2r, 1, 0, t2)
    for c in range(4):
        mom[3, c] = rl * t1[c] + rr * t2[c]
    _msp(mul_p, mvl, xi2l, xi4l, axl, 2, 0, t1, tm)
    _msp(mul_p, mvl, xi2l, xi4l, ayl, 1, 1, t2, tm)
    for c in range(4):
        mom[4, c] = rl * (t1[c] + t2[c])
    _msp(mur_n, mvr, xi2r, xi4r, axr, 2, 0, t1, tm)
    _msp(mur_n, mvr, xi2r, xi4r, ayr, 1, 1, t2, tm)
    for c in range(4):
        mom[4, c] += rr * (t1[c] + t2[c])
    _msp(mul_p, mvl, xi2l, xi4l, Al, 1, 0, t1, tm)
    _msp(mur_n, mvr, xi2r, xi4r, Ar, 1, 0, t2, tm)
    for c in range(4):
        mom[5, c] = rl * t1[c] + rr * t2[c]

    return 0, pl, pr


@njit(cache=True)
def gks_point_moments(wl, wxl, wyl, wr, wxr, wyr, K, mom):
    """State-dependent part of the interface flux at one Gauss point.

    Fills mom (6,4) with the velocity-space moment vectors multiplying the
    five time-coefficient groups:

      mom[0]: equilibrium transport      int u psi g_c
      mom[1]: equilibrium spatial slope  int u (a_x^c u + a_y^c v) psi g_c
      mom[2]: equilibrium temporal slope int u A^c psi g_c
      mom[3]: free-streaming values      int_{u>0} u psi g_l + int_{u<0} u psi g_r
      mom[4]: free-streaming slopes      same split with (a^l.u), (a^r.u)
      mom[5]: free-streaming temporal    same split with A^l, A^r

    Returns (code, p_left, p_right); code 0 on success, 1/2/3 when the
    left/right/merged state is non-physical.
    """
    ws = np.empty(WS_PAIR)
    return _point_moments(wl, wxl, wyl, wr, wxr, wyr, K, mom, ws, True)


@njit(cache=True, inline='always')
def accumulate_window(mom, tau, delta, out):
    """Time-accumulated flux over [0, delta] from the moment vectors."""
    if tau <= 0.0:
        # collisionless limit: pure equilibrium transport, the initial-gas
        # and relaxation terms vanish with e^(-t/tau) -> 0
        for c in range(4):
            out[c] = delta * mom[0, c] + 0.5 * delta * delta * mom[2, c]
        return
    x = delta / tau
    em = math.exp(-x)
    one_m = -math.expm1(-x)  # 1 - e^(-x) without cancellation
    T0 = delta - tau * one_m
    T3 = tau * one_m
    T4 = tau * tau * one_m - tau * delta * em
    T1 = tau * T3 + T4 - tau * delta
    T2 = 0.5 * delta * delta - tau * delta + tau * tau * one_m
    for c in range(4):
        out[c] = (T0 * mom[0, c] + T1 * mom[1, c] + T2 * mom[2, c]
                  + T3 * mom[3, c] - (tau * T3 + T4) * mom[4, c]
                  - tau * T3 * mom[5, c])


@njit(cache=True)
def _flux_pair(wl, wxl, wyl, wr, wxr, wyr, dt, K, c1, c2, mom, f_out, df_out, ws):
    """gks_flux_pair worker; ws is caller-owned WS_PAIR scratch."""
    need_ne = c1 > 0.0 or c2 > 0.0
    code, pl, pr = _point_moments(wl, wxl, wyl, wr, wxr, wyr, K, mom, ws,
                                  need_ne)
    if code != 0:
        return code
    tau = (c1 + c2 * abs(pl - pr) / (pl + pr)) * dt
    vs = ws[_WS_TABLES:_WS_VECEND].reshape(20, 4)
    g_half = vs[15]
    g_full = vs[16]
    accumulate_window(mom, tau, 0.5 * dt, g_half)
    accumulate_window(mom, tau, dt, g_full)
    for c in range(4):
        f_out[c] = (4.0 * g_half[c] - g_full[c]) / dt
        df_out[c] = 4.0 * (g_full[c] - 2.0 * g_half[c]) / (dt * dt)
    return 0


@njit(cache=True)
def gks_flux_pair(wl, wxl, wyl, wr, wxr, wyr, dt, K, c1, c2, mom, f_out, df_out):
    """Flux coefficient pair (F^n, dF^n/dt) at one Gauss point.

    Evaluates the accumulated flux over dt/2 and dt and extracts the
    instantaneous value and slope:
        F  = (4 G(dt/2) - G(dt)) / dt
        Ft = 4 (G(dt) - 2 G(dt/2)) / dt^2
    Returns 0 on success, else the failure code of gks_point_moments.
    """
    ws = np.empty(WS_PAIR)
    return _flux_pair(wl, wxl, wyl, wr, wxr, wyr, dt, K, c1, c2, mom,
                      f_out, df_out, ws)


# ---------------------------------------------------------------------------
# python-level API (tests, reference path)

@dataclass(frozen=True)
class MomentTable:
    """Normalized moments of a Maxwellian: full and upper-half u moments,
    full v moments, and the internal-dof moments <xi^2>, <xi^4>."""

    u_full: np.ndarray
    u_pos: np.ndarray
    v_full: np.ndarray
    xi2: float
    xi4: float

    @property
    def u_neg(self) -> np.ndarray:
        return self.u_full - self.u_pos

    @classmethod
    def build(cls, m: MaxwellianState, gm: GammaModel) -> "MomentTable":
        if not (m.rho > 0.0 and m.lam > 0.0):
            raise ValueError("moment table needs a physical Maxwellian")
        uf = np.empty(NMOM)
        up = np.empty(NMOM)
        vf = np.empty(NMOM)
        fill_moments_full(m.U, m.lam, uf)
        fill_moments_upper(m.U, m.lam, up)
        fill_moments_full(m.V, m.lam, vf)
        K = gm.K
        return cls(uf, up, vf, 0.5 * K / m.lam, 0.25 * K * (K + 2.0) / (m.lam ** 2))


def moment_psi(table: MomentTable, m: int = 0, n: int = 0, half: int = 0) -> np.ndarray:
    """<u^m v^n psi> (normalized); half = +1/-1 selects a u half-space."""
    mu = {0: table.u_full, 1: table.u_pos, -1: table.u_neg}[half]
    out = np.empty(4)
    _phi(mu, table.v_full, table.xi2, m, n, out)
    return out


def moment_slope_psi(table: MomentTable, a: np.ndarray, m: int = 0, n: int = 0,
                     half: int = 0) -> np.ndarray:
    mu = {0: table.u_full, 1: table.u_pos, -1: table.u_neg}[half]
    out = np.empty(4)
    _msp(mu, table.v_full, table.xi2, table.xi4, np.asarray(a, dtype=float),
         m, n, out, np.empty(4))
    return out


def solve_micro_slope(m: MaxwellianState, dW: np.ndarray, gm: GammaModel) -> np.ndarray:
    """Slope vector a with <a psi> = dW for the Maxwellian m."""
    table = MomentTable.build(m, gm)
    M = np.empty((4, 4))
    _moment_matrix(table.u_full, table.v_full, table.xi2, table.xi4, M)
    return np.linalg.solve(M, np.asarray(dW, dtype=float) / m.rho)


def temporal_slope(m: MaxwellianState, ax: np.ndarray, ay: np.ndarray,
                   gm: GammaModel) -> np.ndarray:
    """Compatibility slope A with <(A + a_x u + a_y v) psi> = 0."""
    table = MomentTable.build(m, gm)
    M = np.empty((4, 4))
    _moment_matrix(table.u_full, table.v_full, table.xi2, table.xi4, M)
    rhs = -(moment_slope_psi(table, ax, 1, 0) + moment_slope_psi(table, ay, 0, 1))
    return np.linalg.solve(M, rhs)


def merge_equilibrium(wl, axl, ayl, wr, axr, ayr, gm: GammaModel):
    """Equilibrium conserved state and slopes from the half fluxes of the
    two reconstructed sides: W_c = int_{u>0} psi g_l + int_{u<0} psi g_r,
    same split for the slope moments."""
    ml = maxwellian_from_conserved(wl, gm)
    mr = maxwellian_from_conserved(wr, gm)
    tl = MomentTable.build(ml, gm)
    tr = MomentTable.build(mr, gm)
    wc = ml.rho * moment_psi(tl, half=1) + mr.rho * moment_psi(tr, half=-1)
    wcx = (ml.rho * moment_slope_psi(tl, axl, half=1)
           + mr.rho * moment_slope_psi(tr, axr, half=-1))
    wcy = (ml.rho * moment_slope_psi(tl, ayl, half=1)
           + mr.rho * moment_slope_psi(tr, ayr, half=-1))
    return wc, wcx, wcy


def gks_time_integrated_flux(recon: GaussPointRecon, delta: float, dt: float,
                             gm: GammaModel, params: GksParams = GksParams()) -> np.ndarray:
    """Accumulated interface flux int_0^delta int u psi f dXi dt."""
    if not 0.0 < delta <= dt:
        raise ValueError("window must satisfy 0 < delta <= dt")
    mom = np.empty((6, 4))
    code, pl, pr = gks_point_moments(recon.wl, recon.wxl, recon.wyl,
                                     recon.wr, recon.wxr, recon.wyr, gm.K, mom)
    if code != 0:
        side = {1: "left", 2: "right", 3: "merged"}[code]
        raise ValueError(f"non-physical {side} state at Gauss point")
    tau = collision_time(pl, pr, dt, params)
    out = np.empty(4)
    accumulate_window(mom, tau, delta, out)
    return out


def s2o4_flux_coefficients(g_half: np.ndarray, g_full: np.ndarray,
                           dt: float) -> tuple[np.ndarray, np.ndarray]:
    """Instantaneous flux and flux time-derivative from the two accumulated
    windows G(dt/2), G(dt), exact for fluxes linear in time."""
    g_half = np.asarray(g_half, dtype=float)
    g_full = np.asarray(g_full, dtype=float)
    f = (4.0 * g_half - g_full) / dt
    ft = 4.0 * (g_full - 2.0 * g_half) / (dt * dt)
    return f, ft
