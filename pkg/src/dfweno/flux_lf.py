"""Lax-Friedrichs interface flux in the local (normal, tangent) frame.

The dissipation coefficient is the larger of the two one-sided maximum wave
speeds |u_n| + c, applied to the plain conserved-variable jump.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

from .state import ConservedState, GammaModel


@njit(cache=True, inline='always')
def euler_flux_point(w, gamma, out):
    """Physical Euler flux along local x for conserved w (len 4) into out.

    Returns False when the state is non-physical.
    """
    rho = w[0]
    if not rho > 0.0:
        return False
    u = w[1] / rho
    v = w[2] / rho
    p = (gamma - 1.0) * (w[3] - 0.5 * rho * (u * u + v * v))
    if not p > 0.0:
        return False
    out[0] = w[1]
    out[1] = w[1] * u + p
    out[2] = w[1] * v
    out[3] = u * (w[3] + p)
    return True


@njit(cache=True, inline='always')
def lf_flux_point(wl, wr, gamma, out):
    """Lax-Friedrichs flux for a left/right conserved pair (len 4) into out.

    Returns False on non-physical input (caller treats it as a step failure).
    """
    fl = np.empty(4)
    fr = np.empty(4)
    if not euler_flux_point(wl, gamma, fl):
        return False
    if not euler_flux_point(wr, gamma, fr):
        return False
    ul = wl[1] / wl[0]
    ur = wr[1] / wr[0]
    pl = (gamma - 1.0) * (wl[3] - 0.5 * (wl[1] * wl[1] + wl[2] * wl[2]) / wl[0])
    pr = (gamma - 1.0) * (wr[3] - 0.5 * (wr[1] * wr[1] + wr[2] * wr[2]) / wr[0])
    sl = abs(ul) + math.sqrt(gamma * pl / wl[0])
    sr = abs(ur) + math.sqrt(gamma * pr / wr[0])
    s = sl if sl > sr else sr
    for c in range(4):
        out[c] = 0.5 * (fl[c] + fr[c]) - 0.5 * s * (wr[c] - wl[c])
    return True


def _as_w(w) -> np.ndarray:
    if isinstance(w, ConservedState):
        return w.as_array()
    return np.asarray(w, dtype=float)


def euler_physical_flux(w, gm: GammaModel) -> np.ndarray:
    """Physical Euler flux of a conserved state (array or ConservedState)."""
    out = np.empty(4)
    if not euler_flux_point(_as_w(w), gm.gamma, out):
        raise ValueError("non-physical state passed to euler_physical_flux")
    return out


def lf_flux(wl, wr, gm: GammaModel) -> np.ndarray:
    out = np.empty(4)
    if not lf_flux_point(_as_w(wl), _as_w(wr), gm.gamma, out):
        raise ValueError("non-physical state passed to lf_flux")
    return out
