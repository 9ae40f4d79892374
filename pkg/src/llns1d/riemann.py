"""Approximate Riemann solver for the 1D Euler equations.

Two-shock iteration in the u-P plane: both nonlinear waves are treated with
the Hugoniot locus (rarefactions approximated by their shock curve), giving a
fixed-point iteration on the star pressure that converges in a few steps for
weak waves and stays robust across strong shocks. The solution is sampled at
the face (x/t = 0); a face inside an approximate rarefaction fan is linearly
interpolated between its bounding states.
"""
from __future__ import annotations

import logging

import numpy as np
from numba import njit

from .errors import SolverError
from .gas import GasSpec, PrimitiveState

log = logging.getLogger(__name__)

TOL = 1.0e-10
MAX_ITER = 20

# status codes returned by riemann_face
OK = 0
FELL_BACK = 1
VACUUM = 2


@njit(cache=True)
def _lagrangian_wave_speed(p_star, rho_k, p_k, gamma):
    # mass flux through a shock from state k to pressure p_star
    return np.sqrt(rho_k * (0.5 * (gamma + 1.0) * p_star + 0.5 * (gamma - 1.0) * p_k))


@njit(cache=True)
def riemann_face(rho_l, u_l, p_l, rho_r, u_r, p_r, gamma):
    """Two-shock approximate solution at x/t = 0.

    Returns (rho, u, p, status) with status OK, FELL_BACK (acoustic star
    pressure used after non-convergence) or VACUUM.
    """
    c_l = np.sqrt(gamma * p_l / rho_l)
    c_r = np.sqrt(gamma * p_r / rho_r)
    imp_l = rho_l * c_l
    imp_r = rho_r * c_r

    # linearized (acoustic) star values: initial guess and fallback
    p_acoustic = (imp_r * p_l + imp_l * p_r - imp_l * imp_r * (u_r - u_l)) / (imp_l + imp_r)
    p_floor = 1.0e-12 * min(p_l, p_r)

    p_star = p_acoustic if p_acoustic > p_floor else p_floor
    status = FELL_BACK
    for _ in range(MAX_ITER):
        w_l = _lagrangian_wave_speed(p_star, rho_l, p_l, gamma)
        w_r = _lagrangian_wave_speed(p_star, rho_r, p_r, gamma)
        p_new = (w_r * p_l + w_l * p_r + w_l * w_r * (u_l - u_r)) / (w_l + w_r)
        if p_new < p_floor:
            p_new = p_floor
        if abs(p_new - p_star) <= TOL * p_star:
            p_star = p_new
            status = OK
            break
        p_star = p_new

    if status == FELL_BACK:
        p_star = p_acoustic if p_acoustic > p_floor else p_floor
    if p_star <= p_floor:
        return 0.0, 0.0, 0.0, VACUUM

    w_l = _lagrangian_wave_speed(p_star, rho_l, p_l, gamma)
    w_r = _lagrangian_wave_speed(p_star, rho_r, p_r, gamma)
    u_star = 0.5 * ((u_l - (p_star - p_l) / w_l) + (u_r + (p_star - p_r) / w_r))

    # star densities from the Hugoniot mass flux: 1/rho* = 1/rho - (p*-p)/W^2
    inv_rho_sl = 1.0 / rho_l - (p_star - p_l) / (w_l * w_l)
    inv_rho_sr = 1.0 / rho_r - (p_star - p_r) / (w_r * w_r)
    if inv_rho_sl <= 0.0 or inv_rho_sr <= 0.0:
        return 0.0, 0.0, 0.0, VACUUM
    rho_sl = 1.0 / inv_rho_sl
    rho_sr = 1.0 / inv_rho_sr

    if u_star >= 0.0:
        # face lies on the left side of the contact
        if p_star >= p_l:
            sigma = u_l - w_l / rho_l  # shock speed
            if sigma >= 0.0:
                return rho_l, u_l, p_l, status
            return rho_sl, u_star, p_star, status
        head = u_l - c_l
        tail = u_star - np.sqrt(gamma * p_star / rho_sl)
        if head >= 0.0:
            return rho_l, u_l, p_l, status
        if tail <= 0.0:
            return rho_sl, u_star, p_star, status
        frac = -head / (tail - head)
        return (rho_l + frac * (rho_sl - rho_l),
                u_l + frac * (u_star - u_l),
                p_l + frac * (p_star - p_l), status)

    # face on the right side of the contact
    if p_star >= p_r:
        sigma = u_r + w_r / rho_r
        if sigma <= 0.0:
            return rho_r, u_r, p_r, status
        return rho_sr, u_star, p_star, status
    head = u_r + c_r
    tail = u_star + np.sqrt(gamma * p_star / rho_sr)
    if head <= 0.0:
        return rho_r, u_r, p_r, status
    if tail >= 0.0:
        return rho_sr, u_star, p_star, status
    frac = head / (head - tail)
    return (rho_r + frac * (rho_sr - rho_r),
            u_r + frac * (u_star - u_r),
            p_r + frac * (p_star - p_r), status)


def riemann_solve(v_left: PrimitiveState, v_right: PrimitiveState,
                  gas: GasSpec) -> PrimitiveState:
    """Solve the face Riemann problem between two primitive states."""
    rho, u, p, status = riemann_face(v_left.rho, v_left.u, v_left.P,
                                     v_right.rho, v_right.u, v_right.P, gas.gamma)
    if status == VACUUM:
        raise SolverError(f"vacuum formation between {v_left} and {v_right}")
    if status == FELL_BACK:
        log.warning("Riemann iteration did not converge; used acoustic star pressure "
                    "(left=%s, right=%s)", v_left, v_right)
    return PrimitiveState(rho=rho, u=u, P=p, T=p / (rho * gas.R))
