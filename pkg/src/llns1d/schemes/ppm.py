"""Piecewise-parabolic scheme: characteristic tracing, face Riemann solves,
time-centered diffusion, amplified stochastic fluxes.  No slope limiting.

The hyperbolic face fluxes are computed once per step from time-centered
edge states; the predictor exists only to evaluate the diffusive and
stochastic fluxes at the predicted state so they can be averaged in time.
"""
import numpy as np
from numba import njit

from llns1d.boundaries import (
    BC_PERIODIC,
    BC_WALL,
    fill_ghost_padded,
)
from llns1d.riemann import VACUUM, riemann_face
from llns1d.schemes.common import (
    CFL_FAIL,
    NG,
    OK,
    VACUUM_FAIL,
    assemble_noise_average,
    diffusive_faces,
    first_invalid_interior,
    primitives_padded,
    stochastic_faces,
)


@njit(cache=True)
def _reconstruct_edges(rho, u, T, P, gamma, lam, M, Vminus, Vplus):
    """Time-centered primitive edge states per interior cell.

    Projects the five-cell primitive stencil onto the local characteristic
    basis, interpolates fourth-order edges, builds the parabola, averages it
    over each wave's domain of dependence, and lifts back.  Returns OK or
    CFL_FAIL.
    """
    w = np.empty((5, 3))
    wbm = np.empty(3)
    wbp = np.empty(3)
    for j in range(M):
        p = NG + j
        c = np.sqrt(gamma * P[p] / rho[p])
        rc = rho[p] * c
        c2 = c * c
        for k in range(5):
            q = p + k - 2
            w[k, 0] = -0.5 * rc * u[q] + 0.5 * P[q]
            w[k, 1] = rho[q] - P[q] / c2
            w[k, 2] = 0.5 * rc * u[q] + 0.5 * P[q]
        for comp in range(3):
            wm = (7.0 / 12.0) * (w[2, comp] + w[1, comp]) \
                - (1.0 / 12.0) * (w[3, comp] + w[0, comp])
            wp = (7.0 / 12.0) * (w[2, comp] + w[3, comp]) \
                - (1.0 / 12.0) * (w[1, comp] + w[4, comp])
            dwv = wp - wm
            w6 = 6.0 * (w[2, comp] - 0.5 * (wp + wm))
            if comp == 0:
                speed = u[p] - c
            elif comp == 1:
                speed = u[p]
            else:
                speed = u[p] + c
            nu = speed * lam
            if nu > 1.0 or nu < -1.0:
                return CFL_FAIL
            if nu > 0.0:
                wp = wp - 0.5 * nu * (dwv - (1.0 - (2.0 / 3.0) * nu) * w6)
            elif nu < 0.0:
                mu = -nu
                wm = wm + 0.5 * mu * (dwv + (1.0 - (2.0 / 3.0) * mu) * w6)
            wbm[comp] = wm
            wbp[comp] = wp
        Vminus[0, j] = (wbm[0] + wbm[2]) / c2 + wbm[1]
        Vminus[1, j] = (wbm[2] - wbm[0]) / rc
        Vminus[2, j] = wbm[0] + wbm[2]
        Vplus[0, j] = (wbp[0] + wbp[2]) / c2 + wbp[1]
        Vplus[1, j] = (wbp[2] - wbp[0]) / rc
        Vplus[2, j] = wbp[0] + wbp[2]
    return OK


@njit(cache=True)
def ppm_kernel(Up, dt, dx, gamma, R, c_v, eta0, kappa0, k_B, V_c, noise_amp,
               code_l, code_r, par_l, par_r, rng):
    Mp = Up.shape[1]
    M = Mp - 2 * NG
    lam = dt / dx

    rho = np.empty(Mp)
    u = np.empty(Mp)
    T = np.empty(Mp)
    P = np.empty(Mp)

    fill_ghost_padded(Up, code_l, code_r, par_l, par_r, c_v)
    bad = primitives_padded(Up, c_v, R, rho, u, T, P)
    if bad != OK:
        return bad

    Vminus = np.empty((3, M))
    Vplus = np.empty((3, M))
    bad = _reconstruct_edges(rho, u, T, P, gamma, lam, M, Vminus, Vplus)
    if bad != OK:
        return bad

    # Riemann inputs per face: the left cell's right edge against the right
    # cell's left edge; boundary faces take the adjacent ghost state on the
    # exterior side (reconstruction there would need a deeper ghost layer).
    FH = np.empty((3, M + 1))
    for f in range(M + 1):
        if f == 0:
            if code_l == BC_PERIODIC:
                rl, ul, pl = Vplus[0, M - 1], Vplus[1, M - 1], Vplus[2, M - 1]
            else:
                g = NG - 1
                rl, ul, pl = rho[g], u[g], P[g]
        else:
            rl, ul, pl = Vplus[0, f - 1], Vplus[1, f - 1], Vplus[2, f - 1]
        if f == M:
            if code_r == BC_PERIODIC:
                rr, ur, pr = Vminus[0, 0], Vminus[1, 0], Vminus[2, 0]
            else:
                g = NG + M
                rr, ur, pr = rho[g], u[g], P[g]
        else:
            rr, ur, pr = Vminus[0, f], Vminus[1, f], Vminus[2, f]
        if not (rl > 0.0 and pl > 0.0 and rr > 0.0 and pr > 0.0):
            return NG + min(f, M - 1)
        rho_f, u_f, p_f, status = riemann_face(rl, ul, pl, rr, ur, pr, gamma)
        if status == VACUUM:
            return VACUUM_FAIL
        if f == 0 and code_l == BC_WALL:
            FH[0, f] = 0.0
            FH[1, f] = rho_f * R * par_l[0]
            FH[2, f] = 0.0
        elif f == M and code_r == BC_WALL:
            FH[0, f] = 0.0
            FH[1, f] = rho_f * R * par_r[0]
            FH[2, f] = 0.0
        else:
            E_f = p_f / (gamma - 1.0) + 0.5 * rho_f * u_f * u_f
            FH[0, f] = rho_f * u_f
            FH[1, f] = rho_f * u_f * u_f + p_f
            FH[2, f] = (E_f + p_f) * u_f

    D = np.empty((3, M + 1))
    SQ = np.empty((2, M + 1))
    S = np.empty((3, M + 1))
    diffusive_faces(rho, u, T, dx, eta0, kappa0, code_l, code_r,
                    par_l[0], par_r[0], D)
    stochastic_faces(rho, u, T, dt, dx, V_c, eta0, kappa0, k_B, noise_amp,
                     code_l, code_r, par_l[0], par_r[0], rng, SQ)
    assemble_noise_average(u, SQ, S)

    Ustar = Up.copy()
    for j in range(M):
        i = NG + j
        for c in range(3):
            Ustar[c, i] = Up[c, i] \
                - lam * (FH[c, j + 1] - FH[c, j]) \
                + lam * (D[c, j + 1] - D[c, j]) \
                + lam * (S[c, j + 1] - S[c, j])

    fill_ghost_padded(Ustar, code_l, code_r, par_l, par_r, c_v)
    bad = primitives_padded(Ustar, c_v, R, rho, u, T, P)
    if bad != OK:
        return bad
    D2 = np.empty((3, M + 1))
    S2 = np.empty((3, M + 1))
    diffusive_faces(rho, u, T, dx, eta0, kappa0, code_l, code_r,
                    par_l[0], par_r[0], D2)
    stochastic_faces(rho, u, T, dt, dx, V_c, eta0, kappa0, k_B, noise_amp,
                     code_l, code_r, par_l[0], par_r[0], rng, SQ)
    assemble_noise_average(u, SQ, S2)

    for j in range(M):
        i = NG + j
        for c in range(3):
            Up[c, i] = Up[c, i] \
                - lam * (FH[c, j + 1] - FH[c, j]) \
                + 0.5 * lam * (D[c, j + 1] - D[c, j] + S[c, j + 1] - S[c, j]
                               + D2[c, j + 1] - D2[c, j]
                               + S2[c, j + 1] - S2[c, j])

    return first_invalid_interior(Up, c_v)
