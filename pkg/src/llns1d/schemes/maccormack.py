"""Two-step predictor/corrector scheme with amplified stochastic fluxes.

Predictor differences hyperbolic cell fluxes backward, corrector forward on
the predicted state, and the result is averaged with the old state.  Both
stages are written in face-flux form (predictor face takes the left cell's
flux, corrector the right cell's), which reproduces the cell differences
exactly in the interior while letting thermal-wall faces carry the no-flow
flux (0, P_ghost, 0) in both stages so mass is conserved to roundoff.
"""
import numpy as np
from numba import njit

from llns1d.boundaries import BC_WALL, end_code, end_params, fill_ghost_padded
from llns1d.schemes.common import (
    NG,
    OK,
    assemble_noise_average,
    cell_euler_flux,
    diffusive_faces,
    first_invalid_interior,
    primitives_padded,
    stochastic_faces,
)


@njit(cache=True)
def maccormack_kernel(Up, dt, dx, R, c_v, eta0, kappa0, k_B, V_c, noise_amp,
                      code_l, code_r, par_l, par_r, rng):
    Mp = Up.shape[1]
    M = Mp - 2 * NG
    lam = dt / dx

    rho = np.empty(Mp)
    u = np.empty(Mp)
    T = np.empty(Mp)
    P = np.empty(Mp)
    Fc = np.empty((3, Mp))
    FH = np.empty((3, M + 1))
    D = np.empty((3, M + 1))
    SQ = np.empty((2, M + 1))
    S = np.empty((3, M + 1))

    # predictor
    fill_ghost_padded(Up, code_l, code_r, par_l, par_r, c_v)
    bad = primitives_padded(Up, c_v, R, rho, u, T, P)
    if bad != OK:
        return bad
    cell_euler_flux(rho, u, T, P, c_v, Fc)
    for f in range(M + 1):
        for c in range(3):
            FH[c, f] = Fc[c, NG + f - 1]
    if code_l == BC_WALL:
        FH[0, 0] = 0.0
        FH[1, 0] = P[NG - 1]
        FH[2, 0] = 0.0
    if code_r == BC_WALL:
        FH[0, M] = 0.0
        FH[1, M] = P[NG + M]
        FH[2, M] = 0.0
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

    # corrector on the predicted state
    fill_ghost_padded(Ustar, code_l, code_r, par_l, par_r, c_v)
    bad = primitives_padded(Ustar, c_v, R, rho, u, T, P)
    if bad != OK:
        return bad
    cell_euler_flux(rho, u, T, P, c_v, Fc)
    for f in range(M + 1):
        for c in range(3):
            FH[c, f] = Fc[c, NG + f]
    if code_l == BC_WALL:
        FH[0, 0] = 0.0
        FH[1, 0] = P[NG - 1]
        FH[2, 0] = 0.0
    if code_r == BC_WALL:
        FH[0, M] = 0.0
        FH[1, M] = P[NG + M]
        FH[2, M] = 0.0
    diffusive_faces(rho, u, T, dx, eta0, kappa0, code_l, code_r,
                    par_l[0], par_r[0], D)
    stochastic_faces(rho, u, T, dt, dx, V_c, eta0, kappa0, k_B, noise_amp,
                     code_l, code_r, par_l[0], par_r[0], rng, SQ)
    assemble_noise_average(u, SQ, S)

    for j in range(M):
        i = NG + j
        uss0 = Ustar[0, i] - lam * (FH[0, j + 1] - FH[0, j]) \
            + lam * (D[0, j + 1] - D[0, j]) + lam * (S[0, j + 1] - S[0, j])
        uss1 = Ustar[1, i] - lam * (FH[1, j + 1] - FH[1, j]) \
            + lam * (D[1, j + 1] - D[1, j]) + lam * (S[1, j + 1] - S[1, j])
        uss2 = Ustar[2, i] - lam * (FH[2, j + 1] - FH[2, j]) \
            + lam * (D[2, j + 1] - D[2, j]) + lam * (S[2, j + 1] - S[2, j])
        Up[0, i] = 0.5 * (Up[0, i] + uss0)
        Up[1, i] = 0.5 * (Up[1, i] + uss1)
        Up[2, i] = 0.5 * (Up[2, i] + uss2)

    return first_invalid_interior(Up, c_v)
