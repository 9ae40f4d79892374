"""Three-stage Runge-Kutta scheme with variance-compensating face
interpolation of conserved variables.

Hyperbolic face states come from the four-point interpolation with weights
alpha1 = (sqrt(7)+1)/4, alpha2 = (sqrt(7)-1)/4; for constant data the face
value is exact, and for i.i.d. cell noise the face variance doubles, which
offsets the variance halving of the three-stage average.  Diffusive terms are
standard second-order centered differences.
"""
import numpy as np
from numba import njit

from llns1d.boundaries import (
    ALPHA1,
    ALPHA2,
    BC_RESERVOIR,
    BC_WALL,
    fill_ghost_padded,
)
from llns1d.riemann import VACUUM, riemann_face
from llns1d.schemes.common import (
    NG,
    OK,
    VACUUM_FAIL,
    diffusive_faces,
    first_invalid_interior,
    primitives_padded,
    stochastic_faces,
)

# combined-update weights of the three stage divergences
RK3_WEIGHTS = (1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0)


def rk3_face_interpolate(values):
    """Face value from the four nearest cell values [v_{j-1}, v_j, v_{j+1},
    v_{j+2}] along the last axis."""
    v = np.asarray(values, dtype=np.float64)
    if v.shape[-1] != 4:
        raise ValueError("need exactly four cell values per face")
    return ALPHA1 * (v[..., 1] + v[..., 2]) - ALPHA2 * (v[..., 0] + v[..., 3])


def rk3_advance(y, dt, rhs):
    """Generic three-stage advance of dy/dt = rhs(y) with the scheme's
    coefficients; used to expose the temporal order of the integrator."""
    y1 = y + dt * rhs(y)
    y2 = 0.75 * y + 0.25 * y1 + 0.25 * dt * rhs(y1)
    return y / 3.0 + (2.0 / 3.0) * y2 + (2.0 / 3.0) * dt * rhs(y2)


def rk3_stage_composition(y, divergences):
    """Apply the three stages with prescribed stage divergences G0, G1, G2
    (each already scaled by dt/dx)."""
    G0, G1, G2 = divergences
    y1 = y - G0
    y2 = 0.75 * y + 0.25 * (y1 - G1)
    return y / 3.0 + (2.0 / 3.0) * (y2 - G2)


def rk3_combined(y, divergences):
    """Single-line form of the same update: weights (1/6, 1/6, 2/3)."""
    G0, G1, G2 = divergences
    w0, w1, w2 = RK3_WEIGHTS
    return y - (w0 * G0 + w1 * G1 + w2 * G2)


@njit(cache=True)
def rk3_divergence(Up, dt, dx, gamma, R, c_v, eta0, kappa0, k_B, V_c,
                   noise_amp, code_l, code_r, par_l, par_r, rng, G):
    """One stage's scaled total-flux divergence G[c,j] = (dt/dx) *
    (F_tot[f=j+1] - F_tot[f=j]) with F_tot = F_hyp - D - S, so a stage
    update U - G advances the conservation law.  Fills ghost cells of Up
    in place; returns a status code."""
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

    FH = np.empty((3, M + 1))
    uface = np.empty(M + 1)
    for f in range(M + 1):
        a = NG + f - 1
        r_f = ALPHA1 * (Up[0, a] + Up[0, a + 1]) \
            - ALPHA2 * (Up[0, a - 1] + Up[0, a + 2])
        J_f = ALPHA1 * (Up[1, a] + Up[1, a + 1]) \
            - ALPHA2 * (Up[1, a - 1] + Up[1, a + 2])
        E_f = ALPHA1 * (Up[2, a] + Up[2, a + 1]) \
            - ALPHA2 * (Up[2, a - 1] + Up[2, a + 2])
        if f == 0 and code_l == BC_WALL:
            # J_f vanishes by reflection antisymmetry; enforce u=0, T=T_wall
            FH[0, f] = 0.0
            FH[1, f] = r_f * R * par_l[0]
            FH[2, f] = 0.0
            uface[f] = 0.0
            continue
        if f == M and code_r == BC_WALL:
            FH[0, f] = 0.0
            FH[1, f] = r_f * R * par_r[0]
            FH[2, f] = 0.0
            uface[f] = 0.0
            continue
        if not r_f > 0.0:
            return a
        vel = J_f / r_f
        # the four-point interpolation is not monotone, so at a sharp jump
        # the face state can carry e_int < 0; the flux evaluated there is
        # still finite and the cell update stays physical, so only the
        # Riemann solve at a reservoir face insists on positive pressure
        e_int = E_f - 0.5 * r_f * vel * vel
        p_f = (gamma - 1.0) * e_int
        if f == 0 and code_l == BC_RESERVOIR:
            if not e_int > 0.0:
                return a
            rho_s, u_s, p_s, status = riemann_face(
                par_l[0], par_l[1], par_l[0] * R * par_l[2],
                r_f, vel, p_f, gamma)
            if status == VACUUM:
                return VACUUM_FAIL
            E_s = p_s / (gamma - 1.0) + 0.5 * rho_s * u_s * u_s
            FH[0, f] = rho_s * u_s
            FH[1, f] = rho_s * u_s * u_s + p_s
            FH[2, f] = (E_s + p_s) * u_s
            uface[f] = 0.0  # no stochastic flux at a reservoir face
            continue
        if f == M and code_r == BC_RESERVOIR:
            if not e_int > 0.0:
                return a
            rho_s, u_s, p_s, status = riemann_face(
                r_f, vel, p_f,
                par_r[0], par_r[1], par_r[0] * R * par_r[2], gamma)
            if status == VACUUM:
                return VACUUM_FAIL
            E_s = p_s / (gamma - 1.0) + 0.5 * rho_s * u_s * u_s
            FH[0, f] = rho_s * u_s
            FH[1, f] = rho_s * u_s * u_s + p_s
            FH[2, f] = (E_s + p_s) * u_s
            uface[f] = 0.0
            continue
        FH[0, f] = J_f
        FH[1, f] = J_f * vel + p_f
        FH[2, f] = (E_f + p_f) * vel
        uface[f] = vel

    D = np.empty((3, M + 1))
    SQ = np.empty((2, M + 1))
    diffusive_faces(rho, u, T, dx, eta0, kappa0, code_l, code_r,
                    par_l[0], par_r[0], D)
    stochastic_faces(rho, u, T, dt, dx, V_c, eta0, kappa0, k_B, noise_amp,
                     code_l, code_r, par_l[0], par_r[0], rng, SQ)

    # G is the scaled divergence of the outgoing total flux F - D - S, so each
    # stage applies -lam*dF + lam*dD + lam*dS, the same orientation as the
    # conservation law (advection downwind, diffusion damping, noise additive)
    for j in range(M):
        fr = j + 1
        fl = j
        sr = SQ[0, fr]
        sl = SQ[0, fl]
        G[0, j] = lam * ((FH[0, fr] - D[0, fr])
                         - (FH[0, fl] - D[0, fl]))
        G[1, j] = lam * ((FH[1, fr] - D[1, fr] - sr)
                         - (FH[1, fl] - D[1, fl] - sl))
        G[2, j] = lam * ((FH[2, fr] - D[2, fr] - SQ[1, fr] - uface[fr] * sr)
                         - (FH[2, fl] - D[2, fl] - SQ[1, fl] - uface[fl] * sl))
    return OK


@njit(cache=True)
def rk3_kernel(Up, dt, dx, gamma, R, c_v, eta0, kappa0, k_B, V_c, noise_amp,
               code_l, code_r, par_l, par_r, rng):
    Mp = Up.shape[1]
    M = Mp - 2 * NG
    U0 = Up.copy()
    G = np.empty((3, M))

    st = rk3_divergence(Up, dt, dx, gamma, R, c_v, eta0, kappa0, k_B, V_c,
                        noise_amp, code_l, code_r, par_l, par_r, rng, G)
    if st != OK:
        return st
    for j in range(M):
        i = NG + j
        for c in range(3):
            Up[c, i] = U0[c, i] - G[c, j]

    st = rk3_divergence(Up, dt, dx, gamma, R, c_v, eta0, kappa0, k_B, V_c,
                        noise_amp, code_l, code_r, par_l, par_r, rng, G)
    if st != OK:
        return st
    for j in range(M):
        i = NG + j
        for c in range(3):
            Up[c, i] = 0.75 * U0[c, i] + 0.25 * (Up[c, i] - G[c, j])

    st = rk3_divergence(Up, dt, dx, gamma, R, c_v, eta0, kappa0, k_B, V_c,
                        noise_amp, code_l, code_r, par_l, par_r, rng, G)
    if st != OK:
        return st
    third = 1.0 / 3.0
    for j in range(M):
        i = NG + j
        for c in range(3):
            Up[c, i] = third * U0[c, i] \
                + (2.0 * third) * (Up[c, i] - G[c, j])

    return first_invalid_interior(Up, c_v)
