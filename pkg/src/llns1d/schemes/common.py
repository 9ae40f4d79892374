"""Shared compiled helpers for the three scheme kernels.

All kernels work on padded conserved arrays of shape (3, M + 2*NG) with NG=2
ghost cells, and on face arrays of shape (., M+1) where face f sits between
padded cells NG+f-1 and NG+f.  Status codes returned by kernels:

    OK (-1), CFL_FAIL (-10), VACUUM_FAIL (-11), or the padded index of the
    first cell with nonpositive density/internal energy.
"""
import numpy as np
from numba import njit

from llns1d.boundaries import BC_PERIODIC, BC_RESERVOIR, BC_WALL, GHOST_DEPTH
from llns1d.noise import heat_amplitude, stress_amplitude

NG = GHOST_DEPTH

OK = -1
CFL_FAIL = -10
VACUUM_FAIL = -11


@njit(cache=True)
def primitives_padded(Up, c_v, R, rho, u, T, P):
    """Fill primitive rows for every padded cell; return first bad padded
    index or OK."""
    n = Up.shape[1]
    bad = OK
    for i in range(n):
        r = Up[0, i]
        if not r > 0.0:
            if bad == OK:
                bad = i
            rho[i] = r
            u[i] = 0.0
            T[i] = -1.0
            P[i] = -1.0
            continue
        vel = Up[1, i] / r
        e_int = Up[2, i] - 0.5 * r * vel * vel
        rho[i] = r
        u[i] = vel
        T[i] = e_int / (c_v * r)
        P[i] = R * r * T[i]
        if not e_int > 0.0 and bad == OK:
            bad = i
    return bad


@njit(cache=True)
def cell_euler_flux(rho, u, T, P, c_v, F):
    """Analytic hyperbolic flux (rho u, rho u^2 + P, (E+P) u) per padded cell."""
    n = rho.shape[0]
    for i in range(n):
        E = c_v * rho[i] * T[i] + 0.5 * rho[i] * u[i] * u[i]
        F[0, i] = rho[i] * u[i]
        F[1, i] = rho[i] * u[i] * u[i] + P[i]
        F[2, i] = (E + P[i]) * u[i]


@njit(cache=True)
def diffusive_faces(rho, u, T, dx, eta0, kappa0, code_l, code_r, Twall_l,
                    Twall_r, D):
    """Diffusive flux (0, (4/3) eta u_x, (4/3) eta u u_x + kappa T_x) at the
    M+1 faces; centered differences with arithmetic face averages, one-sided
    at thermal-wall faces (u=0, T=T_wall, coefficients at T_wall)."""
    M = rho.shape[0] - 2 * NG
    for f in range(M + 1):
        a = NG + f - 1
        b = NG + f
        if f == 0 and code_l == BC_WALL:
            u_x = (-8.0 * 0.0 + 9.0 * u[NG] - u[NG + 1]) / (3.0 * dx)
            T_x = (-8.0 * Twall_l + 9.0 * T[NG] - T[NG + 1]) / (3.0 * dx)
            eta_f = eta0 * np.sqrt(Twall_l)
            kap_f = kappa0 * np.sqrt(Twall_l)
            D[0, f] = 0.0
            D[1, f] = (4.0 / 3.0) * eta_f * u_x
            D[2, f] = kap_f * T_x
        elif f == M and code_r == BC_WALL:
            iM = NG + M - 1
            u_x = -(-8.0 * 0.0 + 9.0 * u[iM] - u[iM - 1]) / (3.0 * dx)
            T_x = -(-8.0 * Twall_r + 9.0 * T[iM] - T[iM - 1]) / (3.0 * dx)
            eta_f = eta0 * np.sqrt(Twall_r)
            kap_f = kappa0 * np.sqrt(Twall_r)
            D[0, f] = 0.0
            D[1, f] = (4.0 / 3.0) * eta_f * u_x
            D[2, f] = kap_f * T_x
        else:
            u_x = (u[b] - u[a]) / dx
            T_x = (T[b] - T[a]) / dx
            eta_f = 0.5 * eta0 * (np.sqrt(T[a]) + np.sqrt(T[b]))
            kap_f = 0.5 * kappa0 * (np.sqrt(T[a]) + np.sqrt(T[b]))
            u_f = 0.5 * (u[a] + u[b])
            D[0, f] = 0.0
            D[1, f] = (4.0 / 3.0) * eta_f * u_x
            D[2, f] = (4.0 / 3.0) * eta_f * u_f * u_x + kap_f * T_x
    return D


@njit(cache=True)
def stochastic_faces(rho, u, T, dt, dx, V_c, eta0, kappa0, k_B, noise_amp,
                     code_l, code_r, Twall_l, Twall_r, rng, SQ):
    """Draw fresh stress (row 0) and heat (row 1) samples for the M+1 faces,
    already scaled by noise_amp.

    Thermal-wall faces pair (T_wall, T_interior); reservoir faces carry no
    noise; periodic runs share one sample between face 0 and face M (same
    physical face).
    """
    M = rho.shape[0] - 2 * NG
    if noise_amp == 0.0:
        SQ[:, :] = 0.0
        return SQ
    for f in range(M + 1):
        a = NG + f - 1
        b = NG + f
        Ta = T[a]
        Tb = T[b]
        if f == 0:
            if code_l == BC_RESERVOIR:
                SQ[0, f] = 0.0
                SQ[1, f] = 0.0
                continue
            if code_l == BC_WALL:
                Ta = Twall_l
                Tb = T[NG]
        elif f == M:
            if code_r == BC_RESERVOIR:
                SQ[0, f] = 0.0
                SQ[1, f] = 0.0
                continue
            if code_r == BC_WALL:
                Ta = T[NG + M - 1]
                Tb = Twall_r
        s_amp = stress_amplitude(Ta, Tb, eta0 * np.sqrt(Ta), eta0 * np.sqrt(Tb),
                                 dt, V_c, k_B)
        q_amp = heat_amplitude(Ta, Tb, kappa0 * np.sqrt(Ta), kappa0 * np.sqrt(Tb),
                               dt, V_c, k_B)
        SQ[0, f] = noise_amp * s_amp * rng.standard_normal()
        SQ[1, f] = noise_amp * q_amp * rng.standard_normal()
    if code_l == BC_PERIODIC:  # face M is the same physical face as face 0
        SQ[0, M] = SQ[0, 0]
        SQ[1, M] = SQ[1, 0]
    return SQ


@njit(cache=True)
def assemble_noise_average(u, SQ, S):
    """(0, s, q + u_face s) with the arithmetic-average face velocity.

    Wall faces need no special case: the reflected ghost makes the average
    velocity vanish there, and reservoir faces carry s = q = 0.
    """
    M = SQ.shape[1] - 1
    for f in range(M + 1):
        a = NG + f - 1
        b = NG + f
        uf = 0.5 * (u[a] + u[b])
        S[0, f] = 0.0
        S[1, f] = SQ[0, f]
        S[2, f] = SQ[1, f] + uf * SQ[0, f]


@njit(cache=True)
def first_invalid_interior(Up, c_v):
    """Padded index of the first interior cell with nonpositive density or
    internal energy, or OK."""
    M = Up.shape[1] - 2 * NG
    for j in range(M):
        i = NG + j
        r = Up[0, i]
        if not r > 0.0:
            return i
        e_int = Up[2, i] - 0.5 * Up[1, i] * Up[1, i] / r
        if not e_int > 0.0:
            return i
    return OK
