"""Periodic, thermal-wall, and reservoir boundaries via a two-cell ghost layer.

Ghost filling works on padded arrays of shape (3, M + 2*GHOST_DEPTH) so the
scheme kernels can difference straight across the boundary faces.  Thermal
walls reflect mass and momentum and extrapolate temperature linearly through
the wall value; reservoirs pin the ghost cells to a fixed state.
"""
from dataclasses import dataclass
from typing import Union

import numpy as np
from numba import njit

from llns1d.gas import CellField, GasSpec, PrimitiveState, conserved_from_primitive
from llns1d.kinds import SchemeKind
from llns1d.riemann import riemann_solve

GHOST_DEPTH = 2

# integer codes used by the compiled kernels
BC_PERIODIC = 0
BC_WALL = 1
BC_RESERVOIR = 2


@dataclass(frozen=True)
class Periodic:
    pass


@dataclass(frozen=True)
class ThermalWall:
    T_wall: float


@dataclass(frozen=True)
class Reservoir:
    state: PrimitiveState


EndCondition = Union[Periodic, ThermalWall, Reservoir]


@dataclass(frozen=True)
class BoundaryCondition:
    left: EndCondition
    right: EndCondition
    ghost_depth: int = GHOST_DEPTH

    def __post_init__(self):
        if isinstance(self.left, Periodic) != isinstance(self.right, Periodic):
            raise ValueError("periodic boundaries must be used at both ends")
        for side in (self.left, self.right):
            if isinstance(side, ThermalWall) and not side.T_wall > 0:
                raise ValueError("wall temperature must be positive")
            if isinstance(side, Reservoir):
                s = side.state
                if not (s.rho > 0 and s.T > 0 and s.P > 0):
                    raise ValueError("reservoir state must be physical")
        if self.ghost_depth != GHOST_DEPTH:
            raise ValueError(f"ghost depth is fixed at {GHOST_DEPTH}")

    @property
    def is_periodic(self):
        return isinstance(self.left, Periodic)

    @classmethod
    def periodic(cls):
        return cls(Periodic(), Periodic())

    @classmethod
    def walls(cls, T_left, T_right=None):
        T_right = T_left if T_right is None else T_right
        return cls(ThermalWall(T_left), ThermalWall(T_right))

    @classmethod
    def reservoirs(cls, left_state, right_state):
        return cls(Reservoir(left_state), Reservoir(right_state))


def end_code(end: EndCondition) -> int:
    if isinstance(end, Periodic):
        return BC_PERIODIC
    if isinstance(end, ThermalWall):
        return BC_WALL
    if isinstance(end, Reservoir):
        return BC_RESERVOIR
    raise TypeError(f"not a boundary end: {end!r}")


def end_params(end: EndCondition, gas: GasSpec) -> np.ndarray:
    """Pack an end condition for the kernels: wall -> [T_wall,0,0,0],
    reservoir -> [rho,u,T,P], periodic -> zeros."""
    out = np.zeros(4)
    if isinstance(end, ThermalWall):
        out[0] = end.T_wall
    elif isinstance(end, Reservoir):
        s = end.state
        out[:] = (s.rho, s.u, s.T, s.P)
    return out


@njit(cache=True)
def fill_ghost_padded(Up, code_l, code_r, par_l, par_r, c_v):
    """Fill the two ghost cells at each end of a padded (3, M+4) array."""
    ng = GHOST_DEPTH
    M = Up.shape[1] - 2 * ng
    if code_l == BC_PERIODIC:
        for k in range(ng):
            for c in range(3):
                Up[c, k] = Up[c, M + k]
                Up[c, ng + M + k] = Up[c, ng + k]
        return
    # left end
    if code_l == BC_WALL:
        Tw = par_l[0]
        for k in range(1, ng + 1):
            gi = ng - k
            ii = ng + k - 1
            rho = Up[0, ii]
            J = Up[1, ii]
            kin = 0.5 * J * J / rho
            Ti = (Up[2, ii] - kin) / (c_v * rho)
            Tg = 2.0 * Tw - Ti
            Up[0, gi] = rho
            Up[1, gi] = -J
            Up[2, gi] = c_v * rho * Tg + kin
    else:  # reservoir
        rho = par_l[0]
        u = par_l[1]
        T = par_l[2]
        for gi in range(ng):
            Up[0, gi] = rho
            Up[1, gi] = rho * u
            Up[2, gi] = c_v * rho * T + 0.5 * rho * u * u
    # right end
    if code_r == BC_WALL:
        Tw = par_r[0]
        for k in range(1, ng + 1):
            gi = ng + M + k - 1
            ii = ng + M - k
            rho = Up[0, ii]
            J = Up[1, ii]
            kin = 0.5 * J * J / rho
            Ti = (Up[2, ii] - kin) / (c_v * rho)
            Tg = 2.0 * Tw - Ti
            Up[0, gi] = rho
            Up[1, gi] = -J
            Up[2, gi] = c_v * rho * Tg + kin
    else:
        rho = par_r[0]
        u = par_r[1]
        T = par_r[2]
        for k in range(ng):
            gi = ng + M + k
            Up[0, gi] = rho
            Up[1, gi] = rho * u
            Up[2, gi] = c_v * rho * T + 0.5 * rho * u * u


@njit(cache=True)
def one_sided_face_derivative(f_wall, f1, f2, dx):
    """d/dx at a left-end face from the wall value and the two nearest cell
    centers at dx/2 and 3dx/2; second order (exact on quadratics)."""
    return (-8.0 * f_wall + 9.0 * f1 - f2) / (3.0 * dx)


def pad_field(field: CellField) -> np.ndarray:
    Up = np.empty((3, field.grid.M_c + 2 * GHOST_DEPTH))
    Up[:, GHOST_DEPTH:GHOST_DEPTH + field.grid.M_c] = field.U
    return Up


def fill_ghost_cells(field: CellField, bc: BoundaryCondition,
                     scheme_kind: SchemeKind, gas: GasSpec) -> np.ndarray:
    """Return the padded (3, M+4) array with ghost cells filled.

    Conserved-variable reflection (J negated) with the ghost temperature
    extrapolated through T_wall coincides with primitive-variable reflection
    plus the same extrapolation, so all schemes share one fill.
    """
    SchemeKind.parse(scheme_kind)
    field.validate(gas)
    Up = pad_field(field)
    fill_ghost_padded(Up, end_code(bc.left), end_code(bc.right),
                      end_params(bc.left, gas), end_params(bc.right, gas),
                      gas.c_v)
    return Up


def _wall_for_end(bc: BoundaryCondition, end: str) -> ThermalWall:
    side = bc.left if end == "left" else bc.right
    if not isinstance(side, ThermalWall):
        raise ValueError(f"{end} end is not a thermal wall")
    return side


def wall_diffusive_flux(field: CellField, end: str, bc: BoundaryCondition,
                        gas: GasSpec) -> np.ndarray:
    """Diffusive flux (0, (4/3) eta u_x, kappa T_x) at a wall face.

    One-sided second-order differences anchored at the wall values u=0,
    T=T_wall; transport coefficients evaluated at T_wall.  The viscous work
    term vanishes because u=0 on the wall.
    """
    wall = _wall_for_end(bc, end)
    dx = field.grid.dx
    rho = field.rho
    u = field.J / rho
    T = (field.E - 0.5 * field.J ** 2 / rho) / (gas.c_v * rho)
    if end == "left":
        u1, u2 = u[0], u[1]
        T1, T2 = T[0], T[1]
        sign = 1.0
    else:
        u1, u2 = u[-1], u[-2]
        T1, T2 = T[-1], T[-2]
        sign = -1.0
    u_x = sign * one_sided_face_derivative(0.0, u1, u2, dx)
    T_x = sign * one_sided_face_derivative(wall.T_wall, T1, T2, dx)
    eta_w = gas.eta0 * np.sqrt(wall.T_wall)
    kappa_w = gas.kappa0 * np.sqrt(wall.T_wall)
    return np.array([0.0, (4.0 / 3.0) * eta_w * u_x, kappa_w * T_x])


# face interpolation weights shared with the three-stage scheme
ALPHA1 = (np.sqrt(7.0) + 1.0) / 4.0
ALPHA2 = (np.sqrt(7.0) - 1.0) / 4.0


def _analytic_flux(state: PrimitiveState, gas: GasSpec) -> np.ndarray:
    U = conserved_from_primitive(state, gas)
    return np.array([U.J,
                     U.J * state.u + state.P,
                     (U.E + state.P) * state.u])


def wall_hyperbolic_state(field: CellField, end: str, bc: BoundaryCondition,
                          scheme_kind: SchemeKind, gas: GasSpec) -> np.ndarray:
    """Hyperbolic flux through a wall or reservoir face.

    Thermal walls carry no advective mass or energy flux; the momentum
    component is the wall pressure rho_face * R * T_wall, with rho_face picked
    per scheme.  Reservoir faces get the flux of the exterior/interior Riemann
    solution.
    """
    kind = SchemeKind.parse(scheme_kind)
    side = bc.left if end == "left" else bc.right
    rho, u, T, P = _primitive_rows(field, gas)
    if end == "left":
        i0, i1 = 0, 1
    else:
        i0, i1 = field.grid.M_c - 1, field.grid.M_c - 2
    interior = PrimitiveState(rho[i0], u[i0], P[i0], T[i0])

    if isinstance(side, Reservoir):
        if end == "left":
            face = riemann_solve(side.state, interior, gas)
        else:
            face = riemann_solve(interior, side.state, gas)
        return _analytic_flux(face, gas)

    wall = _wall_for_end(bc, end)
    if kind is SchemeKind.MACCORMACK:
        # pressure of the adjacent ghost cell (reflected density, mirrored T)
        rho_face = rho[i0]
        P_wall = rho_face * gas.R * (2.0 * wall.T_wall - T[i0])
        return np.array([0.0, P_wall, 0.0])
    if kind is SchemeKind.PPM:
        mirrored = PrimitiveState(interior.rho, -interior.u, interior.P,
                                  interior.T)
        if end == "left":
            face = riemann_solve(mirrored, interior, gas)
        else:
            face = riemann_solve(interior, mirrored, gas)
        rho_face = face.rho
    else:  # three-stage scheme: conserved-variable interpolation, u=0 by symmetry
        rho_face = 2.0 * (ALPHA1 * rho[i0] - ALPHA2 * rho[i1])
    return np.array([0.0, rho_face * gas.R * wall.T_wall, 0.0])


def _primitive_rows(field, gas):
    rho = field.rho
    u = field.J / rho
    T = (field.E - 0.5 * field.J ** 2 / rho) / (gas.c_v * rho)
    P = rho * gas.R * T
    return rho, u, T, P
