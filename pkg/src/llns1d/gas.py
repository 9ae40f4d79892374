"""Ideal monatomic hard-sphere gas: states, conversions, transport, stability.

All quantities are cgs (g, cm, s, K, erg). Conserved variables per unit volume
are (rho, J, E) = (mass density, momentum density, total energy density) with

    E = c_v rho T + rho u^2 / 2,    P = rho R T,    J = rho u.

Transport coefficients follow the hard-sphere square-root law eta = eta0*sqrt(T),
kappa = kappa0*sqrt(T) with first-order Chapman-Enskog prefactors.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

KB = 1.380649e-16  # Boltzmann constant [erg/K]

# Hard-sphere argon
ARGON_MASS = 6.63e-23     # [g]
ARGON_DIAMETER = 3.66e-8  # [cm]


@dataclass(frozen=True)
class GasSpec:
    """Monatomic hard-sphere ideal gas.

    Attributes
    ----------
    m : particle mass [g]
    d : molecular diameter [cm]
    k_B : Boltzmann constant [erg/K]
    gamma : ratio of specific heats
    R : specific gas constant k_B/m [erg/(g K)]
    c_v, c_p : specific heats [erg/(g K)]
    eta0, kappa0 : transport prefactors, eta = eta0*sqrt(T), kappa = kappa0*sqrt(T)
    """

    m: float
    d: float
    k_B: float
    gamma: float
    R: float
    c_v: float
    c_p: float
    eta0: float
    kappa0: float

    @classmethod
    def hard_sphere(cls, m: float, d: float, gamma: float = 5.0 / 3.0,
                    k_B: float = KB) -> "GasSpec":
        """Build a gas from mass and diameter.

        Chapman-Enskog first order for hard spheres:
        eta = (5/(16 d^2)) sqrt(m k_B T / pi), kappa = (15/4) (k_B/m) eta.
        """
        if m <= 0.0 or d <= 0.0:
            raise ValueError(f"mass and diameter must be positive, got m={m}, d={d}")
        R = k_B / m
        c_v = R / (gamma - 1.0)
        eta0 = (5.0 / (16.0 * d * d)) * np.sqrt(m * k_B / np.pi)
        kappa0 = (15.0 / 4.0) * R * eta0
        return cls(m=m, d=d, k_B=k_B, gamma=gamma, R=R, c_v=c_v,
                   c_p=gamma * c_v, eta0=eta0, kappa0=kappa0)

    @classmethod
    def argon(cls) -> "GasSpec":
        return cls.hard_sphere(ARGON_MASS, ARGON_DIAMETER)

    def sound_speed(self, T):
        """Adiabatic sound speed sqrt(gamma R T) [cm/s]."""
        return np.sqrt(self.gamma * self.R * T)

    def mean_free_path(self, rho):
        """Hard-sphere mean free path m/(sqrt(2) pi d^2 rho) [cm]."""
        return self.m / (np.sqrt(2.0) * np.pi * self.d * self.d * rho)

    def thermal_speed(self, T):
        """Per-component thermal velocity scale sqrt(k_B T / m) [cm/s]."""
        return np.sqrt(self.k_B * T / self.m)


@dataclass(frozen=True)
class GridSpec:
    """Uniform 1D grid of M_c cells spanning [0, L] with yz cross-section sigma."""

    M_c: int
    L: float
    sigma: float

    def __post_init__(self):
        if self.M_c < 1 or self.L <= 0.0 or self.sigma <= 0.0:
            raise ValueError(f"invalid grid: M_c={self.M_c}, L={self.L}, sigma={self.sigma}")

    @property
    def dx(self) -> float:
        return self.L / self.M_c

    @property
    def V_c(self) -> float:
        return self.dx * self.sigma

    def cell_centers(self) -> np.ndarray:
        return (np.arange(self.M_c) + 0.5) * self.dx


@dataclass(frozen=True)
class ConservedState:
    rho: float
    J: float
    E: float


@dataclass(frozen=True)
class PrimitiveState:
    rho: float
    u: float
    P: float
    T: float


def primitive(rho: float, u: float, T: float, gas: GasSpec) -> PrimitiveState:
    """Build a PrimitiveState from (rho, u, T), closing P via the EOS."""
    if rho <= 0.0 or T <= 0.0:
        raise ValueError(f"nonpositive density or temperature: rho={rho}, T={T}")
    return PrimitiveState(rho=rho, u=u, P=rho * gas.R * T, T=T)


def conserved_from_primitive(v: PrimitiveState, gas: GasSpec) -> ConservedState:
    """(rho, u, T) -> (rho, J, E) with J = rho u, E = c_v rho T + rho u^2/2."""
    if v.rho <= 0.0 or v.T <= 0.0:
        raise ValueError(f"nonpositive density or temperature: rho={v.rho}, T={v.T}")
    return ConservedState(rho=v.rho, J=v.rho * v.u,
                          E=gas.c_v * v.rho * v.T + 0.5 * v.rho * v.u * v.u)


def primitive_from_conserved(u: ConservedState, gas: GasSpec) -> PrimitiveState:
    """(rho, J, E) -> (rho, u, P, T); raises on unphysical internal energy."""
    if u.rho <= 0.0:
        raise ValueError(f"nonpositive density: rho={u.rho}")
    vel = u.J / u.rho
    e_int = u.E - 0.5 * u.J * u.J / u.rho
    if e_int <= 0.0:
        raise ValueError(f"nonpositive internal energy: state ({u.rho}, {u.J}, {u.E})")
    T = e_int / (gas.c_v * u.rho)
    return PrimitiveState(rho=u.rho, u=vel, P=u.rho * gas.R * T, T=T)


def transport_coefficients(T, gas: GasSpec):
    """Return (eta, kappa) at temperature T (scalar or array)."""
    if np.any(np.asarray(T) <= 0.0):
        raise ValueError(f"nonpositive temperature: T={T}")
    rt = np.sqrt(T)
    return gas.eta0 * rt, gas.kappa0 * rt


@dataclass
class CellField:
    """Cell-centered conserved variables on a grid.

    U has shape (3, M_c) with rows (rho, J, E); row views are exposed as
    properties so kernels can work on contiguous per-variable arrays.
    """

    grid: GridSpec
    U: np.ndarray

    def __post_init__(self):
        self.U = np.ascontiguousarray(self.U, dtype=np.float64)
        if self.U.shape != (3, self.grid.M_c):
            raise ValueError(f"U shape {self.U.shape} != (3, {self.grid.M_c})")

    @property
    def rho(self) -> np.ndarray:
        return self.U[0]

    @property
    def J(self) -> np.ndarray:
        return self.U[1]

    @property
    def E(self) -> np.ndarray:
        return self.U[2]

    def cell(self, j: int) -> ConservedState:
        return ConservedState(rho=self.U[0, j], J=self.U[1, j], E=self.U[2, j])

    def copy(self) -> "CellField":
        return CellField(self.grid, self.U.copy())

    def validate(self, gas: GasSpec) -> None:
        """Raise ValueError naming the first unphysical cell, if any."""
        e_int = self.U[2] - 0.5 * self.U[1] * self.U[1] / self.U[0]
        bad = np.where((self.U[0] <= 0.0) | (e_int <= 0.0))[0]
        if bad.size:
            j = int(bad[0])
            raise ValueError(f"unphysical state in cell {j}: rho={self.U[0, j]}, "
                             f"J={self.U[1, j]}, E={self.U[2, j]}")


def uniform_field(grid: GridSpec, gas: GasSpec, rho: float, u: float,
                  T: float) -> CellField:
    c = conserved_from_primitive(primitive(rho, u, T, gas), gas)
    U = np.empty((3, grid.M_c))
    U[0] = c.rho
    U[1] = c.J
    U[2] = c.E
    return CellField(grid, U)


def field_from_primitive_arrays(grid: GridSpec, gas: GasSpec, rho, u, T) -> CellField:
    rho = np.asarray(rho, dtype=np.float64)
    u = np.asarray(u, dtype=np.float64)
    T = np.asarray(T, dtype=np.float64)
    if np.any(rho <= 0.0) or np.any(T <= 0.0):
        raise ValueError("nonpositive density or temperature in initial arrays")
    U = np.empty((3, grid.M_c))
    U[0] = rho
    U[1] = rho * u
    U[2] = gas.c_v * rho * T + 0.5 * rho * u * u
    return CellField(grid, U)


def primitive_arrays(field: CellField, gas: GasSpec):
    """Vectorized conserved -> primitive: returns (rho, u, T, P) arrays."""
    rho, J, E = field.U
    if np.any(rho <= 0.0):
        raise ValueError("nonpositive density in field")
    u = J / rho
    e_int = E - 0.5 * J * u
    if np.any(e_int <= 0.0):
        raise ValueError("nonpositive internal energy in field")
    T = e_int / (gas.c_v * rho)
    return rho, u, T, rho * gas.R * T


def max_stable_dt(field: CellField, gas: GasSpec) -> float:
    """Largest dt meeting the advective and diffusive stability bounds.

    Per cell: (|u| + c_s) dt/dx <= 1 and max(4 eta/(3 rho), kappa/(rho c_v))
    * dt/dx^2 <= 1/2; the minimum over cells and both bounds is returned.
    """
    rho, u, T, P = primitive_arrays(field, gas)
    dx = field.grid.dx
    c_s = np.sqrt(gas.gamma * P / rho)
    eta, kappa = transport_coefficients(T, gas)
    dt_adv = dx / (np.abs(u) + c_s)
    diffusivity = np.maximum(4.0 * eta / (3.0 * rho), kappa / (rho * gas.c_v))
    dt_diff = 0.5 * dx * dx / diffusivity
    return float(min(dt_adv.min(), dt_diff.min()))
