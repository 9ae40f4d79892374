"""Hard-sphere direct simulation Monte Carlo gas in a 1D transport geometry.

Particles carry a position along the transport axis and a full 3-component
velocity; the transverse extent enters only through the cross-section that
fixes cell volumes.  A step alternates free flight with boundary handling,
a counting sort into collision cells, and stochastic binary collisions by
the no-time-counter method with hard-sphere cross-section pi d^2.  Accepted
pairs scatter isotropically on the relative-velocity sphere, conserving
momentum and kinetic energy exactly.  The fluctuations of this simulator
are physical, which is what makes it the reference for the grid solvers.
"""
import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from llns1d.boundaries import (
    BoundaryCondition,
    Periodic,
    Reservoir,
    ThermalWall,
)
from llns1d.gas import CellField, GasSpec, GridSpec

# Table-value target width; the actual width is L/n with n = round(L/target)
DEFAULT_COLLISION_WIDTH = 3.13e-6
VMAX_INIT_FACTOR = 5.0

# per-side codes for the advection kernel
_SIDE_PERIODIC = 0
_SIDE_THERMAL = 1
_SIDE_SPECULAR = 2
_SIDE_ABSORB = 3


@dataclass(frozen=True)
class SpecularWall:
    """Elastic wall: reflects the transport velocity component."""


@dataclass
class ParticleEnsemble:
    """Positions (N,) along the transport axis and velocities (N, 3)."""

    x: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        self.x = np.ascontiguousarray(self.x, dtype=np.float64)
        self.v = np.ascontiguousarray(self.v, dtype=np.float64)
        if self.v.shape != (self.x.shape[0], 3):
            raise ValueError("velocities must have shape (N, 3)")

    @property
    def N_p(self):
        return self.x.shape[0]

    def total_momentum(self, gas: GasSpec) -> np.ndarray:
        return gas.m * self.v.sum(axis=0)

    def total_energy(self, gas: GasSpec) -> float:
        return 0.5 * gas.m * float(np.sum(self.v * self.v))


@dataclass
class CollisionGrid:
    """Uniform collision cells with per-cell NTC bookkeeping.

    v_max is the adaptive majorant relative speed, carry the fractional
    candidate count left over from previous steps.
    """

    n_cells: int
    L: float
    sigma: float
    v_max: np.ndarray
    carry: np.ndarray

    @property
    def width(self):
        return self.L / self.n_cells

    @property
    def V_cell(self):
        return self.width * self.sigma

    @classmethod
    def for_domain(cls, L: float, sigma: float, gas: GasSpec, T_init: float,
                   target_width: float = DEFAULT_COLLISION_WIDTH):
        n = max(1, int(round(L / target_width)))
        v0 = VMAX_INIT_FACTOR * math.sqrt(gas.k_B * T_init / gas.m)
        return cls(n_cells=n, L=L, sigma=sigma,
                   v_max=np.full(n, v0), carry=np.zeros(n))


# ---------------------------------------------------------------------------
# kernels


@njit(cache=True)
def _emit_into(v, i, ct, direction, rng):
    """Thermal-wall outgoing velocity: Gaussian tangentials, Rayleigh normal."""
    v[i, 1] = ct * rng.standard_normal()
    v[i, 2] = ct * rng.standard_normal()
    u = 1.0 - rng.random()  # in (0, 1], keeps the log finite
    v[i, 0] = direction * ct * math.sqrt(-2.0 * math.log(u))


@njit(cache=True)
def _emit_batch(out, ct, direction, rng):
    for i in range(out.shape[0]):
        _emit_into(out, i, ct, direction, rng)


@njit(cache=True)
def _advect_kernel(x, v, dt, L, code_l, code_r, ct_l, ct_r, rng):
    """Free flight with boundary handling; absorbed particles end outside."""
    n = x.shape[0]
    for i in range(n):
        if code_l == _SIDE_PERIODIC:
            xi = x[i] + v[i, 0] * dt
            # single-step displacements are far below L; wrap by branching
            # and keep fmod only for pathologically large motion
            if xi >= L:
                xi -= L
                if xi >= L:
                    xi = xi % L
            elif xi < 0.0:
                xi += L
                if xi < 0.0:
                    xi = xi % L
            x[i] = xi
            continue
        t_rem = dt
        xi = x[i]
        while True:
            xn = xi + v[i, 0] * t_rem
            if xn < 0.0:
                if code_l == _SIDE_ABSORB:
                    xi = xn
                    break
                t_rem -= (0.0 - xi) / v[i, 0]
                xi = 0.0
                if code_l == _SIDE_SPECULAR:
                    v[i, 0] = -v[i, 0]
                else:
                    _emit_into(v, i, ct_l, 1.0, rng)
            elif xn > L:
                if code_r == _SIDE_ABSORB:
                    xi = xn
                    break
                t_rem -= (L - xi) / v[i, 0]
                xi = L
                if code_r == _SIDE_SPECULAR:
                    v[i, 0] = -v[i, 0]
                else:
                    _emit_into(v, i, ct_r, -1.0, rng)
            else:
                xi = xn
                break
        x[i] = xi


@njit(cache=True)
def _compact_kernel(x, v, L):
    """Move particles still inside [0, L] to the front of the arrays in
    place; returns the surviving count."""
    n = x.shape[0]
    k = 0
    for i in range(n):
        xi = x[i]
        if 0.0 <= xi <= L:
            if k != i:
                x[k] = xi
                v[k, 0] = v[i, 0]
                v[k, 1] = v[i, 1]
                v[k, 2] = v[i, 2]
            k += 1
    return k


@njit(cache=True)
def _sort_kernel(x, L, n_cells, counts, start, fill, order):
    n = x.shape[0]
    inv = n_cells / L
    for c in range(n_cells):
        counts[c] = 0
    for i in range(n):
        c = int(x[i] * inv)
        if c < 0:
            c = 0
        elif c >= n_cells:
            c = n_cells - 1
        counts[c] += 1
    s = 0
    for c in range(n_cells):
        start[c] = s
        fill[c] = s
        s += counts[c]
    for i in range(n):
        c = int(x[i] * inv)
        if c < 0:
            c = 0
        elif c >= n_cells:
            c = n_cells - 1
        order[fill[c]] = i
        fill[c] += 1


@njit(cache=True)
def _collide_kernel(v, counts, start, order, v_max, carry, coeff, rng):
    """NTC collisions cell by cell; returns the number of accepted pairs.

    coeff = pi d^2 dt / V_cell; the candidate count is
    N(N-1)/2 * coeff * v_max plus the fractional carry from earlier steps.
    """
    accepted = 0
    for c in range(counts.shape[0]):
        N = counts[c]
        if N < 2:
            continue
        cand = 0.5 * N * (N - 1) * coeff * v_max[c] + carry[c]
        n_cand = int(cand)
        carry[c] = cand - n_cand
        for _ in range(n_cand):
            a = int(rng.random() * N)
            if a == N:
                a = N - 1
            b = int(rng.random() * (N - 1))
            if b == N - 1:
                b = N - 2
            if b >= a:
                b += 1
            i = order[start[c] + a]
            j = order[start[c] + b]
            dvx = v[i, 0] - v[j, 0]
            dvy = v[i, 1] - v[j, 1]
            dvz = v[i, 2] - v[j, 2]
            vr = math.sqrt(dvx * dvx + dvy * dvy + dvz * dvz)
            if vr > v_max[c]:
                v_max[c] = vr
            if vr > v_max[c] * rng.random():
                accepted += 1
                cos_t = 2.0 * rng.random() - 1.0
                sin_t = math.sqrt(max(0.0, 1.0 - cos_t * cos_t))
                phi = 2.0 * math.pi * rng.random()
                wx = vr * sin_t * math.cos(phi)
                wy = vr * sin_t * math.sin(phi)
                wz = vr * cos_t
                cmx = 0.5 * (v[i, 0] + v[j, 0])
                cmy = 0.5 * (v[i, 1] + v[j, 1])
                cmz = 0.5 * (v[i, 2] + v[j, 2])
                v[i, 0] = cmx + 0.5 * wx
                v[i, 1] = cmy + 0.5 * wy
                v[i, 2] = cmz + 0.5 * wz
                v[j, 0] = cmx - 0.5 * wx
                v[j, 1] = cmy - 0.5 * wy
                v[j, 2] = cmz - 0.5 * wz
    return accepted


@njit(cache=True)
def _sample_kernel(x, v, M, L, U):
    for r in range(3):
        for c in range(M):
            U[r, c] = 0.0
    inv = M / L
    for i in range(x.shape[0]):
        c = int(x[i] * inv)
        if c < 0:
            c = 0
        elif c >= M:
            c = M - 1
        U[0, c] += 1.0
        U[1, c] += v[i, 0]
        U[2, c] += 0.5 * (v[i, 0] * v[i, 0] + v[i, 1] * v[i, 1]
                          + v[i, 2] * v[i, 2])


# ---------------------------------------------------------------------------
# operations


def _side_code(end):
    if isinstance(end, Periodic):
        return _SIDE_PERIODIC
    if isinstance(end, ThermalWall):
        return _SIDE_THERMAL
    if isinstance(end, SpecularWall):
        return _SIDE_SPECULAR
    if isinstance(end, Reservoir):
        return _SIDE_ABSORB
    raise ValueError(f"unsupported boundary for particles: {end!r}")


def thermal_wall_emit(T_wall: float, gas: GasSpec, stream, n: int = 1,
                      direction: float = 1.0) -> np.ndarray:
    """Sample n outgoing velocities from a thermal wall, shape (n, 3)."""
    if not T_wall > 0:
        raise ValueError("wall temperature must be positive")
    out = np.empty((n, 3))
    ct = math.sqrt(gas.k_B * T_wall / gas.m)
    _emit_batch(out, ct, direction, stream.rng)
    return out


def advect(ensemble: ParticleEnsemble, dt: float, bc: BoundaryCondition,
           grid: GridSpec, gas: GasSpec, stream) -> ParticleEnsemble:
    """Ballistic move over dt with boundary interactions applied in place.

    Reservoir sides absorb: crossing particles are dropped and a trimmed
    ensemble is returned (injection is the simulation driver's job).
    """
    if not dt > 0:
        raise ValueError("time step must be positive")
    code_l = _side_code(bc.left)
    code_r = _side_code(bc.right)
    ct_l = math.sqrt(gas.k_B * bc.left.T_wall / gas.m) \
        if code_l == _SIDE_THERMAL else 0.0
    ct_r = math.sqrt(gas.k_B * bc.right.T_wall / gas.m) \
        if code_r == _SIDE_THERMAL else 0.0
    _advect_kernel(ensemble.x, ensemble.v, dt, grid.L, code_l, code_r,
                   ct_l, ct_r, stream.rng)
    if code_l == _SIDE_ABSORB or code_r == _SIDE_ABSORB:
        keep = (ensemble.x >= 0.0) & (ensemble.x <= grid.L)
        if not keep.all():
            return ParticleEnsemble(ensemble.x[keep], ensemble.v[keep])
    return ensemble


def collide(ensemble: ParticleEnsemble, cgrid: CollisionGrid, gas: GasSpec,
            dt: float, stream) -> int:
    """One collision sweep; returns the number of accepted pairs."""
    n = cgrid.n_cells
    counts = np.empty(n, dtype=np.int64)
    start = np.empty(n, dtype=np.int64)
    fill = np.empty(n, dtype=np.int64)
    order = np.empty(ensemble.N_p, dtype=np.int64)
    _sort_kernel(ensemble.x, cgrid.L, n, counts, start, fill, order)
    coeff = math.pi * gas.d * gas.d * dt / cgrid.V_cell
    return _collide_kernel(ensemble.v, counts, start, order,
                           cgrid.v_max, cgrid.carry, coeff, stream.rng)


def sample_hydro(ensemble: ParticleEnsemble, grid: GridSpec,
                 gas: GasSpec) -> CellField:
    """Bin particles into the sampling grid as conserved densities."""
    U = np.empty((3, grid.M_c))
    _sample_kernel(ensemble.x, ensemble.v, grid.M_c, grid.L, U)
    U *= gas.m / grid.V_c
    return CellField(grid, U)


def maxwellian_ensemble(grid: GridSpec, gas: GasSpec, rho: float, T: float,
                        stream, u: float = 0.0, N: int = None):
    """Uniform equilibrium ensemble; N defaults to rho L sigma / m rounded."""
    if N is None:
        N = int(round(rho * grid.L * grid.sigma / gas.m))
    rng = stream.rng
    x = rng.random(N) * grid.L
    ct = math.sqrt(gas.k_B * T / gas.m)
    v = ct * rng.standard_normal((N, 3))
    v[:, 0] += u
    return ParticleEnsemble(x, v)


def ensemble_from_profile(grid: GridSpec, gas: GasSpec, rho, u, T, stream):
    """Cell-wise Maxwellian ensemble for a piecewise-defined initial state.

    Per-cell counts are the real-valued targets rho_j V_c / m with the
    fractional parts resolved by independent Bernoulli draws, so the mean
    density profile is unbiased.
    """
    rho = np.asarray(rho, dtype=np.float64)
    u = np.asarray(u, dtype=np.float64)
    T = np.asarray(T, dtype=np.float64)
    rng = stream.rng
    target = rho * grid.V_c / gas.m
    counts = np.floor(target).astype(np.int64)
    counts += (rng.random(grid.M_c) < (target - counts)).astype(np.int64)
    xs, vs = [], []
    dx = grid.dx
    for j in range(grid.M_c):
        n = int(counts[j])
        if n == 0:
            continue
        xs.append((j + rng.random(n)) * dx)
        ct = math.sqrt(gas.k_B * T[j] / gas.m)
        vj = ct * rng.standard_normal((n, 3))
        vj[:, 0] += u[j]
        vs.append(vj)
    x = np.concatenate(xs) if xs else np.empty(0)
    v = np.concatenate(vs) if vs else np.empty((0, 3))
    return ParticleEnsemble(x, v)


class DsmcSimulation:
    """Drives move, boundary, and collision phases on a sampling grid.

    Reservoir boundaries inject from Maxwellian buffer slabs each step:
    the slab is filled at the reservoir state over a width covering the
    fastest plausible approach, advanced ballistically, and whatever lands
    inside the domain joins the ensemble.
    """

    BUFFER_SPEEDS = 6.0  # slab width in units of (|u| + c_T) dt

    def __init__(self, ensemble: ParticleEnsemble, grid: GridSpec,
                 gas: GasSpec, bc: BoundaryCondition, dt: float, stream,
                 collision_width: float = DEFAULT_COLLISION_WIDTH,
                 T_init: float = None):
        if not dt > 0:
            raise ValueError("time step must be positive")
        self.ensemble = ensemble
        self.grid = grid
        self.gas = gas
        self.bc = bc
        self.dt = dt
        self.stream = stream
        if T_init is None:
            T_init = self._temperature_estimate()
        self.cgrid = CollisionGrid.for_domain(
            grid.L, grid.sigma, gas, T_init, target_width=collision_width)
        self.code_l = _side_code(bc.left)
        self.code_r = _side_code(bc.right)
        self.ct_l = math.sqrt(gas.k_B * bc.left.T_wall / gas.m) \
            if self.code_l == _SIDE_THERMAL else 0.0
        self.ct_r = math.sqrt(gas.k_B * bc.right.T_wall / gas.m) \
            if self.code_r == _SIDE_THERMAL else 0.0
        self.collision_total = 0
        self.steps_taken = 0
        n = self.cgrid.n_cells
        self._counts = np.empty(n, dtype=np.int64)
        self._start = np.empty(n, dtype=np.int64)
        self._fill = np.empty(n, dtype=np.int64)
        self._coeff = math.pi * gas.d * gas.d * dt / self.cgrid.V_cell
        self._trim = (self.code_l == _SIDE_ABSORB
                      or self.code_r == _SIDE_ABSORB)
        if self._trim:
            # population fluctuates under absorb/inject; hold the particles
            # in capacity buffers so a step never reallocates
            self._grow(ensemble.N_p + max(256, ensemble.N_p // 8))
            n_p = ensemble.N_p
            self._buf_x[:n_p] = ensemble.x
            self._buf_v[:n_p] = ensemble.v
            self.ensemble = ParticleEnsemble(self._buf_x[:n_p],
                                             self._buf_v[:n_p])
        else:
            self._order = np.empty(ensemble.N_p, dtype=np.int64)

    def _grow(self, capacity: int):
        self._buf_x = np.empty(capacity)
        self._buf_v = np.empty((capacity, 3))
        self._order = np.empty(capacity, dtype=np.int64)

    def _temperature_estimate(self):
        v = self.ensemble.v
        if v.shape[0] == 0:
            return 273.0
        spread = v - v.mean(axis=0)
        return float(self.gas.m * np.mean(np.sum(spread * spread, axis=1))
                     / (3.0 * self.gas.k_B))

    def _inject(self, side_end, at_right: bool):
        gas, grid, rng = self.gas, self.grid, self.stream.rng
        state = side_end.state
        ct = math.sqrt(gas.k_B * state.T / gas.m)
        width = self.BUFFER_SPEEDS * (abs(state.u) + ct) * self.dt
        n_density = state.rho / gas.m
        mean_count = n_density * width * grid.sigma
        n = int(rng.poisson(mean_count))
        if n == 0:
            return None
        if at_right:
            x0 = grid.L + rng.random(n) * width
        else:
            x0 = -rng.random(n) * width
        v = ct * rng.standard_normal((n, 3))
        v[:, 0] += state.u
        x = x0 + v[:, 0] * self.dt
        keep = (x >= 0.0) & (x <= grid.L)
        if not keep.any():
            return None
        return x[keep], v[keep]

    def step(self):
        ens, grid = self.ensemble, self.grid
        _advect_kernel(ens.x, ens.v, self.dt, grid.L, self.code_l,
                       self.code_r, self.ct_l, self.ct_r, self.stream.rng)
        if self._trim:
            n = _compact_kernel(ens.x, ens.v, grid.L)
            born = []
            for end, at_right in ((self.bc.left, False),
                                  (self.bc.right, True)):
                if isinstance(end, Reservoir):
                    b = self._inject(end, at_right)
                    if b is not None:
                        born.append(b)
            need = n + sum(b[0].shape[0] for b in born)
            if need > self._buf_x.shape[0]:
                old_x, old_v = self._buf_x, self._buf_v
                self._grow(need + need // 4)
                self._buf_x[:n] = old_x[:n]
                self._buf_v[:n] = old_v[:n]
            for bx, bv in born:
                m = bx.shape[0]
                self._buf_x[n:n + m] = bx
                self._buf_v[n:n + m] = bv
                n += m
            ens = ParticleEnsemble(self._buf_x[:n], self._buf_v[:n])
            self.ensemble = ens
        n_p = ens.N_p
        _sort_kernel(ens.x, self.cgrid.L, self.cgrid.n_cells, self._counts,
                     self._start, self._fill, self._order[:n_p])
        self.collision_total += _collide_kernel(
            ens.v, self._counts, self._start, self._order[:n_p],
            self.cgrid.v_max, self.cgrid.carry, self._coeff, self.stream.rng)
        self.steps_taken += 1

    def run(self, n_steps: int):
        for _ in range(n_steps):
            self.step()

    def settle(self, n_steps: int):
        """Relaxation phase; particle dynamics carry their own noise, so this
        is ordinary evolution (same meaning as the grid driver's settle)."""
        self.run(n_steps)

    def field(self) -> CellField:
        return sample_hydro(self.ensemble, self.grid, self.gas)
