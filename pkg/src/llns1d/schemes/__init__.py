"""Interchangeable one-step operators on a CellField.

All three schemes share the discrete stochastic flux model (amplified by
sqrt(2) to undo the variance halving of their multi-stage averaging), the
centered diffusive face fluxes, and the ghost-cell boundary machinery.
"""
import numpy as np

from llns1d.boundaries import (
    ALPHA1,
    ALPHA2,
    BoundaryCondition,
    end_code,
    end_params,
    pad_field,
)
from llns1d.errors import CflError, SolverError, StepFailure
from llns1d.gas import CellField, GasSpec, max_stable_dt, primitive_arrays
from llns1d.kinds import SchemeKind
from llns1d.noise import SQRT2, NoiseStream
from llns1d.riemann import riemann_solve
from llns1d.schemes.characteristic import (
    CharacteristicDecomposition,
    ParabolicProfile,
    characteristic_decomposition,
    ppm_edge_interpolate,
    ppm_time_centered_edges,
)
from llns1d.schemes.common import CFL_FAIL, NG, OK, VACUUM_FAIL
from llns1d.schemes.maccormack import maccormack_kernel
from llns1d.schemes.ppm import ppm_kernel
from llns1d.schemes.rk3 import (
    RK3_WEIGHTS,
    rk3_advance,
    rk3_combined,
    rk3_face_interpolate,
    rk3_kernel,
    rk3_stage_composition,
)

__all__ = [
    "ALPHA1", "ALPHA2", "CharacteristicDecomposition", "ParabolicProfile",
    "RK3_WEIGHTS", "SchemeKind", "characteristic_decomposition",
    "diffusive_flux_face", "maccormack_step", "ppm_edge_interpolate",
    "ppm_step", "ppm_time_centered_edges", "riemann_solve", "rk3_advance",
    "rk3_combined", "rk3_face_interpolate", "rk3_stage_composition",
    "rk3_step", "step_function",
]


def diffusive_flux_face(field: CellField, j_face: int,
                        gas: GasSpec) -> np.ndarray:
    """Diffusive flux at the interior face between cells j_face-1 and j_face.

    Second-order centered differences with arithmetic face averages of the
    transport coefficients and velocity.
    """
    M = field.grid.M_c
    if not 1 <= j_face <= M - 1:
        raise IndexError(f"face {j_face} does not have two interior neighbors")
    rho, u, T, P = primitive_arrays(field, gas)
    a, b = j_face - 1, j_face
    dx = field.grid.dx
    u_x = (u[b] - u[a]) / dx
    T_x = (T[b] - T[a]) / dx
    eta_f = 0.5 * gas.eta0 * (np.sqrt(T[a]) + np.sqrt(T[b]))
    kappa_f = 0.5 * gas.kappa0 * (np.sqrt(T[a]) + np.sqrt(T[b]))
    u_f = 0.5 * (u[a] + u[b])
    return np.array([0.0,
                     (4.0 / 3.0) * eta_f * u_x,
                     (4.0 / 3.0) * eta_f * u_f * u_x + kappa_f * T_x])


_IDLE_RNG = np.random.default_rng(0)


def _prepare(field, dt, bc, streams, gas):
    if not dt > 0.0:
        raise ValueError(f"dt must be positive, got {dt}")
    limit = max_stable_dt(field, gas)
    if dt > limit:
        raise ValueError(f"dt={dt:g} exceeds the stability bound {limit:g}")
    if not isinstance(bc, BoundaryCondition):
        raise TypeError(f"not a BoundaryCondition: {bc!r}")
    Up = pad_field(field)
    if streams is None:
        noise_amp, rng = 0.0, _IDLE_RNG
    else:
        noise_amp, rng = SQRT2, streams.rng
    return (Up, end_code(bc.left), end_code(bc.right),
            end_params(bc.left, gas), end_params(bc.right, gas),
            noise_amp, rng)


def _finish(field, Up, status):
    M = field.grid.M_c
    if status == OK:
        return CellField(field.grid, Up[:, NG:NG + M].copy())
    if status == CFL_FAIL:
        raise CflError("a characteristic crossed a full cell; reduce dt")
    if status == VACUUM_FAIL:
        raise SolverError("vacuum formation in a face Riemann problem")
    cell = min(max(status - NG, 0), M - 1)
    raise StepFailure(f"unphysical state in cell {cell}", cell=cell)


def maccormack_step(field: CellField, dt: float, bc: BoundaryCondition,
                    streams: NoiseStream | None,
                    gas: GasSpec) -> CellField:
    Up, code_l, code_r, par_l, par_r, amp, rng = _prepare(
        field, dt, bc, streams, gas)
    status = maccormack_kernel(Up, dt, field.grid.dx, gas.R, gas.c_v,
                               gas.eta0, gas.kappa0, gas.k_B, field.grid.V_c,
                               amp, code_l, code_r, par_l, par_r, rng)
    return _finish(field, Up, status)


def ppm_step(field: CellField, dt: float, bc: BoundaryCondition,
             streams: NoiseStream | None, gas: GasSpec) -> CellField:
    Up, code_l, code_r, par_l, par_r, amp, rng = _prepare(
        field, dt, bc, streams, gas)
    status = ppm_kernel(Up, dt, field.grid.dx, gas.gamma, gas.R, gas.c_v,
                        gas.eta0, gas.kappa0, gas.k_B, field.grid.V_c,
                        amp, code_l, code_r, par_l, par_r, rng)
    return _finish(field, Up, status)


def rk3_step(field: CellField, dt: float, bc: BoundaryCondition,
             streams: NoiseStream | None, gas: GasSpec) -> CellField:
    Up, code_l, code_r, par_l, par_r, amp, rng = _prepare(
        field, dt, bc, streams, gas)
    status = rk3_kernel(Up, dt, field.grid.dx, gas.gamma, gas.R, gas.c_v,
                        gas.eta0, gas.kappa0, gas.k_B, field.grid.V_c,
                        amp, code_l, code_r, par_l, par_r, rng)
    return _finish(field, Up, status)


_STEPS = {
    SchemeKind.MACCORMACK: maccormack_step,
    SchemeKind.PPM: ppm_step,
    SchemeKind.RK3: rk3_step,
}


def step_function(kind):
    return _STEPS[SchemeKind.parse(kind)]
