"""Stochastic stress and heat-flux samples at cell faces.

The discrete face samples are

    s = sqrt( 4 k_B (eta_{j+1} T_{j+1} + eta_j T_j) / (3 dt V_c) ) * N(0,1)
    q = sqrt(   k_B (kappa_{j+1} T_{j+1}^2 + kappa_j T_j^2) / (dt V_c) ) * N(0,1)

so that at a uniform state Var(s) = 8 k_B eta T/(3 dt V_c) and
Var(q) = 2 k_B kappa T^2/(dt V_c). Multi-stage schemes average stage fluxes,
halving the noise variance; `amplify` applies the compensating sqrt(2).
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from numba import njit

from .gas import KB

SQRT2 = np.sqrt(2.0)


class NoiseStream:
    """Seeded source of standard Gaussian variates (PCG64).

    One stream per simulation instance; ensemble members use disjoint seeds.
    The underlying Generator is exposed as `rng` for consumers that also need
    uniforms (DSMC collisions) so a run has exactly one random state.
    """

    def __init__(self, seed: int):
        self.seed = int(seed)
        self.rng = np.random.default_rng(self.seed)

    def standard_normal(self, shape=None):
        if shape is None:
            return self.rng.standard_normal()
        return self.rng.standard_normal(shape)

    def spawn(self, offset: int) -> "NoiseStream":
        """Independent stream for ensemble member `offset` (seed = base + offset)."""
        return NoiseStream(self.seed + int(offset))


@dataclass(frozen=True)
class StochFaceFlux:
    """Stochastic stress/heat samples at one face (or an array of faces)."""

    s: object
    q: object
    amplified: bool = False


@njit(cache=True)
def stress_amplitude(T_j, T_jp1, eta_j, eta_jp1, dt, V_c, k_B):
    return np.sqrt(4.0 * k_B * (eta_jp1 * T_jp1 + eta_j * T_j) / (3.0 * dt * V_c))


@njit(cache=True)
def heat_amplitude(T_j, T_jp1, kappa_j, kappa_jp1, dt, V_c, k_B):
    return np.sqrt(k_B * (kappa_jp1 * T_jp1 * T_jp1 + kappa_j * T_j * T_j) / (dt * V_c))


def _check_positive(**kwargs):
    for name, value in kwargs.items():
        if np.any(np.asarray(value) <= 0.0):
            raise ValueError(f"{name} must be positive, got {value}")


def sample_stress_face(T_j, T_jp1, eta_j, eta_jp1, dt, V_c, stream: NoiseStream,
                       k_B: float = KB):
    """Draw stochastic stress sample(s); one fresh variate per face."""
    _check_positive(T_j=T_j, T_jp1=T_jp1, eta_j=eta_j, eta_jp1=eta_jp1, dt=dt, V_c=V_c)
    coeff = stress_amplitude(np.asarray(T_j, dtype=np.float64),
                             np.asarray(T_jp1, dtype=np.float64),
                             np.asarray(eta_j, dtype=np.float64),
                             np.asarray(eta_jp1, dtype=np.float64),
                             float(dt), float(V_c), float(k_B))
    draw = stream.standard_normal(np.shape(coeff) if np.ndim(coeff) else None)
    return coeff * draw


def sample_heat_face(T_j, T_jp1, kappa_j, kappa_jp1, dt, V_c, stream: NoiseStream,
                     k_B: float = KB):
    """Draw stochastic heat-flux sample(s); one fresh variate per face."""
    _check_positive(T_j=T_j, T_jp1=T_jp1, kappa_j=kappa_j, kappa_jp1=kappa_jp1,
                    dt=dt, V_c=V_c)
    coeff = heat_amplitude(np.asarray(T_j, dtype=np.float64),
                           np.asarray(T_jp1, dtype=np.float64),
                           np.asarray(kappa_j, dtype=np.float64),
                           np.asarray(kappa_jp1, dtype=np.float64),
                           float(dt), float(V_c), float(k_B))
    draw = stream.standard_normal(np.shape(coeff) if np.ndim(coeff) else None)
    return coeff * draw


def assemble_stochastic_flux(s, q, u_face):
    """Flux vector (0, s, q + u_face*s); mass component is identically zero."""
    s = np.asarray(s, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    u_face = np.asarray(u_face, dtype=np.float64)
    zero = np.zeros(np.broadcast(s, q, u_face).shape)
    return np.stack([zero, s + zero, q + u_face * s])


def amplify(flux: StochFaceFlux) -> StochFaceFlux:
    """Apply the sqrt(2) multi-stage compensation factor exactly once."""
    if flux.amplified:
        raise ValueError("stochastic flux already amplified")
    return replace(flux, s=SQRT2 * np.asarray(flux.s), q=SQRT2 * np.asarray(flux.q),
                   amplified=True)
