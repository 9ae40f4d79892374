"""Characteristic decomposition and parabolic reconstruction pieces.

The quasilinear form in primitive variables V = (rho, u, P) is

    V_t + A V_x = 0,   A = [[u, rho, 0], [0, u, 1/rho], [0, gamma P, u]],

with wavespeeds (u - c, u, u + c).  Left eigenvector rows and their inverse
are closed-form; reconstruction interpolates the projected (characteristic)
variables to cell edges with the fourth-order weights 7/12 and 1/12, builds a
parabola per cell, and traces each wave back over its domain of dependence.
"""
from dataclasses import dataclass

import numpy as np

from llns1d.errors import CflError
from llns1d.gas import GasSpec, PrimitiveState


@dataclass(frozen=True)
class CharacteristicDecomposition:
    A: np.ndarray            # (3,3) primitive-variable flux Jacobian
    Lmat: np.ndarray         # (3,3) rows are left eigenvectors
    wavespeeds: np.ndarray   # (u-c, u, u+c)

    def right_matrix(self) -> np.ndarray:
        return np.linalg.inv(self.Lmat)

    def project(self, V: np.ndarray) -> np.ndarray:
        """Primitive vector(s) -> characteristic variables (Lmat @ V)."""
        return self.Lmat @ V

    def lift(self, W: np.ndarray) -> np.ndarray:
        """Characteristic variables -> primitive vector(s)."""
        return self.right_matrix() @ W


def characteristic_decomposition(v: PrimitiveState,
                                 gas: GasSpec) -> CharacteristicDecomposition:
    rho, u, P = v.rho, v.u, v.P
    if not (rho > 0 and P > 0):
        raise ValueError(f"cannot decompose unphysical state {v}")
    c = np.sqrt(gas.gamma * P / rho)
    A = np.array([[u, rho, 0.0],
                  [0.0, u, 1.0 / rho],
                  [0.0, gas.gamma * P, u]])
    Lmat = np.array([[0.0, -0.5 * rho * c, 0.5],
                     [1.0, 0.0, -1.0 / (c * c)],
                     [0.0, 0.5 * rho * c, 0.5]])
    speeds = np.array([u - c, u, u + c])
    return CharacteristicDecomposition(A=A, Lmat=Lmat, wavespeeds=speeds)


@dataclass(frozen=True)
class ParabolicProfile:
    """Per-cell parabola w(theta) = w_minus + theta*delta_w + theta(1-theta)*w6
    on theta in [0, 1]; fields may be scalars or aligned arrays."""

    w_minus: np.ndarray
    w_plus: np.ndarray
    delta_w: np.ndarray
    w6: np.ndarray

    @classmethod
    def from_edges(cls, w_minus, w_cell, w_plus):
        w_minus = np.asarray(w_minus, dtype=np.float64)
        w_plus = np.asarray(w_plus, dtype=np.float64)
        w_cell = np.asarray(w_cell, dtype=np.float64)
        return cls(w_minus=w_minus, w_plus=w_plus,
                   delta_w=w_plus - w_minus,
                   w6=6.0 * (w_cell - 0.5 * (w_plus + w_minus)))

    def value(self, theta):
        theta = np.asarray(theta, dtype=np.float64)
        return self.w_minus + theta * self.delta_w \
            + theta * (1.0 - theta) * self.w6

    def cell_average(self):
        return self.w_minus + 0.5 * self.delta_w + self.w6 / 6.0


def ppm_edge_interpolate(w: np.ndarray):
    """Fourth-order edge values for the cells of `w` that have two neighbors
    on each side: returns (w_minus, w_plus), each of length len(w) - 4."""
    w = np.asarray(w, dtype=np.float64)
    if w.shape[-1] < 5:
        raise ValueError("need at least two ghost values on each side")
    wm2 = w[..., :-4]
    wm1 = w[..., 1:-3]
    w0 = w[..., 2:-2]
    wp1 = w[..., 3:-1]
    wp2 = w[..., 4:]
    w_minus = (7.0 / 12.0) * (w0 + wm1) - (1.0 / 12.0) * (wp1 + wm2)
    w_plus = (7.0 / 12.0) * (w0 + wp1) - (1.0 / 12.0) * (wm1 + wp2)
    return w_minus, w_plus


def ppm_time_centered_edges(profile: ParabolicProfile, wavespeeds, dt, dx):
    """Average each parabola over its wave's domain of dependence.

    The upwind-side edge of each characteristic is replaced by the mean of the
    profile over a depth nu = lambda*dt/dx; the downwind edge passes through.
    """
    nu = np.asarray(wavespeeds, dtype=np.float64) * (dt / dx)
    if np.any(np.abs(nu) > 1.0):
        raise CflError(f"wave crosses a full cell: max |nu| = "
                       f"{np.max(np.abs(nu)):.3f}")
    wm = np.array(profile.w_minus, dtype=np.float64, copy=True)
    wp = np.array(profile.w_plus, dtype=np.float64, copy=True)
    dwv = np.asarray(profile.delta_w, dtype=np.float64)
    w6 = np.asarray(profile.w6, dtype=np.float64)

    pos = nu > 0.0
    neg = nu < 0.0
    wp = np.where(pos,
                  wp - 0.5 * nu * (dwv - (1.0 - (2.0 / 3.0) * nu) * w6),
                  wp)
    mu = -nu
    wm = np.where(neg,
                  wm + 0.5 * mu * (dwv + (1.0 - (2.0 / 3.0) * mu) * w6),
                  wm)
    return wm, wp
