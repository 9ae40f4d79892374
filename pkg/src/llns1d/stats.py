"""Online fluctuation statistics and their closed-form equilibrium references.

The accumulator makes one pass per sample, keeping baseline-shifted sums so
variances of small fluctuations around a large mean do not lose precision to
cancellation.  Theory values follow the dilute-gas equilibrium expressions:
number fluctuations are Poisson, so the relative variances are
Delta_rho = Delta_u = 1/N_c and Delta_T = 2/(3 N_c), with an extra
(1 - 1/M_c) on diagonal variances because the totals are conserved on a
finite periodic domain.
"""
from dataclasses import dataclass

import numpy as np
from numba import njit

from llns1d.gas import CellField, GasSpec, GridSpec

# row layout of the running-sum block (baseline-shifted samples d*)
_N_ROWS = 14
_R_DRHO, _R_DJ, _R_DE, _R_DU, _R_DT = 0, 1, 2, 3, 4
_R_DRHO2, _R_DJ2, _R_DE2, _R_DU2, _R_DT2 = 5, 6, 7, 8, 9
_R_RHO_C, _R_J_C, _R_E_C, _R_RHOJ_C = 10, 11, 12, 13


@njit(cache=True)
def _accumulate_kernel(U, c_v, base, sums, center, weights):
    """Add one sample to the running sums; returns the sine-mode amplitude."""
    M = U.shape[1]
    rho_c = U[0, center]
    J_c = U[1, center]
    E_c = U[2, center]
    dr_c = rho_c - base[0, center]
    dj_c = J_c - base[1, center]
    de_c = E_c - base[2, center]
    R = 0.0
    for j in range(M):
        rho = U[0, j]
        J = U[1, j]
        E = U[2, j]
        u = J / rho
        T = (E - 0.5 * J * u) / (c_v * rho)
        dr = rho - base[0, j]
        dj = J - base[1, j]
        de = E - base[2, j]
        du = u - base[3, j]
        dT = T - base[4, j]
        sums[_R_DRHO, j] += dr
        sums[_R_DJ, j] += dj
        sums[_R_DE, j] += de
        sums[_R_DU, j] += du
        sums[_R_DT, j] += dT
        sums[_R_DRHO2, j] += dr * dr
        sums[_R_DJ2, j] += dj * dj
        sums[_R_DE2, j] += de * de
        sums[_R_DU2, j] += du * du
        sums[_R_DT2, j] += dT * dT
        sums[_R_RHO_C, j] += dr * dr_c
        sums[_R_J_C, j] += dj * dj_c
        sums[_R_E_C, j] += de * de_c
        sums[_R_RHOJ_C, j] += dr * dj_c
        # the sine weights annihilate any constant, so projecting dr instead
        # of rho is exact and avoids cancellation against the large mean
        R += dr * weights[j]
    return R


class StatsAccumulator:
    """Running equilibrium statistics over a stream of CellField samples.

    Keeps per-cell means and variances of (rho, J, E, u, T), cross products
    against a fixed center cell, and the history of the sine-mode amplitude
    R(t) used for density time correlations.  Accumulators built with the
    same grid, gas, and reference state can be merged associatively.
    """

    def __init__(self, grid: GridSpec, gas: GasSpec, rho_ref: float,
                 T_ref: float, u_ref: float = 0.0, center: int = None,
                 mode_n: int = 1):
        M = grid.M_c
        self.grid = grid
        self.gas = gas
        self.center = M // 2 if center is None else int(center)
        if not 0 <= self.center < M:
            raise ValueError(f"center cell {self.center} outside grid")
        self.mode_n = int(mode_n)
        self.count = 0
        self.sums = np.zeros((_N_ROWS, M))
        # uniform baseline from the reference state keeps sums well scaled
        J_ref = rho_ref * u_ref
        E_ref = gas.c_v * rho_ref * T_ref + 0.5 * rho_ref * u_ref * u_ref
        self.base = np.empty((5, M))
        self.base[0] = rho_ref
        self.base[1] = J_ref
        self.base[2] = E_ref
        self.base[3] = u_ref
        self.base[4] = T_ref
        x = grid.cell_centers()
        self.weights = np.sin(2.0 * np.pi * self.mode_n * x / grid.L) / M
        self.r_segments = [[]]

    def accumulate(self, field: CellField) -> None:
        if field.grid.M_c != self.grid.M_c:
            raise ValueError("field grid does not match accumulator grid")
        R = _accumulate_kernel(field.U, self.gas.c_v, self.base, self.sums,
                               self.center, self.weights)
        self.r_segments[-1].append(R)
        self.count += 1

    # -- results ----------------------------------------------------------

    def _require_samples(self):
        if self.count == 0:
            raise ValueError("no samples accumulated")

    def mean(self, name: str) -> np.ndarray:
        self._require_samples()
        row = {"rho": _R_DRHO, "J": _R_DJ, "E": _R_DE,
               "u": _R_DU, "T": _R_DT}[name]
        return self.base[row] + self.sums[row] / self.count

    def variance(self, name: str) -> np.ndarray:
        """Population variance per cell."""
        self._require_samples()
        lin, quad = {"rho": (_R_DRHO, _R_DRHO2), "J": (_R_DJ, _R_DJ2),
                     "E": (_R_DE, _R_DE2), "u": (_R_DU, _R_DU2),
                     "T": (_R_DT, _R_DT2)}[name]
        m = self.sums[lin] / self.count
        return self.sums[quad] / self.count - m * m

    def center_covariance(self, name: str) -> np.ndarray:
        """Cov(x_j, x_center) for x in {rho, J, E}, or Cov(rho_j, J_center)."""
        self._require_samples()
        cross, lin_j, lin_c = {
            "rho": (_R_RHO_C, _R_DRHO, _R_DRHO),
            "J": (_R_J_C, _R_DJ, _R_DJ),
            "E": (_R_E_C, _R_DE, _R_DE),
            "rhoJ": (_R_RHOJ_C, _R_DRHO, _R_DJ),
        }[name]
        mj = self.sums[lin_j] / self.count
        mc = self.sums[lin_c, self.center] / self.count
        return self.sums[cross] / self.count - mj * mc

    def r_history(self) -> np.ndarray:
        """All recorded R(t) values, one array per contiguous segment."""
        return [np.asarray(seg) for seg in self.r_segments if len(seg)]

    def time_correlation(self, lags) -> np.ndarray:
        segments = self.r_history()
        if not segments:
            raise ValueError("no samples accumulated")
        return correlate_segments(segments, lags)

    # -- merging ----------------------------------------------------------

    def merge(self, other: "StatsAccumulator") -> "StatsAccumulator":
        """Fold another accumulator into this one (associative)."""
        if (other.grid.M_c != self.grid.M_c or other.center != self.center
                or other.mode_n != self.mode_n):
            raise ValueError("accumulators were configured differently")
        if not np.array_equal(other.base, self.base):
            raise ValueError("accumulators use different reference baselines")
        self.count += other.count
        self.sums += other.sums
        self.r_segments = ([seg for seg in self.r_segments if len(seg)]
                           + [list(seg) for seg in other.r_segments
                              if len(seg)])
        if not self.r_segments:
            self.r_segments = [[]]
        return self


# ---------------------------------------------------------------------------
# time correlations


def correlate_segments(segments, lags) -> np.ndarray:
    """Normalized autocovariance of R(t) at the given integer lags,
    averaging products within each contiguous segment only."""
    lags = np.atleast_1d(np.asarray(lags, dtype=np.int64))
    if np.any(lags < 0):
        raise ValueError("lags must be nonnegative")
    max_lag = int(lags.max()) if lags.size else 0
    usable = [np.asarray(s, dtype=np.float64) for s in segments
              if len(s) > max_lag]
    if not usable:
        raise ValueError(f"no segment longer than max lag {max_lag}")
    allv = np.concatenate(usable)
    mean = allv.mean()
    cov = np.zeros(lags.shape)
    npairs = np.zeros(lags.shape)
    for s in usable:
        d = s - mean
        for i, ell in enumerate(lags):
            n = d.size - ell
            cov[i] += d[:n] @ d[ell:]
            npairs[i] += n
    cov /= npairs
    c0 = np.mean((allv - mean) ** 2)
    # spread below a few ulps of the values is pure roundoff, not signal
    floor = (8.0 * np.finfo(np.float64).eps * np.max(np.abs(allv))) ** 2
    if not c0 > floor:
        raise ValueError("degenerate history: R(t) has no variance")
    return cov / c0


def time_correlation_estimate(rho_history, grid: GridSpec, n: int,
                              lags) -> np.ndarray:
    """Normalized density time correlation from a (samples, M_c) history.

    Projects each sample onto R(t) = (1/M_c) sum_i rho_i sin(2 pi n x_i / L)
    and returns <dR(t) dR(t+lag)> / <dR^2> at each requested lag.
    """
    rho_history = np.asarray(rho_history, dtype=np.float64)
    if rho_history.ndim != 2 or rho_history.shape[1] != grid.M_c:
        raise ValueError("history must have shape (n_samples, M_c)")
    x = grid.cell_centers()
    weights = np.sin(2.0 * np.pi * n * x / grid.L) / grid.M_c
    # project fluctuations, not raw densities: the constant part is
    # annihilated by the weights analytically but would otherwise dominate
    # the floating-point cancellation budget
    R = (rho_history - rho_history.mean(axis=0)) @ weights
    return correlate_segments([R], lags)


# ---------------------------------------------------------------------------
# closed-form references


@dataclass(frozen=True)
class EquilibriumTheory:
    """Dilute-gas cell-variance parameters at a uniform mean state."""

    rho_bar: float
    T_bar: float
    J_bar: float
    E_bar: float
    N_c: float           # mean particles per cell
    C_T: float           # thermal speed sqrt(k_B T / m)
    delta_rho: float     # <drho^2>/rho^2
    delta_u: float       # <du^2>/C_T^2
    delta_T: float       # <dT^2>/T^2
    M_c: int

    @classmethod
    def dilute(cls, gas: GasSpec, grid: GridSpec, rho_bar: float,
               T_bar: float, u_bar: float = 0.0) -> "EquilibriumTheory":
        N_c = rho_bar * grid.V_c / gas.m
        inv = 1.0 / N_c
        return cls(rho_bar=rho_bar, T_bar=T_bar,
                   J_bar=rho_bar * u_bar,
                   E_bar=gas.c_v * rho_bar * T_bar
                   + 0.5 * rho_bar * u_bar * u_bar,
                   N_c=N_c,
                   C_T=np.sqrt(gas.k_B * T_bar / gas.m),
                   delta_rho=inv, delta_u=inv,
                   delta_T=2.0 * inv / 3.0,
                   M_c=grid.M_c)


def theory_variances(gas: GasSpec, grid: GridSpec, rho_bar: float,
                     T_bar: float, u_bar: float = 0.0) -> np.ndarray:
    """Equilibrium cell variances (<drho^2>, <dJ^2>, <dE^2>) including the
    (1 - 1/M_c) conserved-quantity finite-size factor."""
    th = EquilibriumTheory.dilute(gas, grid, rho_bar, T_bar, u_bar)
    var_rho = th.rho_bar**2 * th.delta_rho
    var_J = th.J_bar**2 * th.delta_rho \
        + th.rho_bar**2 * th.C_T**2 * th.delta_u
    var_E = th.E_bar**2 * th.delta_rho \
        + th.J_bar**2 * th.C_T**2 * th.delta_u \
        + gas.c_v**2 * th.rho_bar**2 * th.T_bar**2 * th.delta_T
    finite = 1.0 - 1.0 / th.M_c
    return finite * np.array([var_rho, var_J, var_E])


def theory_covariances(gas: GasSpec, grid: GridSpec, rho_bar: float,
                       T_bar: float, u_bar: float = 0.0) -> dict:
    """Equilibrium same-cell covariances of the conserved variables."""
    th = EquilibriumTheory.dilute(gas, grid, rho_bar, T_bar, u_bar)
    cu2 = th.C_T**2 * th.delta_u
    return {
        "rho_J": th.rho_bar * th.J_bar * th.delta_rho,
        "rho_E": th.rho_bar * th.E_bar * th.delta_rho,
        "J_E": th.J_bar * th.E_bar * th.delta_rho + th.J_bar * th.rho_bar * cu2,
    }


def theory_offdiagonal(variance: float, M_c: int):
    """Spatial correlation entries for a conserved variable on a periodic
    finite domain: (diagonal, off-diagonal) = ((1-1/M)v, -v/M)."""
    if M_c < 2:
        raise ValueError("need at least two cells")
    return (1.0 - 1.0 / M_c) * variance, -variance / M_c


@dataclass(frozen=True)
class TimeCorrTheory:
    """Coefficients of the hydrodynamic density time-correlation function."""

    w: float         # wavenumber 2 pi n / L
    D_T: float       # thermal diffusivity kappa / (rho c_v)
    D_v: float       # longitudinal kinematic viscosity (4/3) eta / rho
    Gamma: float     # sound attenuation (D_v + (gamma-1) D_T) / 2
    c_s: float
    gamma: float

    @classmethod
    def from_state(cls, gas: GasSpec, grid: GridSpec, rho_bar: float,
                   T_bar: float, n: int = 1) -> "TimeCorrTheory":
        eta = gas.eta0 * np.sqrt(T_bar)
        kappa = gas.kappa0 * np.sqrt(T_bar)
        D_T = kappa / (rho_bar * gas.c_v)
        D_v = (4.0 / 3.0) * eta / rho_bar
        return cls(w=2.0 * np.pi * n / grid.L,
                   D_T=D_T, D_v=D_v,
                   Gamma=0.5 * (D_v + (gas.gamma - 1.0) * D_T),
                   c_s=np.sqrt(gas.gamma * gas.R * T_bar),
                   gamma=gas.gamma)


def theory_time_correlation(tau, theory: TimeCorrTheory):
    """Normalized density autocorrelation at lag tau: a slow heat-mode decay
    plus an attenuated acoustic oscillation."""
    tau = np.asarray(tau, dtype=np.float64)
    w, g = theory.w, theory.gamma
    heat = (1.0 - 1.0 / g) * np.exp(-w * w * theory.D_T * tau)
    env = np.exp(-w * w * theory.Gamma * tau)
    sound = env * np.cos(theory.c_s * w * tau) / g
    skew = (3.0 * theory.Gamma - theory.D_v) / (g * g * theory.c_s) * w \
        * env * np.sin(theory.c_s * w * tau)
    return heat + sound + skew


# ---------------------------------------------------------------------------
# shock tracking


def shock_location_from_values(values, L: float, left: float,
                               right: float) -> float:
    """Signed displacement of a step profile from the domain midpoint,
    inferred from the domain mean of a piecewise-constant-like profile."""
    if left == right:
        raise ValueError("left and right levels must differ")
    mean = float(np.mean(values))
    return L * (mean - 0.5 * (left + right)) / (left - right)


def shock_location(field: CellField, rho_L: float, rho_R: float) -> float:
    return shock_location_from_values(field.rho, field.grid.L, rho_L, rho_R)


def shock_location_pressure(field: CellField, gas: GasSpec, P_L: float,
                            P_R: float) -> float:
    rho = field.U[0]
    u = field.U[1] / rho
    e_int = field.U[2] - 0.5 * field.U[1] * u
    P = (gas.gamma - 1.0) * e_int
    return shock_location_from_values(P, field.grid.L, P_L, P_R)


def fit_diffusion_line(times, variances, window=None) -> float:
    """Half the least-squares slope of variance versus time."""
    times = np.asarray(times, dtype=np.float64)
    variances = np.asarray(variances, dtype=np.float64)
    if window is not None:
        lo, hi = window
        mask = (times >= lo) & (times <= hi)
        if mask.sum() < 2:
            raise ValueError("fit window selects fewer than two points")
        times, variances = times[mask], variances[mask]
    slope = np.polyfit(times, variances, 1)[0]
    return 0.5 * slope


def shock_diffusion_fit(times, sigma_traces, window=None) -> float:
    """Effective diffusion coefficient of the shock-location random walk.

    sigma_traces has shape (n_members, n_times); the ensemble variance of
    the location grows as 2 D t for a diffusive wander.
    """
    traces = np.asarray(sigma_traces, dtype=np.float64)
    if traces.ndim != 2 or traces.shape[0] < 2:
        raise ValueError("need at least two ensemble members")
    var = traces.var(axis=0)
    return fit_diffusion_line(times, var, window)
