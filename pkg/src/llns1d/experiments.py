"""Experiment drivers: build simulations from configs, run seeded ensembles,
and write CSV statistics.

Five experiment kinds are supported: periodic equilibrium, walled
equilibrium, density time correlation, wall-driven temperature gradient,
and the standing-shock ensemble.  Both engines (grid solver and particle
simulator) run behind the same driver interface, so every experiment can be
cross-checked molecule-against-continuum.
"""
import math
import os
import subprocess
from dataclasses import dataclass
from typing import Optional

import numpy as np

from llns1d.boundaries import BoundaryCondition
from llns1d.config import ExperimentConfig, serialize_config
from llns1d.dsmc import DsmcSimulation, ensemble_from_profile, \
    maxwellian_ensemble
from llns1d.errors import CflError, SolverError, StepFailure
from llns1d.gas import CellField, GasSpec, GridSpec, field_from_primitive_arrays, \
    max_stable_dt, primitive, uniform_field
from llns1d.kinds import SchemeKind
from llns1d.noise import NoiseStream
from llns1d.schemes import step_function
from llns1d.stats import (
    StatsAccumulator,
    TimeCorrTheory,
    shock_diffusion_fit,
    shock_location,
    shock_location_pressure,
    theory_offdiagonal,
    theory_time_correlation,
    theory_variances,
)


# ---------------------------------------------------------------------------
# standing-shock jump conditions


@dataclass(frozen=True)
class RankineHugoniotSetup:
    """Left/right states of a stationary normal shock at Mach Ma.

    The right state is the supersonic inflow moving in -x; the left state
    is the compressed subsonic outflow.
    """

    rho_R: float
    u_R: float
    T_R: float
    rho_L: float
    u_L: float
    T_L: float
    Ma: float

    @classmethod
    def from_mach(cls, gas: GasSpec, rho_R: float, T_R: float,
                  Ma: float) -> "RankineHugoniotSetup":
        rho_L, u_L, T_L, u_R = rankine_hugoniot_left_state(
            rho_R, T_R, Ma, gas)
        return cls(rho_R=rho_R, u_R=u_R, T_R=T_R,
                   rho_L=rho_L, u_L=u_L, T_L=T_L, Ma=Ma)

    def residuals(self, gas: GasSpec) -> np.ndarray:
        """Relative mismatch of the mass, momentum, and energy fluxes."""
        P_R = self.rho_R * gas.R * self.T_R
        P_L = self.rho_L * gas.R * self.T_L
        E_R = gas.c_v * self.rho_R * self.T_R \
            + 0.5 * self.rho_R * self.u_R**2
        E_L = gas.c_v * self.rho_L * self.T_L \
            + 0.5 * self.rho_L * self.u_L**2
        mass = (self.rho_L * self.u_L, self.rho_R * self.u_R)
        mom = (self.rho_L * self.u_L**2 + P_L,
               self.rho_R * self.u_R**2 + P_R)
        en = ((E_L + P_L) * self.u_L, (E_R + P_R) * self.u_R)
        return np.array([abs(a - b) / max(abs(a), abs(b))
                         for a, b in (mass, mom, en)])


def rankine_hugoniot_left_state(rho_R: float, T_R: float, Ma: float,
                                gas: GasSpec):
    """Stationary-shock left state for a given right state and Mach number.

    Returns (rho_L, u_L, T_L, u_R) with u_R = -Ma c_s(T_R), so the
    unperturbed shock does not move.
    """
    if not Ma > 1:
        raise ValueError("shock Mach number must exceed 1")
    g = gas.gamma
    c_s = math.sqrt(g * gas.R * T_R)
    u_R = -Ma * c_s
    m2 = Ma * Ma
    density_ratio = (g + 1.0) * m2 / ((g - 1.0) * m2 + 2.0)
    pressure_ratio = (2.0 * g * m2 - (g - 1.0)) / (g + 1.0)
    rho_L = rho_R * density_ratio
    u_L = u_R / density_ratio
    T_L = T_R * pressure_ratio / density_ratio
    return rho_L, u_L, T_L, u_R


# ---------------------------------------------------------------------------
# engine drivers


class PdeSimulation:
    """Grid-solver driver with the same step/field interface as DSMC."""

    def __init__(self, field: CellField, bc: BoundaryCondition, dt: float,
                 stream: NoiseStream, gas: GasSpec, scheme="rk3"):
        self.state = field
        self.bc = bc
        self.dt = dt
        self.stream = stream
        self.gas = gas
        self.step_fn = step_function(SchemeKind.parse(scheme))

    def step(self):
        self.state = self.step_fn(self.state, self.dt, self.bc,
                                  self.stream, self.gas)

    def run(self, n_steps: int):
        for _ in range(n_steps):
            self.step()

    def settle(self, n_steps: int):
        """Advance without stochastic forcing (deterministic relaxation)."""
        for _ in range(n_steps):
            self.state = self.step_fn(self.state, self.dt, self.bc,
                                      None, self.gas)

    def field(self) -> CellField:
        return self.state


def resolve_dt(cfg: ExperimentConfig, gas: GasSpec, grid: GridSpec) -> float:
    """Configured dt, or the stability bound scaled by the safety factor."""
    if cfg.dt > 0:
        return cfg.dt
    states = [(cfg.state_rho, cfg.state_T)]
    if cfg.kind == "shock":
        rho_L, _, T_L, _ = rankine_hugoniot_left_state(
            cfg.state_rho, cfg.state_T, cfg.mach, gas)
        states.append((rho_L, T_L))
    bound = min(max_stable_dt(uniform_field(grid, gas, rho, 0.0, T), gas)
                for rho, T in states)
    return cfg.dt_safety * bound


def _shock_profile(cfg, gas, grid, rh: RankineHugoniotSetup):
    M = grid.M_c
    left = np.arange(M) < M // 2
    rho = np.where(left, rh.rho_L, rh.rho_R)
    u = np.where(left, rh.u_L, rh.u_R)
    T = np.where(left, rh.T_L, rh.T_R)
    return rho, u, T


def build_member(cfg: ExperimentConfig, seed: int):
    """One simulation instance (either engine) for the configured kind."""
    gas = cfg.gas()
    grid = cfg.grid()
    dt = resolve_dt(cfg, gas, grid)
    stream = NoiseStream(seed)
    rh = None
    if cfg.kind == "shock":
        rh = RankineHugoniotSetup.from_mach(gas, cfg.state_rho, cfg.state_T,
                                            cfg.mach)
        left = primitive(rh.rho_L, rh.u_L, rh.T_L, gas)
        right = primitive(rh.rho_R, rh.u_R, rh.T_R, gas)
        bc = BoundaryCondition.reservoirs(left, right)
        rho, u, T = _shock_profile(cfg, gas, grid, rh)
        if cfg.engine == "pde":
            field = field_from_primitive_arrays(grid, gas, rho, u, T)
            sim = PdeSimulation(field, bc, dt, stream, gas, cfg.scheme)
        else:
            ens = ensemble_from_profile(grid, gas, rho, u, T, stream)
            sim = DsmcSimulation(ens, grid, gas, bc, dt, stream)
        return sim, rh
    if cfg.kind in ("equilibrium", "time_correlation"):
        bc = BoundaryCondition.periodic()
    else:  # equilibrium_walls, gradient
        bc = BoundaryCondition.walls(cfg.T_left, cfg.T_right)
    if cfg.engine == "pde":
        field = uniform_field(grid, gas, cfg.state_rho, cfg.state_u,
                              cfg.state_T)
        sim = PdeSimulation(field, bc, dt, stream, gas, cfg.scheme)
    else:
        ens = maxwellian_ensemble(grid, gas, cfg.state_rho, cfg.state_T,
                                  stream, u=cfg.state_u)
        sim = DsmcSimulation(ens, grid, gas, bc, dt, stream)
    return sim, rh


# ---------------------------------------------------------------------------
# running


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    gas: GasSpec
    grid: GridSpec
    dt: float
    acc: Optional[StatsAccumulator] = None
    member_accs: Optional[list] = None
    times: Optional[np.ndarray] = None
    traces_rho: Optional[np.ndarray] = None
    traces_P: Optional[np.ndarray] = None
    rh: Optional[RankineHugoniotSetup] = None
    paths: Optional[dict] = None

    def shock_diffusion(self, pressure=False):
        traces = self.traces_P if pressure else self.traces_rho
        t_end = self.times[-1]
        window = (self.config.fit_lo * t_end, self.config.fit_hi * t_end)
        return shock_diffusion_fit(self.times, traces, window=window)


def _run_stat_member(cfg, gas, grid, seed):
    sim, _ = build_member(cfg, seed)
    acc = StatsAccumulator(grid, gas, cfg.state_rho, cfg.state_T,
                           u_ref=cfg.state_u, mode_n=cfg.mode_n)
    step = 0
    try:
        for step in range(cfg.warmup):
            sim.step()
        for step in range(cfg.steps):
            sim.step()
            if (step + 1) % cfg.sample_every == 0:
                acc.accumulate(sim.field())
    except (StepFailure, SolverError, CflError) as exc:
        raise RuntimeError(
            f"seed {seed} failed at step {step}: {exc}") from exc
    return acc


def _run_shock_member(cfg, gas, grid, seed):
    sim, rh = build_member(cfg, seed)
    P_L = rh.rho_L * gas.R * rh.T_L
    P_R = rh.rho_R * gas.R * rh.T_R
    n_rec = cfg.steps // cfg.sample_every
    trace_rho = np.empty(n_rec)
    trace_P = np.empty(n_rec)
    step = 0
    try:
        # settle the discontinuous start into the formed viscous profile, so
        # every member enters the sampled phase from the same shock structure
        # (for particles there is no noise-free relaxation, just evolution)
        sim.settle(cfg.warmup)
        k = 0
        for step in range(cfg.steps):
            sim.step()
            if (step + 1) % cfg.sample_every == 0:
                f = sim.field()
                trace_rho[k] = shock_location(f, rh.rho_L, rh.rho_R)
                trace_P[k] = shock_location_pressure(f, gas, P_L, P_R)
                k += 1
    except (StepFailure, SolverError, CflError) as exc:
        raise RuntimeError(
            f"seed {seed} failed at step {step}: {exc}") from exc
    return trace_rho, trace_P, rh


def ensemble_run(cfg: ExperimentConfig) -> ExperimentResult:
    """Run cfg.ensemble members with seeds base+index and fold the results.

    Statistics merge associatively in member-index order, so the output is
    independent of how members would be scheduled.
    """
    cfg.validate()
    gas = cfg.gas()
    grid = cfg.grid()
    dt = resolve_dt(cfg, gas, grid)
    result = ExperimentResult(config=cfg, gas=gas, grid=grid, dt=dt)
    if cfg.kind == "shock":
        rows_rho, rows_P = [], []
        for i in range(cfg.ensemble):
            try:
                tr, tp, rh = _run_shock_member(cfg, gas, grid, cfg.seed + i)
            except RuntimeError as exc:
                raise RuntimeError(f"ensemble member {i}: {exc}") from exc
            rows_rho.append(tr)
            rows_P.append(tp)
            result.rh = rh
        result.traces_rho = np.array(rows_rho)
        result.traces_P = np.array(rows_P)
        result.times = cfg.sample_every * dt * np.arange(1, len(rows_rho[0]) + 1)
        return result
    members = []
    for i in range(cfg.ensemble):
        try:
            members.append(_run_stat_member(cfg, gas, grid, cfg.seed + i))
        except RuntimeError as exc:
            raise RuntimeError(f"ensemble member {i}: {exc}") from exc
    merged = StatsAccumulator(grid, gas, cfg.state_rho, cfg.state_T,
                              u_ref=cfg.state_u, mode_n=cfg.mode_n)
    for acc in members:
        merged.merge(acc)
    result.acc = merged
    result.member_accs = members
    return result


# ---------------------------------------------------------------------------
# output files


def _version_string() -> str:
    here = os.path.dirname(os.path.abspath(__file__))
    try:
        rev = subprocess.run(
            ["git", "-C", here, "rev-parse", "--short", "HEAD"],
            capture_output=True, text=True, timeout=10)
        if rev.returncode == 0:
            return rev.stdout.strip()
    except OSError:
        pass
    return "unversioned"


def _fmt(value) -> str:
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def _write_csv(path, comments, header, rows):
    lines = [f"# {c}" for c in comments]
    lines.append(",".join(header))
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def _config_comments(cfg):
    return ["config:"] + [f"  {line}"
                          for line in serialize_config(cfg).splitlines()]


def write_outputs(result: ExperimentResult, out_dir=None) -> dict:
    """Write the CSV statistics and manifest for a finished run."""
    cfg = result.config
    out_dir = cfg.output if out_dir is None else out_dir
    os.makedirs(out_dir, exist_ok=True)
    paths = {}
    comments = _config_comments(cfg)
    gas, grid = result.gas, result.grid
    manifest_extra = []
    if result.acc is not None:
        acc = result.acc
        x = grid.cell_centers()
        tv = theory_variances(gas, grid, cfg.state_rho, cfg.state_T,
                              cfg.state_u)
        rows = []
        names = ("rho", "J", "E", "u", "T")
        means = {n: acc.mean(n) for n in names}
        var = {n: acc.variance(n) for n in names}
        for j in range(grid.M_c):
            rows.append([j, x[j]] + [means[n][j] for n in names]
                        + [var[n][j] for n in names] + list(tv))
        header = (["cell", "x"] + [f"mean_{n}" for n in names]
                  + [f"var_{n}" for n in names]
                  + ["theory_var_rho", "theory_var_J", "theory_var_E"])
        paths["variances"] = os.path.join(out_dir, "variances.csv")
        _write_csv(paths["variances"], comments, header, rows)

        diag, off = theory_offdiagonal(tv[0], grid.M_c)
        rows = []
        for j in range(grid.M_c):
            rows.append([j, x[j],
                         acc.center_covariance("rho")[j],
                         acc.center_covariance("J")[j],
                         acc.center_covariance("E")[j],
                         acc.center_covariance("rhoJ")[j],
                         diag if j == acc.center else off])
        header = ["cell", "x", "cov_rho", "cov_J", "cov_E", "cov_rho_J",
                  "theory_cov_rho"]
        paths["spatial_corr"] = os.path.join(out_dir, "spatial_corr.csv")
        _write_csv(paths["spatial_corr"], comments, header, rows)

        if cfg.bc_kind == "periodic" or cfg.kind in ("equilibrium",
                                                     "time_correlation"):
            lags = np.arange(0, cfg.max_lag + 1, cfg.lag_stride)
            try:
                est = acc.time_correlation(lags)
            except ValueError:
                est = None
            if est is not None:
                tc = TimeCorrTheory.from_state(gas, grid, cfg.state_rho,
                                               cfg.state_T, n=cfg.mode_n)
                tau = lags * result.dt * cfg.sample_every
                theo = theory_time_correlation(tau, tc)
                rows = [[int(l), t, e, th] for l, t, e, th
                        in zip(lags, tau, est, theo)]
                header = ["lag_samples", "tau_s", "corr", "corr_theory"]
                paths["time_corr"] = os.path.join(out_dir, "time_corr.csv")
                _write_csv(paths["time_corr"], comments, header, rows)
        n_samples = acc.count
        ratios = [float(np.mean(var[n]) / t)
                  for n, t in zip(("rho", "J", "E"), tv)]
        manifest_extra = [
            f"samples = {n_samples}",
            f"variance_ratio_rho = {_fmt(ratios[0])}",
            f"variance_ratio_J = {_fmt(ratios[1])}",
            f"variance_ratio_E = {_fmt(ratios[2])}",
        ]
    if result.traces_rho is not None:
        var_rho = result.traces_rho.var(axis=0)
        var_P = result.traces_P.var(axis=0)
        rows = [[t, vr, vp] for t, vr, vp
                in zip(result.times, var_rho, var_P)]
        header = ["t_s", "var_sigma_rho", "var_sigma_P"]
        paths["shock_variance"] = os.path.join(out_dir, "shock_variance.csv")
        _write_csv(paths["shock_variance"], comments, header, rows)
        D_rho = result.shock_diffusion(pressure=False)
        D_P = result.shock_diffusion(pressure=True)
        rh = result.rh
        manifest_extra = [
            f"members = {cfg.ensemble}",
            f"D_rho = {_fmt(D_rho)}",
            f"D_P = {_fmt(D_P)}",
            f"left_state = {_fmt(rh.rho_L)} {_fmt(rh.u_L)} {_fmt(rh.T_L)}",
            f"right_state = {_fmt(rh.rho_R)} {_fmt(rh.u_R)} {_fmt(rh.T_R)}",
        ]
    manifest = [
        f"version = {_version_string()}",
        f"seed = {cfg.seed}",
        f"dt = {_fmt(result.dt)}",
    ] + manifest_extra + ["", "config:"] + serialize_config(cfg).splitlines()
    paths["manifest"] = os.path.join(out_dir, "manifest.txt")
    with open(paths["manifest"], "w", encoding="utf-8") as fh:
        fh.write("\n".join(manifest) + "\n")
    result.paths = paths
    return paths


def run_experiment(cfg: ExperimentConfig, out_dir=None) -> ExperimentResult:
    """Validate, run the configured ensemble, and write output files."""
    result = ensemble_run(cfg)
    write_outputs(result, out_dir)
    return result
