"""End-to-end acceptance checks for the solver suite.

Nine checks, each printing one [PRIMARY n] PASS/FAIL line with the measured
numbers behind the verdict. The heavy ensembles are session fixtures shared
between checks; expect tens of minutes of runtime, dominated by the particle
shock ensembles.
"""
import math
from pathlib import Path

import numpy as np
import pytest

from llns1d.boundaries import BoundaryCondition
from llns1d.config import load_config
from llns1d.experiments import ensemble_run
from llns1d.gas import (
    GasSpec,
    GridSpec,
    field_from_primitive_arrays,
    max_stable_dt,
    uniform_field,
)
from llns1d.noise import heat_amplitude, stress_amplitude
from llns1d.schemes import (
    RK3_WEIGHTS,
    maccormack_step,
    ppm_step,
    rk3_face_interpolate,
    rk3_step,
)
from llns1d.stats import (
    TimeCorrTheory,
    theory_offdiagonal,
    theory_time_correlation,
    theory_variances,
)

CONFIGS = Path(__file__).resolve().parents[1] / "configs"

RHO_REF = 1.78e-3
T_REF = 273.0

STEPS = {
    "maccormack": maccormack_step,
    "ppm": ppm_step,
    "rk3": rk3_step,
}


def report(num, ok, detail):
    line = f"[PRIMARY {num}] {'PASS' if ok else 'FAIL'}: {detail}"
    print(line)
    assert ok, line


def _cfg(name, **overrides):
    cfg = load_config(CONFIGS / name)
    return cfg.with_overrides(**overrides) if overrides else cfg


def member_rows(result, extract):
    """Mean and standard error of a per-member statistic."""
    rows = np.array([extract(acc) for acc in result.member_accs])
    se = rows.std(axis=0, ddof=1) / math.sqrt(rows.shape[0])
    return rows.mean(axis=0), se


# ---------------------------------------------------------------------------
# shared ensembles


@pytest.fixture(scope="session")
def eq_runs():
    runs = {"rk3": ensemble_run(_cfg("equilibrium.cfg"))}
    for scheme, seed in (("maccormack", 101), ("ppm", 102)):
        runs[scheme] = ensemble_run(
            _cfg("equilibrium.cfg", scheme=scheme, seed=seed))
    return runs


@pytest.fixture(scope="session")
def tc_rk3():
    return ensemble_run(_cfg("time_correlation.cfg"))


@pytest.fixture(scope="session")
def tc_dsmc():
    return ensemble_run(_cfg("time_correlation.cfg", engine="dsmc",
                             steps=125000, seed=500))


@pytest.fixture(scope="session")
def grad_runs():
    return {
        "pde": ensemble_run(_cfg("gradient.cfg")),
        "dsmc": ensemble_run(_cfg("gradient.cfg", engine="dsmc", seed=700)),
    }


SHOCK_CONFIGS = {1.2: "shock_ma12.cfg", 1.4: "shock_ma14.cfg",
                 2.0: "shock_ma20.cfg"}


@pytest.fixture(scope="session")
def shock_rk3():
    return {mach: ensemble_run(_cfg(name))
            for mach, name in SHOCK_CONFIGS.items()}


@pytest.fixture(scope="session")
def shock_dsmc():
    seeds = {1.2: 3012, 1.4: 3014, 2.0: 3020}
    return {mach: ensemble_run(_cfg(name, engine="dsmc", seed=seeds[mach],
                                    warmup=1000, steps=4000))
            for mach, name in SHOCK_CONFIGS.items()}


# ---------------------------------------------------------------------------
# equilibrium fluctuations


def test_criterion_1_equilibrium_variances(eq_runs):
    cfg = eq_runs["rk3"].config
    th = theory_variances(eq_runs["rk3"].gas, eq_runs["rk3"].grid,
                          cfg.state_rho, cfg.state_T)
    names = ("rho", "J", "E")
    ratios = {s: np.array([r.acc.variance(n).mean() for n in names]) / th
              for s, r in eq_runs.items()}
    errs = {s: np.abs(v - 1.0) for s, v in ratios.items()}
    within = bool(np.all(errs["rk3"] <= 0.06))
    ranked = (errs["rk3"][0] < errs["maccormack"][0]
              and errs["rk3"][0] < errs["ppm"][0])
    n = eq_runs["rk3"].acc.count
    report(1, within and ranked and n >= 10**6,
           f"{n} samples; rk3 variance ratios rho {ratios['rk3'][0]:.4f}, "
           f"J {ratios['rk3'][1]:.4f}, E {ratios['rk3'][2]:.4f} (bound 6%); "
           f"density |error| rk3 {errs['rk3'][0]:.4f} vs maccormack "
           f"{errs['maccormack'][0]:.4f}, ppm {errs['ppm'][0]:.4f}")


def test_criterion_2_scheme_deficits(eq_runs):
    cfg = eq_runs["rk3"].config
    th = theory_variances(eq_runs["rk3"].gas, eq_runs["rk3"].grid,
                          cfg.state_rho, cfg.state_T)[0]
    deficits = {s: 1.0 - eq_runs[s].acc.variance("rho").mean() / th
                for s in ("maccormack", "ppm")}
    ok = all(0.09 <= d <= 0.20 for d in deficits.values())
    report(2, ok,
           f"density-variance deficits maccormack "
           f"{deficits['maccormack']:.4f}, ppm {deficits['ppm']:.4f} "
           f"(required range 0.09..0.20)")


def test_criterion_3_spatial_correlations(eq_runs):
    run = eq_runs["rk3"]
    cfg = run.config
    M = run.grid.M_c
    c = run.acc.center
    th = theory_variances(run.gas, run.grid, cfg.state_rho, cfg.state_T)
    v_inf = th[0] / (1.0 - 1.0 / M)
    target = theory_offdiagonal(v_inf, M)[1]
    off = np.arange(M) != c

    # the off-diagonal level: ensemble average over cells, tested at 3
    # standard errors of the member spread, plus a per-cell screen
    per_member = np.array([a.center_covariance("rho")[off].mean()
                           for a in run.member_accs])
    z_row = ((per_member.mean() - target)
             / (per_member.std(ddof=1) / math.sqrt(len(per_member))))
    mean_rk3, se_rk3 = member_rows(run, lambda a: a.center_covariance("rho"))
    z_cells = (mean_rk3[off] - target) / se_rk3[off]
    rk3_ok = abs(z_row) <= 3.0 and np.abs(z_cells).max() < 6.0

    spurious = {}
    for s in ("maccormack", "ppm"):
        mean_s, se_s = member_rows(eq_runs[s],
                                   lambda a: a.center_covariance("rho"))
        spurious[s] = max(abs((mean_s[j] - target) / se_s[j])
                          for j in (c - 1, c + 1))
    spur_ok = all(v > 3.0 for v in spurious.values())

    mean_rj, se_rj = member_rows(run, lambda a: a.center_covariance("rhoJ"))
    z_rj = mean_rj / se_rj
    rj_ok = (np.sqrt(float((z_rj**2).mean())) < 1.6
             and np.abs(z_rj).max() < 6.0)

    report(3, rk3_ok and spur_ok and rj_ok,
           f"rk3 off-diagonal z_row {z_row:+.2f} (|z|<=3), cell screen max "
           f"{np.abs(z_cells).max():.2f} (<6); adjacent-cell artifact |z| "
           f"maccormack {spurious['maccormack']:.1f}, ppm "
           f"{spurious['ppm']:.1f} (>3); rho-J rms z "
           f"{np.sqrt(float((z_rj**2).mean())):.2f} (<1.6), max "
           f"{np.abs(z_rj).max():.2f} (<6)")


# ---------------------------------------------------------------------------
# temporal correlations and the particle oracle


def test_criterion_4_time_correlation(tc_rk3):
    cfg = tc_rk3.config
    gas, grid = tc_rk3.gas, tc_rk3.grid
    lags = np.arange(0, cfg.max_lag + 1, cfg.lag_stride)
    taus = lags * cfg.sample_every * tc_rk3.dt
    c_s = math.sqrt(gas.gamma * gas.R * cfg.state_T)
    window = taus < grid.L / c_s
    meas = tc_rk3.acc.time_correlation(lags)
    theory = TimeCorrTheory.from_state(gas, grid, cfg.state_rho,
                                       cfg.state_T, n=cfg.mode_n)
    ref = theory_time_correlation(taus, theory)
    dev = np.abs(meas[window] - ref[window])
    worst = int(np.argmax(dev))
    report(4, bool(dev.max() <= 0.10),
           f"max |corr - closed form| = {dev.max():.4f} at tau = "
           f"{taus[window][worst] * 1e9:.2f} ns (bound 0.10 for tau < "
           f"{grid.L / c_s * 1e9:.2f} ns; {tc_rk3.acc.count} samples)")


def test_criterion_5_dsmc_cross_check(tc_rk3, tc_dsmc):
    cfg = tc_dsmc.config
    th = theory_variances(tc_dsmc.gas, tc_dsmc.grid, cfg.state_rho,
                          cfg.state_T)
    names = ("rho", "J", "E")
    ratios = np.array([tc_dsmc.acc.variance(n).mean() for n in names]) / th
    n = tc_dsmc.acc.count
    var_ok = bool(np.all(np.abs(ratios - 1.0) <= 0.05)) and n >= 10**6

    lags = np.arange(0, cfg.max_lag + 1, cfg.lag_stride)
    taus = lags * cfg.sample_every * tc_dsmc.dt
    c_s = math.sqrt(tc_dsmc.gas.gamma * tc_dsmc.gas.R * cfg.state_T)
    window = (taus < tc_dsmc.grid.L / c_s) & (lags > 0)
    mean_r, se_r = member_rows(tc_rk3, lambda a: a.time_correlation(lags))
    mean_d, se_d = member_rows(tc_dsmc, lambda a: a.time_correlation(lags))
    z = (mean_r[window] - mean_d[window]) / np.hypot(se_r[window],
                                                     se_d[window])
    corr_ok = np.abs(z).max() < 4.0 and np.sqrt(float((z**2).mean())) < 1.8
    report(5, var_ok and corr_ok,
           f"dsmc variance ratios rho {ratios[0]:.4f}, J {ratios[1]:.4f}, "
           f"E {ratios[2]:.4f} (bound 5%, {n} samples); rk3-dsmc correlation "
           f"max |z| {np.abs(z).max():.2f} (<4), rms z "
           f"{np.sqrt(float((z**2).mean())):.2f} (<1.8)")


# ---------------------------------------------------------------------------
# long-range correlations under a temperature gradient


def test_criterion_6_gradient_correlations(grad_runs):
    mean_p, se_p = member_rows(grad_runs["pde"],
                               lambda a: a.center_covariance("rhoJ"))
    mean_d, se_d = member_rows(grad_runs["dsmc"],
                               lambda a: a.center_covariance("rhoJ"))
    c = grad_runs["pde"].acc.center
    z_p = mean_p / se_p
    peak = int(np.argmin(mean_p))
    peak_ok = mean_p[peak] < 0.0 and z_p[peak] < -3.0 and abs(peak - c) <= 3

    # long-ranged: the anticorrelation spans a broad region around the
    # center, not just the peak cell
    win = np.arange(c - 6, c + 7)
    others = win[win != peak]
    pooled = float(mean_p[win].sum() / np.hypot.reduce(se_p[win]))
    n_neg = int((mean_p[others] < 0.0).sum())
    long_ok = pooled < -2.0 and n_neg >= 8

    # engine agreement on raw peak location plus smoothed shape; the raw
    # per-cell curves carry member noise comparable to the signal
    peak_d = int(np.argmin(mean_d))
    ker = np.ones(3) / 3.0
    sm_p = np.convolve(mean_p, ker, mode="same")
    sm_d = np.convolve(mean_d, ker, mode="same")
    shape = float(np.corrcoef(sm_p, sm_d)[0, 1])
    n_sign = int((np.sign(sm_p) == np.sign(sm_d)).sum())
    agree = (mean_d[peak_d] < 0.0 and abs(peak_d - peak) <= 3
             and shape > 0.6 and n_sign >= 28)

    report(6, peak_ok and long_ok and agree,
           f"rk3 negative peak {mean_p[peak]:+.3e} at cell {peak} "
           f"(center {c}, z {z_p[peak]:+.1f}); window pooled z {pooled:+.2f} "
           f"with {n_neg}/12 neighbors negative; dsmc peak at cell {peak_d}, "
           f"smoothed shape correlation {shape:.3f} (>0.6), sign agreement "
           f"{n_sign}/40")


# ---------------------------------------------------------------------------
# shock random walk


def _fit_line(t, var, lo, hi):
    m = (t >= lo) & (t <= hi)
    A = np.vstack([t[m], np.ones(int(m.sum()))]).T
    coef, *_ = np.linalg.lstsq(A, var[m], rcond=None)
    pred = A @ coef
    ss_res = float(((var[m] - pred) ** 2).sum())
    ss_tot = float(((var[m] - var[m].mean()) ** 2).sum())
    return float(coef[0]), 1.0 - ss_res / ss_tot


def test_criterion_7_shock_random_walk(shock_rk3, shock_dsmc):
    machs = sorted(shock_rk3)
    d_rho, d_pres, r2 = {}, {}, {}
    for mach in machs:
        run = shock_rk3[mach]
        t, cfg = run.times, run.config
        _, r2[mach] = _fit_line(t, run.traces_rho.var(axis=0),
                                cfg.fit_lo * t[-1], cfg.fit_hi * t[-1])
        d_rho[mach] = run.shock_diffusion()
        d_pres[mach] = run.shock_diffusion(pressure=True)
    r2_ok = all(v > 0.95 for v in r2.values())
    dec_ok = d_rho[2.0] < d_rho[1.4] < d_rho[1.2]
    pair_ok = all(abs(d_rho[m] - d_pres[m]) <= 0.25 * max(d_rho[m],
                                                          d_pres[m])
                  for m in machs)
    # the density-based location is an affine function of total mass, and
    # the particle runs carry a slowly saturating particle-count mode that
    # swamps its slope at this ensemble size; the pressure-based location
    # resolves the same drift cleanly in both engines, so the cross-engine
    # slope check uses it
    cross = {m: shock_dsmc[m].shock_diffusion(pressure=True) for m in machs}
    cross_ok = all(abs(d_pres[m] - cross[m]) <= 0.30 * max(d_pres[m],
                                                           cross[m])
                   for m in machs)
    report(7, r2_ok and dec_ok and pair_ok and cross_ok,
           "rk3 R^2 " + ", ".join(f"Ma {m}: {r2[m]:.3f}" for m in machs)
           + " (>0.95); D_rho "
           + ", ".join(f"{d_rho[m]:.3e}" for m in machs)
           + " (decreasing); D_P/D_rho "
           + ", ".join(f"{d_pres[m] / d_rho[m]:.2f}" for m in machs)
           + " (within 25%); dsmc/rk3 pressure-slope ratio "
           + ", ".join(f"{cross[m] / d_pres[m]:.2f}" for m in machs)
           + " (within 30%)")


# ---------------------------------------------------------------------------
# deterministic behavior with the noise off


def _grid(M=40):
    return GridSpec(M_c=M, L=1.25e-4, sigma=1.568e-12)


def _smooth_wave(grid, gas, eps=0.01):
    x = grid.cell_centers()
    phase = 2.0 * np.pi * x / grid.L
    c = math.sqrt(gas.gamma * gas.R * T_REF)
    rho = RHO_REF * (1.0 + eps * np.sin(phase))
    u = eps * c * np.sin(phase)
    T = T_REF * (1.0 + eps * (gas.gamma - 1.0) * np.sin(phase))
    return field_from_primitive_arrays(grid, gas, rho, u, T)


def _coarsen(field, gas):
    M = field.grid.M_c
    U = 0.5 * (field.U[:, 0:M:2] + field.U[:, 1:M:2])
    rho = U[0]
    u = U[1] / rho
    T = (U[2] - 0.5 * U[1] * u) / (gas.c_v * rho)
    return field_from_primitive_arrays(_grid(M // 2), gas, rho, u, T)


def test_criterion_8_deterministic_verification():
    gas = GasSpec.argon()
    bc = BoundaryCondition.periodic()
    c_s = math.sqrt(gas.gamma * gas.R * T_REF)

    uniform_dev = 0.0
    conserve_dev = 0.0
    for step in STEPS.values():
        field = uniform_field(_grid(), gas, RHO_REF, 0.0, T_REF)
        U0 = field.U.copy()
        for _ in range(100):
            field = step(field, 1.0e-12, bc, None, gas)
        scale = np.array([RHO_REF, RHO_REF * c_s, U0[2].mean()])
        uniform_dev = max(uniform_dev, float(
            (np.abs(field.U - U0) / scale[:, None]).max()))

        field = _smooth_wave(_grid(), gas)
        tot0 = field.U.sum(axis=1)
        tot_scale = np.array([tot0[0], tot0[0] * c_s, tot0[2]])
        for _ in range(200):
            field = step(field, 1.0e-12, bc, None, gas)
        conserve_dev = max(conserve_dev, float(
            (np.abs(field.U.sum(axis=1) - tot0) / tot_scale).max()))
    uniform_ok = uniform_dev <= 1e-14
    conserve_ok = conserve_dev <= 1e-12

    orders = {}
    for scheme in ("maccormack", "ppm"):
        step = STEPS[scheme]
        results = {}
        for M in (40, 80, 160):
            r = M // 40
            field = _smooth_wave(_grid(M), gas)
            # dt shrinks with dx^2 so the time-integration error stays
            # subdominant to the spatial one being measured
            for _ in range(25 * r**2):
                field = step(field, 4.0e-12 / r**2, bc, None, gas)
            results[M] = field
        f80 = _coarsen(results[80], gas)
        f160 = _coarsen(_coarsen(results[160], gas), gas)
        scale = np.abs(results[40].U).mean(axis=1, keepdims=True)
        e1 = float((np.abs(results[40].U - f80.U) / scale).mean())
        e2 = float((np.abs(f80.U - f160.U) / scale).mean())
        orders[scheme] = math.log2(e1 / e2)
    spatial_ok = all(v > 1.8 for v in orders.values())

    base = _smooth_wave(_grid(), gas)
    assert 8.0e-12 < max_stable_dt(base, gas)
    finals = []
    for k in range(3):
        field = _smooth_wave(_grid(), gas)
        for _ in range(24 * 2**k):
            field = rk3_step(field, 8.0e-12 / 2**k, bc, None, gas)
        finals.append(field.U)
    scale = float(np.abs(finals[0]).mean())
    d1 = float(np.abs(finals[0] - finals[1]).mean()) / scale
    d2 = float(np.abs(finals[1] - finals[2]).mean()) / scale
    temporal = math.log2(d1 / d2)
    temporal_ok = 2.6 < temporal < 3.4

    report(8, uniform_ok and conserve_ok and spatial_ok and temporal_ok,
           f"uniform-state drift {uniform_dev:.2e} (<=1e-14); conservation "
           f"drift {conserve_dev:.2e} (<=1e-12); spatial orders maccormack "
           f"{orders['maccormack']:.2f}, ppm {orders['ppm']:.2f} (>1.8); "
           f"rk3 temporal order {temporal:.2f} (2.6..3.4)")


# ---------------------------------------------------------------------------
# stochastic flux magnitudes


def test_criterion_9_flux_variance_properties():
    gas = GasSpec.argon()
    grid = _grid()
    dt = 1.0e-12
    eta = gas.eta0 * math.sqrt(T_REF)
    kappa = gas.kappa0 * math.sqrt(T_REF)
    var_s = 8.0 * gas.k_B * eta * T_REF / (3.0 * dt * grid.V_c)
    var_q = 2.0 * gas.k_B * kappa * T_REF**2 / (dt * grid.V_c)
    amp_s = stress_amplitude(T_REF, T_REF, eta, eta, dt, grid.V_c, gas.k_B)
    amp_q = heat_amplitude(T_REF, T_REF, kappa, kappa, dt, grid.V_c,
                           gas.k_B)

    rng = np.random.default_rng(909)
    n = 10**6
    draws = rng.standard_normal((3, n))
    ratios = {
        "stress": float((amp_s * draws[0]).var() / var_s),
        "heat": float((amp_q * draws[0]).var() / var_q),
        "two-stage": float((amp_s * 0.5 * (draws[0] + draws[1])).var()
                           / (var_s / 2.0)),
        "three-stage": float((amp_s * (RK3_WEIGHTS[0] * draws[0]
                                       + RK3_WEIGHTS[1] * draws[1]
                                       + RK3_WEIGHTS[2] * draws[2])).var()
                             / (var_s / 2.0)),
    }
    stage_ok = all(abs(v - 1.0) <= 0.01 for v in ratios.values())

    faces = rk3_face_interpolate(rng.standard_normal((n, 4)))
    doubling = float(faces.var() / 2.0)
    face_ok = abs(doubling - 1.0) <= 0.02

    report(9, stage_ok and face_ok,
           "variance/prediction " + ", ".join(
               f"{k} {v:.4f}" for k, v in ratios.items())
           + f" (within 1%); face-interpolation doubling {doubling:.4f}"
           f" (within 2%)")
