"""Named end-to-end scenarios producing reproducible pass/fail reports.

Every scenario draws its ensemble from sub-seeds that are pure functions
of (master seed, member index), reduces member results in index order, and
embeds the fully resolved configuration in the report, so a report is a
deterministic function of (name, params, grid, seed) for any worker count.

Row pass policy: a match row passes when
|estimated - analytic| <= max(tolerance * |analytic|, 3 * stderr); bound
rows are one-sided with the same 3-sigma statistical allowance.
"""

from __future__ import annotations

import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from dataclasses import replace as dc_replace
from pathlib import Path

import numpy as np

from . import analytic
from .core import Config, GridSpec, SystemParams, validate
from .dynamics import (
    Trajectory,
    sample_from_spectrum,
    simulate_dipoles,
    simulate_oscillator,
)
from .errors import UnknownScenario
from .estimators import (
    SpectrumEstimate,
    commutator_from_spectrum,
    decorrelated,
    hilbert_transform,
    ks_critical,
    ks_distance,
    periodogram,
    structure_function,
    windowed_energy,
    write_series_csv,
)
from .noise import (
    dump_realization,
    member_seed,
    synthesize_field,
    synthesize_pair,
)
from .spectra import SpectrumModel, field_spectrum, position_transfer

N_GROUPS = 8  # ensemble split for group-based standard errors


# ---------------------------------------------------------------------------
# report structure

@dataclass
class Row:
    quantity: str
    estimated: float
    stderr: float
    analytic: float
    tolerance: float
    kind: str = "match"  # match | lower_bound | upper_bound | info
    note: str = ""

    @property
    def rel_error(self) -> float | None:
        if self.analytic == 0.0:
            return None
        return (self.estimated - self.analytic) / abs(self.analytic)

    @property
    def passed(self) -> bool | None:
        if self.kind == "info":
            return None
        slack = 3.0 * self.stderr
        if self.kind == "match":
            return abs(self.estimated - self.analytic) <= max(
                self.tolerance * abs(self.analytic), slack
            )
        if self.kind == "lower_bound":
            return self.estimated >= self.analytic - slack
        if self.kind == "upper_bound":
            return self.estimated <= self.analytic + slack
        raise ValueError(f"unknown row kind {self.kind}")

    def to_dict(self) -> dict:
        return {
            "quantity": self.quantity,
            "estimated": self.estimated,
            "stderr": self.stderr,
            "analytic": self.analytic,
            "rel_error": self.rel_error,
            "tolerance": self.tolerance,
            "kind": self.kind,
            "pass": self.passed,
            "note": self.note,
        }


@dataclass
class ExperimentReport:
    scenario: str
    config: dict
    rows: list
    runtime: float
    seed: int

    @property
    def all_passed(self) -> bool:
        return all(r.passed for r in self.rows if r.passed is not None)

    def to_dict(self, include_runtime: bool = True) -> dict:
        d = {
            "scenario": self.scenario,
            "config": self.config,
            "seed": self.seed,
            "rows": [r.to_dict() for r in self.rows],
        }
        if include_runtime:
            d["runtime"] = self.runtime
        return d

    def to_json(self, canonical: bool = True) -> str:
        """Stable-key-order JSON; the canonical form excludes the runtime
        so that identical (name, params, grid, seed) give byte-identical
        reports."""
        return json.dumps(self.to_dict(include_runtime=not canonical),
                          sort_keys=True, indent=2) + "\n"

    def write_csv(self, path):
        import csv

        with open(path, "w", newline="") as fh:
            wr = csv.writer(fh)
            wr.writerow(["quantity", "estimated", "stderr", "analytic",
                         "rel_error", "tolerance", "kind", "pass", "note"])
            for r in self.rows:
                d = r.to_dict()
                wr.writerow([d[k] for k in ("quantity", "estimated", "stderr",
                                            "analytic", "rel_error", "tolerance",
                                            "kind", "pass", "note")])

    def summary_lines(self):
        out = [f"scenario {self.scenario} (seed {self.seed})"]
        for r in self.rows:
            status = {True: "PASS", False: "FAIL", None: "INFO"}[r.passed]
            rel = "" if r.rel_error is None else f" rel={r.rel_error:+.3%}"
            out.append(
                f"  [{status}] {r.quantity}: est={r.estimated:.6g} "
                f"ana={r.analytic:.6g}{rel} (tol={r.tolerance:g}, stderr={r.stderr:.2g})"
            )
        return out


# ---------------------------------------------------------------------------
# emission of artifacts (binary dumps, plot-ready CSV)

class Emitter:
    """Writes optional artifacts under an output directory."""

    def __init__(self, out_dir=None, emit=()):
        self.out_dir = Path(out_dir) if out_dir else None
        self.emit = set(emit)

    def wants(self, kind: str) -> bool:
        return self.out_dir is not None and kind in self.emit

    def _path(self, name: str) -> Path:
        self.out_dir.mkdir(parents=True, exist_ok=True)
        return self.out_dir / name

    def field(self, scenario: str, realization):
        if self.wants("trajectories"):
            dump_realization(
                self._path(f"{scenario}_field"), realization.samples,
                realization.dt, realization.seed, realization.model.label(),
            )

    def trajectory(self, scenario: str, traj: Trajectory, seed):
        if self.wants("trajectories"):
            for name, arr in (("x", traj.x), ("v", traj.v), ("p", traj.p)):
                if arr is None:
                    continue
                dump_realization(
                    self._path(f"{scenario}_{name}"), arr, traj.dt, seed,
                    f"trajectory:{name}",
                )

    def series(self, scenario: str, quantity: str, first_name, first, values,
               stderr=None):
        if self.wants("spectra"):
            write_series_csv(
                self._path(f"{scenario}_{quantity}.csv"),
                first_name, first, values, stderr,
            )


# ---------------------------------------------------------------------------
# deterministic ensemble map-reduce

def ensemble_reduce(worker, n_ensemble: int, jobs: int, reducer, state):
    """Apply ``reducer(state, k, worker(k))`` in member order.

    Workers may run on any number of threads; the reduction order is
    always 0..n-1, so the result is identical for every jobs setting.
    """
    if jobs <= 1:
        for k in range(n_ensemble):
            state = reducer(state, k, worker(k))
        return state
    with ThreadPoolExecutor(max_workers=jobs) as ex:
        window = max(2 * jobs, 2)
        for start in range(0, n_ensemble, window):
            ks = list(range(start, min(start + window, n_ensemble)))
            for k, res in zip(ks, ex.map(worker, ks)):
                state = reducer(state, k, res)
    return state


def _mean_stderr(values) -> tuple[float, float]:
    arr = np.asarray(values, dtype=float)
    if arr.size < 2:
        return float(arr.mean()), 0.0
    return float(arr.mean()), float(arr.std(ddof=1) / math.sqrt(arr.size))


def _group_of(k: int, n_ensemble: int) -> int:
    return k * N_GROUPS // n_ensemble


def _group_stderr(values_by_group) -> float:
    vals = np.asarray(values_by_group, dtype=float)
    if vals.size < 2:
        return 0.0
    return float(vals.std(ddof=1) / math.sqrt(vals.size))


def _x_decorrelation_time(params: SystemParams) -> float:
    # twelve amplitude e-folds: the subsample is independent enough that
    # the KS tests run at their nominal level despite the small finite-tau
    # offsets of the simulated moments
    return 24.0 / (params.tau * params.omega0 ** 2)


def _u_decorrelation_time(params: SystemParams) -> float:
    # the energy autocovariance decays at twice the amplitude rate
    return 12.0 / (params.tau * params.omega0 ** 2)


def _fast_trim(arr: np.ndarray) -> np.ndarray:
    """Trim the series front to an even FFT-friendly length (keeps the tail).

    Even length keeps the full-length periodogram lattice commensurate
    with the time grid, which the sine-transform commutator route relies
    on.
    """
    from scipy.fft import next_fast_len

    n = arr.size
    m = n
    while m % 2 or next_fast_len(m, real=True) != m:
        m -= 1
    return arr[n - m :]


def _corr_arrays(x: np.ndarray, p: np.ndarray, lag_samples: int):
    """(C_xx, C_pp, C_xp, C_px) on lags 0..lag_samples, unbiased, shared FFTs."""
    from scipy.fft import next_fast_len

    n = x.size
    xm = x - x.mean()
    pm = p - p.mean()
    m = next_fast_len(2 * n)
    fx = np.fft.rfft(xm, m)
    fp = np.fft.rfft(pm, m)
    n_eff = n - np.arange(lag_samples + 1)
    cxx = np.fft.irfft(np.conj(fx) * fx, m)[: lag_samples + 1] / n_eff
    cpp = np.fft.irfft(np.conj(fp) * fp, m)[: lag_samples + 1] / n_eff
    cxp = np.fft.irfft(np.conj(fx) * fp, m)[: lag_samples + 1] / n_eff
    cpx = np.fft.irfft(np.conj(fp) * fx, m)[: lag_samples + 1] / n_eff
    return cxx, cpp, cxp, cpx


# ---------------------------------------------------------------------------
# scenario implementations

def _scenario_ground_state(cfg: Config, seed: int, jobs: int, emitter: Emitter):
    params, grid = cfg.params, cfg.grid
    model = SpectrumModel.zpf()
    gs = analytic.ground_state(params)
    t_dec_x = _x_decorrelation_time(params)
    t_dec_u = _u_decorrelation_time(params)

    def worker(k):
        field = synthesize_field(model, params, grid, member_seed(seed, k))
        traj = simulate_oscillator(params, field)
        u = 0.5 * (params.m * params.omega0 ** 2 * traj.x ** 2
                   + traj.p ** 2 / params.m)
        res = {
            "x_var": traj.x.var(),
            "p_var": traj.p.var(),
            "u_mean": u.mean(),
            "x_sub": decorrelated(traj.x, grid.dt, t_dec_x),
            "u_sub": decorrelated(u, grid.dt, t_dec_u),
        }
        if k == 0:
            emitter.field("ground_state", field)
            emitter.trajectory("ground_state", traj, member_seed(seed, k))
        return res

    def reducer(state, k, res):
        for key in ("x_var", "p_var", "u_mean"):
            state[key].append(res[key])
        state["x_sub"].append(res["x_sub"])
        state["u_sub"].append(res["u_sub"])
        return state

    state = ensemble_reduce(worker, grid.n_ensemble, jobs, reducer,
                            {k: [] for k in ("x_var", "p_var", "u_mean", "x_sub", "u_sub")})

    x_var, x_se = _mean_stderr(state["x_var"])
    p_var, p_se = _mean_stderr(state["p_var"])
    u_mean, u_se = _mean_stderr(state["u_mean"])
    x_pool = np.concatenate(state["x_sub"])
    u_pool = np.concatenate(state["u_sub"])

    ks_x = ks_distance(x_pool, gs.x_cdf)
    ks_u = ks_distance(u_pool, gs.energy_cdf)

    heis = x_var * p_var
    heis_se = heis * math.sqrt((x_se / x_var) ** 2 + (p_se / p_var) ** 2)

    rows = [
        Row("x_variance", x_var, x_se, gs.x_var, 0.03),
        Row("p_variance", p_var, p_se, gs.p_var, 0.03),
        Row("mean_energy", u_mean, u_se, gs.mean_energy, 0.03),
        Row("position_ks", ks_x, 0.0, ks_critical(x_pool.size), 0.0,
            kind="upper_bound",
            note=f"KS vs Gaussian(var={gs.x_var:g}) at the 1% level, "
                 f"n={x_pool.size} decorrelated samples"),
        Row("energy_ks", ks_u, 0.0, ks_critical(u_pool.size), 0.0,
            kind="upper_bound",
            note=f"KS vs exponential(mean={gs.mean_energy:g}) at the 1% level"),
        Row("heisenberg_product", heis, heis_se,
            analytic.heisenberg_product(params), 0.06),
    ]
    return rows


def _scenario_commutators(cfg: Config, seed: int, jobs: int, emitter: Emitter):
    params, grid = cfg.params, cfg.grid
    model = SpectrumModel.zpf()
    dt = grid.dt
    t_max = 100.0
    lag_ext = int(round(1.2 * t_max / dt))

    def worker(k):
        field = synthesize_field(model, params, grid, member_seed(seed, k))
        traj = simulate_oscillator(params, field)
        x = _fast_trim(traj.x)
        p = _fast_trim(traj.p)
        cxx, cpp, cxp, cpx = _corr_arrays(x, p, lag_ext)
        return {
            "spec_x": periodogram(x, dt).values,
            "spec_p": periodogram(p, dt).values,
            "cxx": cxx, "cpp": cpp, "cxp": cxp, "cpx": cpx,
        }

    n_ens = grid.n_ensemble

    def reducer(state, k, res):
        g = _group_of(k, n_ens)
        for key, arr in res.items():
            if key not in state:
                state[key] = np.zeros((N_GROUPS,) + arr.shape)
            state[key][g] += arr
        return state

    state = ensemble_reduce(worker, n_ens, jobs, reducer, {})
    per_group = n_ens / N_GROUPS

    def total(key):
        return state[key].sum(axis=0) / n_ens

    spec_x = total("spec_x")
    spec_p = total("spec_p")
    # the periodogram lattice of the trimmed post-burn-in segment
    seg_n = 2 * spec_x.size
    omega = 2.0 * math.pi / (seg_n * dt) * np.arange(1, spec_x.size + 1)

    lags = dt * np.arange(int(round(t_max / dt)) + 1)
    c_xx_spec = commutator_from_spectrum(
        SpectrumEstimate(omega=omega, values=spec_x), t_max, dt).values
    c_pp_spec = commutator_from_spectrum(
        SpectrumEstimate(omega=omega, values=spec_p), t_max, dt).values

    def hilbert_route(pos_key, neg_key, group=None):
        if group is None:
            pos = total(pos_key)
            neg = total(neg_key)
        else:
            pos = state[pos_key][group] / per_group
            neg = state[neg_key][group] / per_group
        two = np.concatenate([neg[:0:-1], pos])
        h = 2.0 * hilbert_transform(two)
        mid = lag_ext
        return h[mid : mid + lags.size]

    c_xp_h = hilbert_route("cxp", "cpx")
    c_xx_h = hilbert_route("cxx", "cxx")

    cxp0_groups = [hilbert_route("cxp", "cpx", g)[0] for g in range(N_GROUPS)]
    cxp0_se = _group_stderr(cxp0_groups)

    hb, m, w0 = params.hbar, params.m, params.omega0
    env = np.exp(-params.damping_rate * lags)
    ref_xx = hb / (m * w0) * np.sin(w0 * lags) * env
    ref_pp = hb * m * w0 * np.sin(w0 * lags) * env
    peak_xx = hb / (m * w0)
    peak_pp = hb * m * w0

    dev_xx = float(np.max(np.abs(c_xx_spec - ref_xx)) / peak_xx)
    dev_pp = float(np.max(np.abs(c_pp_spec - ref_pp)) / peak_pp)

    strong = np.abs(ref_xx) > 0.3 * peak_xx
    route_dev = float(np.max(np.abs(c_xx_spec[strong] - c_xx_h[strong])) / peak_xx)

    emitter.series("commutators", "c_xx_spectral", "lag", lags, c_xx_spec)
    emitter.series("commutators", "c_xx_hilbert", "lag", lags, c_xx_h)
    emitter.series("commutators", "c_pp_spectral", "lag", lags, c_pp_spec)

    rows = [
        Row("c_xp_zero", float(c_xp_h[0]), cxp0_se, params.hbar, 0.05,
            note="equal-time x-p commutator, Hilbert route"),
        Row("c_xx_max_dev", dev_xx, 0.0, 0.05, 0.0, kind="upper_bound",
            note="max |c_xx - (hbar/m w0) sin(w0 t) e^{-gamma t}| / peak, t in [0,100]"),
        Row("c_pp_max_dev", dev_pp, 0.0, 0.05, 0.0, kind="upper_bound",
            note="max |c_pp - hbar m w0 sin(w0 t) e^{-gamma t}| / peak"),
        Row("route_agreement", route_dev, 0.0, 0.05, 0.0, kind="upper_bound",
            note="sine-transform vs Hilbert route where |c_xx| > 0.3 peak"),
    ]
    return rows


def _scenario_energy_time(cfg: Config, seed: int, jobs: int, emitter: Emitter):
    params, grid = cfg.params, cfg.grid
    model = SpectrumModel.zpf()
    dt = grid.dt
    t_sweep = [1.0, 10.0, 100.0, 1000.0, 10000.0]
    lag_max = int(round(max(t_sweep) / dt))
    m, w0 = params.m, params.omega0

    def worker(k):
        field = synthesize_field(model, params, grid, member_seed(seed, k))
        traj = simulate_oscillator(params, field)
        x = _fast_trim(traj.x)
        p = _fast_trim(traj.p)
        cxx, cpp, cxp, _ = _corr_arrays(x, p, lag_max)
        res = {"cxx": cxx, "cpp": cpp, "cxp": cxp}
        res["inst"] = windowed_energy(x, p, params, dt, dt)
        for t in t_sweep:
            stats = windowed_energy(x, p, params, t, dt)
            res[f"w{t:g}"] = (stats.t_window, stats.samples.mean(),
                              stats.samples.var(), stats.samples.size)
        return res

    n_ens = grid.n_ensemble

    def reducer(state, k, res):
        g = _group_of(k, n_ens)
        for key in ("cxx", "cpp", "cxp"):
            state[key][g] += res[key]
        state["inst_means"].append(res["inst"].mean)
        state["inst_stds"].append(res["inst"].dispersion)
        for t in t_sweep:
            state[f"w{t:g}"].append(res[f"w{t:g}"])
        return state

    init = {key: np.zeros((N_GROUPS, lag_max + 1)) for key in ("cxx", "cpp", "cxp")}
    init["inst_means"] = []
    init["inst_stds"] = []
    for t in t_sweep:
        init[f"w{t:g}"] = []
    state = ensemble_reduce(worker, n_ens, jobs, reducer, init)
    per_group = n_ens / N_GROUPS

    def corr_route_delta_u(cxx, cpp, cxp, t_window):
        n_lag = int(round(t_window / dt))
        us = np.arange(n_lag + 1) * dt
        f = (m ** 2 * w0 ** 4 * cxx[: n_lag + 1] ** 2
             + 2.0 * w0 ** 2 * cxp[: n_lag + 1] ** 2
             + cpp[: n_lag + 1] ** 2 / m ** 2)
        return math.sqrt(np.trapezoid(f, us) / (2.0 * t_window))

    cxx_m = state["cxx"].sum(axis=0) / n_ens
    cpp_m = state["cpp"].sum(axis=0) / n_ens
    cxp_m = state["cxp"].sum(axis=0) / n_ens

    rows = []
    u_mean_all = [w[1] for w in state[f"w{t_sweep[0]:g}"]]
    um, um_se = _mean_stderr(u_mean_all)
    rows.append(Row("u_mean", um, um_se, 0.5 * params.hbar * w0, 0.03))

    inst, inst_se = _mean_stderr(state["inst_stds"])
    rows.append(Row("delta_u_small_t", inst, inst_se,
                    0.5 * params.hbar * w0, 0.10,
                    note="window of a single sample; small-T limit of Delta U_T"))

    for t in t_sweep:
        est_corr = corr_route_delta_u(cxx_m, cpp_m, cxp_m, t)
        groups = [
            corr_route_delta_u(state["cxx"][g] / per_group,
                               state["cpp"][g] / per_group,
                               state["cxp"][g] / per_group, t)
            for g in range(N_GROUPS)
        ]
        se_corr = _group_stderr(groups)
        closed = analytic.energy_fluctuation(params, t)
        rows.append(Row(
            f"delta_u_corr_T{t:g}", est_corr, se_corr, closed.recomputed, 0.10,
            note="correlation-functional route; paper's printed large-T form "
                 f"would give {closed.paper_printed:.6g}"))

        wstats = state[f"w{t:g}"]
        t_eff = wstats[0][0]
        means = np.array([w[1] for w in wstats])
        variances = np.array([w[2] for w in wstats])
        pooled_var = float(np.mean(variances + means ** 2) - np.mean(means) ** 2)
        pooled_std = math.sqrt(max(pooled_var, 0.0))
        member_stds = np.sqrt(variances)
        _, std_se = _mean_stderr(member_stds)
        closed_eff = analytic.energy_fluctuation(params, t_eff)
        rows.append(Row(
            f"delta_u_window_T{t:g}", pooled_std, std_se,
            closed_eff.window_exact, 0.10,
            note="disjoint-window std; keeps the (1-u/T) overlap factor the "
                 "correlation functional drops (sqrt(2) larger at large T)"))
        rows.append(Row(
            f"uncertainty_product_T{t:g}", pooled_std * t_eff,
            std_se * t_eff, 0.5 * params.hbar, 0.0, kind="lower_bound",
            note="Delta U_T * T >= hbar/2"))

    us = np.arange(lag_max + 1) * dt
    emitter.series("energy_time", "cxx", "lag", us[::100], cxx_m[::100])
    return rows


def _scenario_coherent_decay(cfg: Config, seed: int, jobs: int, emitter: Emitter):
    """Displaced ensemble with antithetic field pairs.

    Members 2k and 2k+1 share one field realization with opposite signs,
    so their stochastic parts cancel exactly in the ensemble mean (the
    homogeneous decay does not flip); this removes the mean-trajectory
    noise, whose correlation time ~1/gamma would otherwise leave only a
    couple of independent noise draws across the two-e-fold window.
    Each member is still a valid realization (-eps is distributed like
    eps), and the variance about the mean is untouched.
    """
    params, grid = cfg.params, cfg.grid
    model = SpectrumModel.zpf()
    dt = grid.dt
    amp, phase = 3.0, 0.0
    gamma = params.damping_rate
    t_obs = 2.0 / gamma            # two amplitude e-folds
    n_keep = int(round(1.25 * t_obs / dt)) + 1
    kick = (
        amp * math.cos(phase),
        -amp * (params.omega0 * math.sin(phase) + gamma * math.cos(phase)),
    )

    def worker(pair_index):
        field = synthesize_field(model, params, grid, member_seed(seed, pair_index))
        flipped = dc_replace(field, samples=-field.samples,
                             seed=(field.seed, "antithetic"))
        xs = []
        for f in (field, flipped):
            traj = simulate_oscillator(params, f, kick=kick)
            xs.append(traj.x[:n_keep])
        return {"sum_x": xs[0] + xs[1], "sum_x2": xs[0] ** 2 + xs[1] ** 2,
                "pair_var": 0.25 * (xs[0] - xs[1]) ** 2}

    def reducer(state, k, res):
        state["sum_x"] += res["sum_x"]
        state["sum_x2"] += res["sum_x2"]
        state["pair_vars"].append(res["pair_var"][: int(t_obs / dt)].mean())
        return state

    n_pairs = grid.n_ensemble // 2
    state = ensemble_reduce(
        worker, n_pairs, jobs, reducer,
        {"sum_x": np.zeros(n_keep), "sum_x2": np.zeros(n_keep), "pair_vars": []},
    )
    n_ens = 2 * n_pairs
    mean_x = state["sum_x"] / n_ens
    var_x = state["sum_x2"] / n_ens - mean_x ** 2

    t = np.arange(n_keep) * dt
    envelope = np.hypot(mean_x, hilbert_transform(mean_x))
    # smooth over one oscillation period to suppress ripple
    period_n = max(1, int(round(2.0 * math.pi / params.omega0 / dt)))
    kernel = np.ones(period_n) / period_n
    env_smooth = np.convolve(envelope, kernel, mode="same")

    sel = (t >= 0.05 * t_obs) & (t <= t_obs)
    env_ref = amp * np.exp(-gamma * t)
    env_dev = float(np.max(np.abs(env_smooth[sel] - env_ref[sel]) / env_ref[sel]))

    # decay rate from the log-envelope slope
    logs = np.log(env_smooth[sel])
    slope, _ = np.polyfit(t[sel], logs, 1)

    var_mean = float(np.mean(var_x[t <= t_obs]))
    var_se = _group_stderr([
        np.mean(state["pair_vars"][g::N_GROUPS]) for g in range(N_GROUPS)
    ])

    emitter.series("coherent_decay", "mean_trajectory", "t", t, mean_x)
    emitter.series("coherent_decay", "variance", "t", t, var_x)

    gs = analytic.ground_state(params)
    rows = [
        Row("envelope_max_dev", env_dev, 0.0, 0.05, 0.0, kind="upper_bound",
            note=f"|envelope - {amp:g} e^(-gamma t)| / envelope over two e-folds; "
                 "antithetic field pairs cancel the mean-trajectory noise"),
        Row("decay_rate", float(-slope), 0.0, gamma, 0.05,
            note="log-envelope slope vs pole rate tau*omega0^2/2"),
        Row("variance_about_mean", var_mean, var_se, gs.x_var, 0.05,
            note="ensemble variance about the coherent mean stays at the "
                 "ground-state value"),
    ]
    return rows


def _scenario_free_thermal(cfg: Config, seed: int, jobs: int, emitter: Emitter):
    params, grid = cfg.params, cfg.grid
    kT = params.kT
    model = SpectrumModel.rayleigh_jeans(kT)

    def s_x(w):
        return field_spectrum(model, params, w) * position_transfer(w, params)

    def s_v(w):
        return w ** 2 * s_x(w)

    # the synthesis lattice misses the band below domega = 2 pi / duration,
    # which depresses the structure function by ~ (2 kT tau/pi m) dt^2 domega;
    # the Brownian slope is therefore fitted where that bias is negligible
    # (dt <= 20) and the longer lags are reported for the emitted curve only
    deltas = np.geomspace(1.0, 100.0, 16)
    fit_deltas = np.linspace(2.0, 20.0, 10)
    pred = analytic.free_particle(params, kT, 1.0, grid.omega_cut)

    def worker(k):
        sub = member_seed(seed, k).spawn(2)
        traj = sample_from_spectrum(s_x, grid, sub[0], params)
        vtraj = sample_from_spectrum(s_v, grid, sub[1], params)
        sf = structure_function(traj.x, grid.dt, deltas)
        sf_fit = structure_function(traj.x, grid.dt, fit_deltas)
        sfv = structure_function(vtraj.x, grid.dt, [50.0, 100.0])
        if k == 0:
            emitter.trajectory("free_thermal", traj, sub[0])
        return {"sf": sf, "sf_fit": sf_fit, "v_var": vtraj.x.var(),
                "sfv": np.mean(sfv)}

    def reducer(state, k, res):
        g = _group_of(k, grid.n_ensemble)
        state["sf"][g] += res["sf"]
        state["sf_fit"][g] += res["sf_fit"]
        state["v_var"].append(res["v_var"])
        state["sfv"].append(res["sfv"])
        return state

    state = ensemble_reduce(
        worker, grid.n_ensemble, jobs, reducer,
        {"sf": np.zeros((N_GROUPS, deltas.size)),
         "sf_fit": np.zeros((N_GROUPS, fit_deltas.size)),
         "v_var": [], "sfv": []},
    )
    n_ens = grid.n_ensemble
    per_group = n_ens / N_GROUPS
    sf_mean = state["sf"].sum(axis=0) / n_ens

    def fit_slope(sf):
        a, _ = np.polyfit(fit_deltas, sf, 1)
        return a

    slope = fit_slope(state["sf_fit"].sum(axis=0) / n_ens)
    slope_se = _group_stderr([fit_slope(state["sf_fit"][g] / per_group)
                              for g in range(N_GROUPS)])
    v_var, v_se = _mean_stderr(state["v_var"])
    sfv, sfv_se = _mean_stderr(state["sfv"])

    emitter.series("free_thermal", "structure_function", "delta_t", deltas, sf_mean)

    rows = [
        Row("structure_slope", float(slope), slope_se,
            2.0 * params.tau * kT / params.m, 0.10,
            note="Brownian slope of the position structure function"),
        Row("v_variance", v_var, v_se, pred.thermal_v_var, 0.05,
            note="equipartition kT/m"),
        Row("v_structure_asymptote", sfv, sfv_se,
            2.0 * kT / params.m, 0.10, kind="info",
            note="large-lag velocity structure function approaches 2 kT/m; "
                 "the printed form reads kT/m, which is the equilibrium "
                 "variance, not the structure-function asymptote"),
    ]
    return rows


def _scenario_free_zpf(cfg: Config, seed: int, jobs: int, emitter: Emitter):
    params, grid = cfg.params, cfg.grid
    model = SpectrumModel.zpf()

    def s_x(w):
        return field_spectrum(model, params, w) * position_transfer(w, params)

    t_lo = 100.0 * params.tau
    t_hi = (grid.n_samples // 10 - 1) * grid.dt
    deltas = np.geomspace(t_lo, t_hi, 24)

    def worker(k):
        traj = sample_from_spectrum(s_x, grid, member_seed(seed, k), params)
        sf = structure_function(traj.x, grid.dt, deltas)
        return {"sf": sf, "p_var": traj.p.var()}

    def reducer(state, k, res):
        g = _group_of(k, grid.n_ensemble)
        state["sf"][g] += res["sf"]
        state["sf_sq"] += res["sf"] ** 2
        state["p_var"].append(res["p_var"])
        return state

    state = ensemble_reduce(
        worker, grid.n_ensemble, jobs, reducer,
        {"sf": np.zeros((N_GROUPS, deltas.size)),
         "sf_sq": np.zeros(deltas.size), "p_var": []},
    )
    n_ens = grid.n_ensemble
    per_group = n_ens / N_GROUPS
    sf_mean = state["sf"].sum(axis=0) / n_ens
    sf_var = state["sf_sq"] / n_ens - sf_mean ** 2
    weights = 1.0 / np.maximum(sf_var / n_ens, 1e-30)

    logd = np.log(deltas)

    def wls(sf):
        w = weights
        sw = w.sum()
        mx = (w * logd).sum() / sw
        my = (w * sf).sum() / sw
        slope = (w * (logd - mx) * (sf - my)).sum() / (w * (logd - mx) ** 2).sum()
        intercept = my - slope * mx
        return slope, intercept

    slope, intercept = wls(sf_mean)
    group_fits = [wls(state["sf"][g] / per_group) for g in range(N_GROUPS)]
    slope_se = _group_stderr([f[0] for f in group_fits])

    # intercept/slope = C + ln(1/tau) when the log law holds
    euler_est = intercept / slope + math.log(params.tau)
    euler_groups = [f[1] / f[0] + math.log(params.tau) for f in group_fits]
    euler_se = _group_stderr(euler_groups)

    p_var, _ = _mean_stderr(state["p_var"])

    emitter.series("free_zpf", "structure_function", "delta_t", deltas, sf_mean,
                   np.sqrt(sf_var / n_ens))

    slope_ref = 2.0 * params.hbar * params.tau / (math.pi * params.m)
    rows = [
        Row("log_slope", float(slope), slope_se, slope_ref, 0.15,
            note="d(Delta x^2)/d(ln t); zeropoint diffusion is logarithmic"),
        Row("euler_intercept", float(euler_est), euler_se,
            analytic.EULER_GAMMA, 0.25,
            note="intercept/slope - ln(1/tau); Euler constant of the "
                 "log-diffusion law"),
        Row("p_variance_zero", float(p_var), 0.0, 1e-18, 0.0,
            kind="upper_bound",
            note="canonical momentum of the free particle has nil spectrum"),
    ]
    return rows


def _scenario_dipoles(cfg: Config, seed: int, jobs: int, emitter: Emitter):
    params, grid = cfg.params, cfg.grid
    model = SpectrumModel.zpf()
    pred = analytic.dipole_prediction(params)
    pp = params.mode_params(+1)
    t_dec = _x_decorrelation_time(pp)
    m, w0, K = params.m, params.omega0, params.K
    root2 = math.sqrt(2.0)

    def worker(k):
        pair = synthesize_pair(model, params, grid, member_seed(seed, k))
        t1, t2 = simulate_dipoles(params, pair)
        xp = (t1.x + t2.x) / root2
        xm = (t1.x - t2.x) / root2
        h = (t1.p ** 2 / (2 * m) + t2.p ** 2 / (2 * m)
             + 0.5 * m * w0 ** 2 * (t1.x ** 2 + t2.x ** 2)
             - K * t1.x * t2.x)
        cross = np.mean((t1.x - t1.x.mean()) * (t2.x - t2.x.mean()))
        if k == 0:
            emitter.trajectory("dipoles", t1, member_seed(seed, k))
        return {
            "xp_var": xp.var(), "xm_var": xm.var(),
            "cross": cross, "h_mean": h.mean(),
            "xp_sub": decorrelated(xp, grid.dt, t_dec),
            "xm_sub": decorrelated(xm, grid.dt, t_dec),
        }

    def reducer(state, k, res):
        for key in ("xp_var", "xm_var", "cross", "h_mean"):
            state[key].append(res[key])
        state["xp_sub"].append(res["xp_sub"])
        state["xm_sub"].append(res["xm_sub"])
        return state

    state = ensemble_reduce(worker, grid.n_ensemble, jobs, reducer,
                            {k: [] for k in ("xp_var", "xm_var", "cross", "h_mean",
                                             "xp_sub", "xm_sub")})

    xp_var, xp_se = _mean_stderr(state["xp_var"])
    xm_var, xm_se = _mean_stderr(state["xm_var"])
    cross, cross_se = _mean_stderr(state["cross"])
    h_mean, h_se = _mean_stderr(state["h_mean"])
    xp_pool = np.concatenate(state["xp_sub"])
    xm_pool = np.concatenate(state["xm_sub"])

    rows = [
        Row("x_plus_variance", xp_var, xp_se, pred.x_plus_var, 0.03),
        Row("x_minus_variance", xm_var, xm_se, pred.x_minus_var, 0.03),
        Row("cross_moment", cross, cross_se, pred.cross_cov, 0.15,
            note="<x1 x2> = (<x+^2> - <x-^2>)/2"),
        Row("mean_energy_H", h_mean, h_se, pred.mean_H, 0.005,
            note="canonical-momentum energies; exact normal-mode value"),
        Row("mode_plus_ks", ks_distance(xp_pool, pred.rho_plus_cdf), 0.0,
            ks_critical(xp_pool.size), 0.0, kind="upper_bound",
            note="x+ vs its normal-mode Gaussian at the 1% level"),
        Row("mode_minus_ks", ks_distance(xm_pool, pred.rho_minus_cdf), 0.0,
            ks_critical(xm_pool.size), 0.0, kind="upper_bound"),
        Row("interaction_energy_series", pred.E_int_exact, 0.0,
            pred.E_int_paper_series, 0.0, kind="info",
            note="exact E_int vs the printed series coefficient "
                 "-K^2 hbar/(2 m^2 w0^3); the exact expansion carries 1/8, "
                 "not 1/2"),
    ]
    return rows


def _scenario_planck_thermal(cfg: Config, seed: int, jobs: int, emitter: Emitter):
    params, grid = cfg.params, cfg.grid
    model = SpectrumModel.planck(params.kT)
    pred = analytic.planck_prediction(params, params.kT)
    t_dec_u = _u_decorrelation_time(params)

    def worker(k):
        field = synthesize_field(model, params, grid, member_seed(seed, k))
        traj = simulate_oscillator(params, field)
        u = 0.5 * (params.m * params.omega0 ** 2 * traj.x ** 2
                   + traj.p ** 2 / params.m)
        return {"u_mean": u.mean(), "u_sub": decorrelated(u, grid.dt, t_dec_u)}

    def reducer(state, k, res):
        state["u_mean"].append(res["u_mean"])
        state["u_sub"].append(res["u_sub"])
        return state

    state = ensemble_reduce(worker, grid.n_ensemble, jobs, reducer,
                            {"u_mean": [], "u_sub": []})

    u_mean, u_se = _mean_stderr(state["u_mean"])
    u_pool = np.concatenate(state["u_sub"])
    boltz = analytic.boltzmann_mean_energy(params, params.kT)

    rows = [
        Row("mean_energy", u_mean, u_se, pred.mean_energy, 0.03),
        Row("energy_ks", ks_distance(u_pool, pred.energy_cdf), 0.0,
            ks_critical(u_pool.size), 0.0, kind="upper_bound",
            note=f"energy histogram vs exponential(mean={pred.mean_energy:.6g})"),
        Row("boltzmann_oracle", boltz, 0.0, pred.mean_energy, 1e-10,
            note="Boltzmann sum over E_n = (n+1/2) hbar w0 vs the coth form"),
    ]
    return rows


# ---------------------------------------------------------------------------
# registry and entry point

SCENARIO_DEFAULTS = {
    "ground_state": (
        SystemParams(tau=0.01),
        GridSpec(dt=0.1, n_samples=1 << 20, omega_cut=10.0, omega_v_cut=5.0),
        _scenario_ground_state,
    ),
    "commutators": (
        SystemParams(tau=0.01),
        GridSpec(dt=0.1, n_samples=1 << 20, omega_cut=20.0),
        _scenario_commutators,
    ),
    "energy_time": (
        SystemParams(tau=0.01),
        GridSpec(dt=0.1, n_samples=1 << 20, omega_cut=20.0),
        _scenario_energy_time,
    ),
    "coherent_decay": (
        SystemParams(tau=0.01),
        GridSpec(dt=0.1, n_samples=1 << 15, omega_cut=10.0, n_ensemble=1024),
        _scenario_coherent_decay,
    ),
    "free_thermal": (
        SystemParams(tau=0.01, omega0=0.0, kT=1.0),
        GridSpec(dt=0.001, n_samples=1 << 20, omega_cut=3000.0),
        _scenario_free_thermal,
    ),
    "free_zpf": (
        SystemParams(tau=0.01, omega0=0.0),
        GridSpec(dt=0.01, n_samples=1 << 20, omega_cut=300.0),
        _scenario_free_zpf,
    ),
    "dipoles": (
        SystemParams(tau=0.01, K=0.1),
        GridSpec(dt=0.1, n_samples=1 << 20, omega_cut=4.0),
        _scenario_dipoles,
    ),
    "planck_thermal": (
        SystemParams(tau=0.01, kT=0.5),
        GridSpec(dt=0.1, n_samples=1 << 20, omega_cut=20.0),
        _scenario_planck_thermal,
    ),
}

SCENARIO_NAMES = tuple(SCENARIO_DEFAULTS)


def scenario_defaults(name: str) -> tuple[SystemParams, GridSpec]:
    if name not in SCENARIO_DEFAULTS:
        raise UnknownScenario(
            f"unknown scenario {name!r}; valid: {', '.join(SCENARIO_NAMES)}"
        )
    p, g, _ = SCENARIO_DEFAULTS[name]
    return p, g


def run_scenario(
    name: str,
    params: SystemParams | None = None,
    grid: GridSpec | None = None,
    jobs: int = 1,
    out_dir=None,
    emit=(),
) -> ExperimentReport:
    """Run one named scenario and assemble its report.

    ``params``/``grid`` default to the scenario's tuned configuration; the
    master seed lives in the grid.  The report embeds the fully resolved
    configuration, so every analytic value in it is re-derivable.
    """
    if name not in SCENARIO_DEFAULTS:
        raise UnknownScenario(
            f"unknown scenario {name!r}; valid: {', '.join(SCENARIO_NAMES)}"
        )
    dp, dg, fn = SCENARIO_DEFAULTS[name]
    params = dp if params is None else params
    grid = dg if grid is None else grid
    cfg = validate(params, grid)

    emitter = Emitter(out_dir=out_dir, emit=emit)
    t0 = time.perf_counter()
    rows = fn(cfg, cfg.grid.seed, jobs, emitter)
    runtime = time.perf_counter() - t0

    config = {"params": asdict(cfg.params), "grid": asdict(cfg.grid)}
    return ExperimentReport(
        scenario=name, config=config, rows=rows, runtime=runtime,
        seed=cfg.grid.seed,
    )
