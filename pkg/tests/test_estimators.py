import csv
import math

import numpy as np
import pytest

from sedlab.core import GridSpec, SystemParams
from sedlab.dynamics import simulate_oscillator
from sedlab.errors import (
    EmptySeries,
    InvalidParams,
    LagTooLong,
    SegmentTooLong,
    WindowTooLong,
)
from sedlab.estimators import (
    commutator,
    commutator_from_spectrum,
    correlation,
    hilbert_transform,
    ks_critical,
    ks_distance,
    moments_and_histogram,
    periodogram,
    structure_function,
    two_sided_correlation,
    windowed_energy,
    write_series_csv,
)
from sedlab.noise import member_seed, synthesize_field, synthesize_series
from sedlab.spectra import SpectrumModel, field_spectrum

PARAMS = SystemParams(tau=0.01)
ZPF = SpectrumModel.zpf()
GAMMA = PARAMS.damping_rate


def oscillator_ensemble(n_members=24, n=1 << 18, dt=0.1, seed=77, omega_cut=20.0):
    grid = GridSpec(dt=dt, n_samples=n, omega_cut=omega_cut, seed=seed)
    for k in range(n_members):
        f = synthesize_field(ZPF, PARAMS, grid, member_seed(seed, k))
        yield simulate_oscillator(PARAMS, f)


def test_periodogram_tone_power():
    dt, n = 0.1, 1 << 14
    t = np.arange(n) * dt
    a, w0 = 1.7, 1.0
    est = periodogram(a * np.cos(w0 * t), dt, segment_length=n // 8)
    assert est.band_power() == pytest.approx(a ** 2 / 2.0, rel=0.02)


def test_periodogram_parseval():
    rng = np.random.default_rng(3)
    dt, n = 0.1, 1 << 14
    x = synthesize_series(lambda w: w ** 2, dt, n, 20.0, rng)
    est = periodogram(x, dt, segment_length=n // 8)
    assert est.band_power() == pytest.approx(x.var(), rel=0.01)


def test_periodogram_white_spectrum_flat():
    # tabulated white spectrum: every band within 5% after 64 averages
    grid = GridSpec(dt=0.1, n_samples=1 << 13, omega_cut=20.0, seed=8)
    acc = None
    for k in range(64):
        rng = np.random.default_rng(member_seed(8, k))
        x = synthesize_series(lambda w: np.ones_like(w), grid.dt,
                              grid.n_samples, grid.omega_cut, rng)
        est = periodogram(x, grid.dt)
        acc = est.values if acc is None else acc + est.values
        omega = est.omega
    mean_spec = acc / 64
    sel = omega <= 20.0
    edges = np.linspace(0.5, 20.0, 14)
    for a, b in zip(edges[:-1], edges[1:]):
        band = (omega >= a) & (omega < b)
        assert abs(np.mean(mean_spec[band]) - 1.0) < 0.05


def test_periodogram_segment_guard():
    with pytest.raises(SegmentTooLong):
        periodogram(np.zeros(100), 0.1, segment_length=200)


def test_correlation_lag_zero_is_variance():
    rng = np.random.default_rng(0)
    x = rng.standard_normal(4096)
    series = correlation(x, x, 5.0, 0.1)
    assert series.values[0] == pytest.approx(x.var(), rel=1e-12)
    assert series.n_eff[0] == x.size


def test_correlation_lag_guard():
    with pytest.raises(LagTooLong):
        correlation(np.zeros(1000), np.zeros(1000), 20.0, 0.1)


def test_position_autocorrelation_matches_closed_form():
    # <x(0)x(t)> = 0.5 cos(t) exp(-tau t/2) within 5% of C(0) up to t = 200
    acc = None
    count = 0
    for traj in oscillator_ensemble(n_members=32):
        c = correlation(traj.x, traj.x, 200.0, traj.dt)
        acc = c.values if acc is None else acc + c.values
        count += 1
        lags = c.lags
    mean_c = acc / count
    ref = 0.5 * np.cos(lags) * np.exp(-GAMMA * lags)
    assert np.max(np.abs(mean_c - ref)) < 0.05 * 0.5


def test_cross_correlation_sign_convention():
    """<x(t) p(t+u)> ramps negative: the paper's printed sin(w0(t-t'))
    evaluated at (t, t') = (0, u) is -sin(w0 u); with the lag on the first
    argument the sign flips."""
    acc_xp = None
    count = 0
    for traj in oscillator_ensemble(n_members=16):
        cxp = correlation(traj.x, traj.p, 30.0, traj.dt)
        cpx = correlation(traj.p, traj.x, 30.0, traj.dt)
        if acc_xp is None:
            acc_xp, acc_px = cxp.values.copy(), cpx.values.copy()
        else:
            acc_xp += cxp.values
            acc_px += cpx.values
        count += 1
        lags = cxp.lags
    mean_xp = acc_xp / count
    mean_px = acc_px / count
    ref = -0.5 * np.sin(lags) * np.exp(-GAMMA * lags)
    assert np.max(np.abs(mean_xp - ref)) < 0.05 * 0.5
    assert np.max(np.abs(mean_px + ref)) < 0.05 * 0.5
    # odd: zero at zero lag within the sampling band
    assert abs(mean_xp[0]) < 0.02


def test_commutator_auto_is_odd_and_zero_at_origin():
    rng = np.random.default_rng(12)
    x = synthesize_series(lambda w: w ** 2, 0.1, 1 << 14, 20.0, rng)
    c = commutator(x, x, 50.0, 0.1)
    assert c.values[0] == 0.0


def test_commutator_routes_agree_on_oscillator():
    spec_acc = None
    corr_pos = corr_neg = None
    count = 0
    for traj in oscillator_ensemble(n_members=24):
        est = periodogram(traj.x[: 1 << 17], traj.dt)
        cxx = correlation(traj.x[: 1 << 17], traj.x[: 1 << 17], 60.0, traj.dt)
        spec_acc = est.values if spec_acc is None else spec_acc + est.values
        corr_pos = cxx.values if corr_pos is None else corr_pos + cxx.values
        count += 1
        omega = est.omega
    from sedlab.estimators import SpectrumEstimate

    spec = SpectrumEstimate(omega=omega, values=spec_acc / count)
    c_spec = commutator_from_spectrum(spec, 50.0, 0.1)
    mean_corr = corr_pos / count
    two = np.concatenate([mean_corr[:0:-1], mean_corr])
    h = 2.0 * hilbert_transform(two)
    c_hilb = h[mean_corr.size - 1 : mean_corr.size - 1 + c_spec.values.size]

    ref = np.sin(c_spec.lags) * np.exp(-GAMMA * c_spec.lags)
    strong = np.abs(ref) > 0.3
    assert np.max(np.abs(c_spec.values[strong] - c_hilb[strong])) < 0.05


def test_equal_time_xp_commutator_is_hbar():
    acc = None
    count = 0
    for traj in oscillator_ensemble(n_members=24):
        c = commutator(traj.x, traj.p, 60.0, traj.dt, method="hilbert")
        acc = c.values if acc is None else acc + c.values
        count += 1
    c_xp0 = (acc / count)[0]
    assert c_xp0 == pytest.approx(1.0, rel=0.05)


def test_hilbert_transform_lorentzian_pair():
    # H[1/(1+t^2)](u) = u/(1+u^2) with the 1/(u-t) kernel
    dt = 0.02
    t = np.arange(-3000, 3001) * dt
    f = 1.0 / (1.0 + t ** 2)
    h = hilbert_transform(f)
    ref = t / (1.0 + t ** 2)
    core = np.abs(t) < 10.0
    assert np.max(np.abs(h[core] - ref[core])) < 0.01


def test_structure_function_zero_lag_and_white_noise():
    rng = np.random.default_rng(4)
    x = rng.standard_normal(1 << 16)
    out = structure_function(x, 1.0, [0.0, 1.0, 5.0])
    assert out[0] == 0.0
    # iid samples: <(x(t+d) - x(t))^2> = 2 var
    assert out[1] == pytest.approx(2.0, rel=0.02)
    assert out[2] == pytest.approx(2.0, rel=0.02)
    with pytest.raises(LagTooLong):
        structure_function(x, 1.0, [x.size / 5.0])


def test_windowed_energy_single_sample_limit():
    rng = np.random.default_rng(9)
    n = 1 << 17
    x = rng.normal(0.0, math.sqrt(0.5), n)
    p = rng.normal(0.0, math.sqrt(0.5), n)
    stats = windowed_energy(x, p, PARAMS, 0.1, 0.1)
    assert stats.t_window == 0.1
    assert stats.mean == pytest.approx(0.5, rel=0.02)
    assert stats.dispersion == pytest.approx(0.5, rel=0.02)


def test_windowed_energy_mean_stable_for_any_window():
    rng = np.random.default_rng(10)
    n = 1 << 16
    x = rng.normal(0.0, math.sqrt(0.5), n)
    p = rng.normal(0.0, math.sqrt(0.5), n)
    for t_window in (1.0, 10.0, 100.0):
        stats = windowed_energy(x, p, PARAMS, t_window, 0.1)
        assert stats.mean == pytest.approx(0.5, rel=0.03)


def test_windowed_energy_guard():
    with pytest.raises(WindowTooLong):
        windowed_energy(np.zeros(1000), np.zeros(1000), PARAMS, 50.0, 0.1)


def test_moments_histogram_normal_calibration():
    rng = np.random.default_rng(11)
    x = rng.standard_normal(1 << 16)
    from scipy.special import erf

    cdf = lambda s: 0.5 * (1.0 + erf(s / math.sqrt(2.0)))
    rep = moments_and_histogram(x, 50, reference_cdf=cdf)
    assert rep.ks_distance < ks_critical(x.size)
    assert abs(rep.excess_kurtosis) < 0.05
    assert rep.variance == pytest.approx(1.0, rel=0.02)
    # histogram is density-normalized
    widths = np.diff(rep.hist_edges)
    assert np.sum(rep.hist_density * widths) == pytest.approx(1.0, rel=1e-12)


def test_moments_histogram_guards():
    with pytest.raises(EmptySeries):
        moments_and_histogram(np.array([]), 10)
    with pytest.raises(InvalidParams):
        moments_and_histogram(np.ones(100), 5)


def test_ks_distance_detects_wrong_scale():
    rng = np.random.default_rng(13)
    x = rng.normal(0.0, 2.0, 1 << 14)
    from scipy.special import erf

    cdf = lambda s: 0.5 * (1.0 + erf(s / math.sqrt(2.0)))
    assert ks_distance(x, cdf) > 10.0 * ks_critical(x.size)


def test_write_series_csv(tmp_path):
    path = tmp_path / "series.csv"
    write_series_csv(path, "lag", [0.0, 0.1], [1.0, 2.0], [0.01, 0.02])
    with open(path) as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["lag", "value", "stderr"]
    assert float(rows[2][1]) == 2.0


def test_two_sided_correlation_symmetry_for_auto():
    rng = np.random.default_rng(14)
    x = rng.standard_normal(1 << 12)
    lags, values = two_sided_correlation(x, x, 10.0, 1.0)
    mid = lags.size // 2
    assert np.allclose(values[mid + 1 :], values[:mid][::-1])
    assert lags[mid] == 0.0
