import json
import math

import numpy as np
import pytest

from sedlab.core import GridSpec, SystemParams
from sedlab.errors import GridTooCoarse
from sedlab.estimators import periodogram
from sedlab.noise import (
    dump_realization,
    member_rng,
    member_seed,
    synthesize_field,
    synthesize_pair,
    synthesize_series,
)
from sedlab.spectra import SpectrumModel, field_spectrum

PARAMS = SystemParams(tau=0.01)
GRID = GridSpec(dt=0.1, n_samples=1 << 16, omega_cut=20.0, seed=1234)
ZPF = SpectrumModel.zpf()


def test_zero_spectrum_gives_zero_samples():
    rng = member_rng(0, 0)
    x = synthesize_series(lambda w: np.zeros_like(w), 0.1, 4096, 10.0, rng)
    assert np.all(x == 0.0)


def test_sample_variance_matches_band_integral():
    # integral of tau w^3 / pi over [0, 20] = tau * 20^4 / (4 pi)
    target = PARAMS.tau * 20.0 ** 4 / (4.0 * math.pi)
    assert target == pytest.approx(127.32395447, rel=1e-9)
    variances = []
    for k in range(16):
        f = synthesize_field(ZPF, PARAMS, GRID, member_seed(GRID.seed, k))
        variances.append(f.samples.var())
    mean = np.mean(variances)
    sigma = np.std(variances, ddof=1) / math.sqrt(len(variances))
    assert abs(mean - target) < 3.0 * sigma + 0.01 * target


def test_sample_mean_near_zero():
    f = synthesize_field(ZPF, PARAMS, GRID, 5)
    sigma = f.samples.std()
    assert abs(f.samples.mean()) < 5.0 * sigma / math.sqrt(f.n_samples) + 1e-12


def test_fixed_seed_is_bit_identical():
    a = synthesize_field(ZPF, PARAMS, GRID, 42)
    b = synthesize_field(ZPF, PARAMS, GRID, 42)
    assert np.array_equal(a.samples, b.samples)


def test_member_seeds_independent_of_generation_order():
    direct = member_rng(99, 3).standard_normal(8)
    # generating members 0..2 first must not change member 3
    for k in range(3):
        member_rng(99, k).standard_normal(8)
    again = member_rng(99, 3).standard_normal(8)
    assert np.array_equal(direct, again)


def test_periodogram_expectation_matches_target():
    acc = None
    for k in range(64):
        f = synthesize_field(ZPF, PARAMS, GRID, member_seed(7, k))
        est = periodogram(f.samples, GRID.dt)
        acc = est.values if acc is None else acc + est.values
        omega = est.omega
    mean_spec = acc / 64
    target = field_spectrum(ZPF, PARAMS, omega)
    lo, hi = 0.5, 10.0
    edges = np.geomspace(lo, hi, 13)
    for a, b in zip(edges[:-1], edges[1:]):
        sel = (omega >= a) & (omega < b)
        ratio = mean_spec[sel].sum() / target[sel].sum()
        assert abs(ratio - 1.0) < 0.05


def test_samples_are_gaussian():
    from scipy import stats

    f = synthesize_field(ZPF, PARAMS, GRID, 2024)
    _, p = stats.normaltest(f.samples)
    assert p >= 1e-3
    assert abs(stats.kurtosis(f.samples)) < 0.05


def test_pair_cross_correlation_within_band():
    pair = synthesize_pair(ZPF, PARAMS, GRID, 31)
    e1 = pair.eps1.samples - pair.eps1.samples.mean()
    e2 = pair.eps2.samples - pair.eps2.samples.mean()
    n = e1.size
    rho = float(e1 @ e2) / n / (e1.std() * e2.std())
    # effective sample count for the broadband field is close to n
    assert abs(rho) < 5.0 / math.sqrt(n / 20.0)


def test_pair_modes_preserve_variance():
    pair = synthesize_pair(ZPF, PARAMS, GRID, 31)
    target = PARAMS.tau * 20.0 ** 4 / (4.0 * math.pi)
    for real in (pair.eps_plus, pair.eps_minus):
        assert abs(real.samples.var() - target) / target < 0.10


def test_pair_mode_sum_identity():
    pair = synthesize_pair(ZPF, PARAMS, GRID, 31)
    lhs = pair.eps_plus.samples + pair.eps_minus.samples
    rhs = math.sqrt(2.0) * pair.eps1.samples
    assert np.max(np.abs(lhs - rhs)) < 1e-10 * pair.eps1.samples.std()


def test_grid_too_coarse_for_resonance():
    short = GridSpec(dt=0.1, n_samples=1 << 12, omega_cut=20.0)
    with pytest.raises(GridTooCoarse):
        synthesize_field(ZPF, PARAMS, short, 1)


def test_derivative_series_consistency():
    # derivative of a pure lattice tone: check against finite differences
    rng = member_rng(5, 0)
    dt, n = 0.05, 4096
    x, v = synthesize_series(lambda w: np.ones_like(w), dt, n, 5.0, rng,
                             derivative=True)
    central = (x[2:] - x[:-2]) / (2.0 * dt)
    # band-limited to 5 rad/s; second-order differences are accurate to (w dt)^2/6
    assert np.max(np.abs(central - v[1:-1])) < 0.011 * np.max(np.abs(v))


def test_dump_realization_roundtrip(tmp_path):
    f = synthesize_field(ZPF, PARAMS, GRID, 77)
    dump_realization(tmp_path / "field", f.samples, f.dt, 77, f.model.label())
    raw = np.frombuffer((tmp_path / "field.bin").read_bytes(), dtype="<f8")
    assert np.array_equal(raw, f.samples)
    meta = json.loads((tmp_path / "field.json").read_text())
    assert meta["dt"] == f.dt
    assert meta["n"] == f.n_samples
    assert meta["model"] == "zpf"
