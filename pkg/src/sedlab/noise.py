"""Stationary Gaussian field synthesis on the discrete-transform lattice.

A realization is a harmonic superposition on the exact FFT lattice
omega_j = j * 2*pi/(n*dt), j = 1..J:

    eps(t) = sum_j sqrt(S(omega_j) * domega) * (a_j cos omega_j t + b_j sin omega_j t)

with a_j, b_j independent standard normals, so the sample variance matches
the integral of the one-sided spectrum over the synthesis band and the
expectation of the lattice periodogram equals S(omega_j) exactly.  The
realized process is periodic with period n*dt; lag statistics downstream
are therefore restricted to |lag| <= n*dt/10.

The j = 0 mode is always excluded, which is what makes infrared-divergent
free-particle spectra (S_x ~ 1/omega) usable: structure functions remain
finite on the lattice while the raw variance never sees the missing band.

Seed splitting: the sub-seed of ensemble member k is a pure function of
(master seed, k) via numpy's SeedSequence spawn keys, so members can be
generated in any order, on any number of workers, with identical results.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .core import GridSpec, SystemParams
from .errors import GridTooCoarse, InvalidParams
from .spectra import SpectrumModel, field_spectrum


def member_seed(master_seed: int, k: int) -> np.random.SeedSequence:
    """Sub-seed of ensemble member k; pure function of (master_seed, k)."""
    return np.random.SeedSequence(master_seed, spawn_key=(k,))


def member_rng(master_seed: int, k: int) -> np.random.Generator:
    return np.random.default_rng(member_seed(master_seed, k))


@dataclass(frozen=True)
class FieldRealization:
    """One sampled reduced-field realization with its provenance."""

    dt: float
    samples: np.ndarray
    model: SpectrumModel
    seed: object
    omega_cut: float

    @property
    def n_samples(self) -> int:
        return self.samples.size

    @property
    def t_grid(self) -> np.ndarray:
        return np.arange(self.samples.size) * self.dt


def synthesize_series(
    spectrum,
    dt: float,
    n_samples: int,
    omega_cut: float,
    rng: np.random.Generator,
    derivative: bool = False,
):
    """Draw one realization of a Gaussian process with one-sided spectrum S.

    Parameters
    ----------
    spectrum : callable
        S(omega) evaluated on a 1-d array of lattice frequencies.
    derivative : bool
        Also return the exact time derivative (the same harmonic sum with
        coefficients multiplied by i*omega), consistent sample by sample.

    Returns
    -------
    ndarray, or (ndarray, ndarray) when ``derivative`` is set.
    """
    domega = 2.0 * math.pi / (n_samples * dt)
    j_max = int(math.floor(omega_cut / domega + 1e-9))
    j_max = min(j_max, n_samples // 2 - 1)
    if j_max < 1:
        raise InvalidParams([f"omega_cut {omega_cut:g} below the lattice spacing {domega:g}"])

    omegas = domega * np.arange(1, j_max + 1)
    svals = np.asarray(spectrum(omegas), dtype=float)
    if np.any(svals < 0):
        raise InvalidParams(["spectrum must be >= 0 on the synthesis band"])

    amp = np.sqrt(svals * domega)
    a = rng.standard_normal(j_max)
    b = rng.standard_normal(j_max)

    half = np.zeros(n_samples // 2 + 1, dtype=complex)
    # irfft convention: x_k = (1/n) * (c_0 + 2 * sum_j Re[c_j e^{2pi i jk/n}] + ...)
    half[1 : j_max + 1] = 0.5 * n_samples * amp * (a - 1j * b)
    x = np.fft.irfft(half, n_samples)
    if not derivative:
        return x
    half[1 : j_max + 1] *= 1j * omegas
    return x, np.fft.irfft(half, n_samples)


def _check_resonance_resolved(params: SystemParams, grid: GridSpec):
    if params.omega0 > 0:
        limit = params.tau * params.omega0 ** 2 / 4.0
        if grid.domega > limit:
            raise GridTooCoarse(
                f"lattice spacing {grid.domega:g} > tau*omega0^2/4 = {limit:g}; "
                "lengthen the trajectory to resolve the resonance"
            )


def synthesize_field(
    model: SpectrumModel,
    params: SystemParams,
    grid: GridSpec,
    seed,
) -> FieldRealization:
    """One reduced-field realization eps(t) on the grid.

    ``seed`` may be an int or a SeedSequence; identical seeds give
    bit-identical samples regardless of scheduling.
    """
    _check_resonance_resolved(params, grid)
    rng = np.random.default_rng(seed)
    samples = synthesize_series(
        lambda w: field_spectrum(model, params, w),
        grid.dt,
        grid.n_samples,
        grid.omega_cut,
        rng,
    )
    return FieldRealization(
        dt=grid.dt, samples=samples, model=model, seed=seed, omega_cut=grid.omega_cut
    )


@dataclass(frozen=True)
class FieldPair:
    """Two independent realizations and their sum/difference modes."""

    eps1: FieldRealization
    eps2: FieldRealization
    eps_plus: FieldRealization
    eps_minus: FieldRealization


def synthesize_pair(
    model: SpectrumModel,
    params: SystemParams,
    grid: GridSpec,
    seed,
) -> FieldPair:
    """Independent pair (eps1, eps2) plus eps_pm = (eps1 +- eps2)/sqrt(2).

    The pm combinations are statistically independent of each other and
    carry the same target spectrum as each input.
    """
    ss = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    sub1, sub2 = ss.spawn(2)
    f1 = synthesize_field(model, params, grid, sub1)
    f2 = synthesize_field(model, params, grid, sub2)
    root2 = math.sqrt(2.0)

    def combo(samples, tag):
        return FieldRealization(
            dt=grid.dt, samples=samples, model=model, seed=(seed, tag),
            omega_cut=grid.omega_cut,
        )

    return FieldPair(
        eps1=f1,
        eps2=f2,
        eps_plus=combo((f1.samples + f2.samples) / root2, "plus"),
        eps_minus=combo((f1.samples - f2.samples) / root2, "minus"),
    )


def dump_realization(path, samples: np.ndarray, dt: float, seed, model_label: str,
                     extra: dict | None = None):
    """Write samples as little-endian float64 with a JSON sidecar."""
    path = Path(path)
    path.with_suffix(".bin").write_bytes(np.asarray(samples, dtype="<f8").tobytes())
    meta = {
        "dt": dt,
        "n": int(np.asarray(samples).size),
        "seed": repr(seed),
        "model": model_label,
        "dtype": "<f8",
    }
    if extra:
        meta.update(extra)
    path.with_suffix(".json").write_text(json.dumps(meta, sort_keys=True, indent=2))
