"""Physical parameters, internal unit system, and grid configuration.

Internal units are hbar = m = omega0 = 1 by default.  All driving enters
through the reduced field eps(t) = e*E(t)/m, so the charge e and the light
speed c never appear in the simulation hot path; the radiation-damping time
tau is the single small parameter.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace

from .errors import InvalidParams

#: tau*omega0 above this value emits a warning (the small-parameter
#: expansion is getting doubtful), above TAU_OMEGA_REJECT it is rejected.
TAU_OMEGA_WARN = 0.1
TAU_OMEGA_REJECT = 0.5

#: Burn-in, in units of the amplitude relaxation time 2/(tau*omega0^2):
#: five e-folds of the slowest decay.
BURN_IN_EFOLDS = 5.0


@dataclass(frozen=True)
class SystemParams:
    """Physical parameters of one charged-particle system.

    Parameters
    ----------
    hbar, m : float
        Action scale and particle mass (internal defaults 1).
    omega0 : float
        Natural angular frequency; 0 selects the free particle.
    tau : float
        Radiation-damping time, tau*omega0 << 1 required.
    kT : float
        Temperature in energy units; 0 means pure zeropoint driving.
    K : float
        Dipole coupling (units of m*omega0^2); 0 unless the two-dipole
        scenario is run.
    e, c : float or None
        Charge and light speed, used only for order-of-magnitude checks.
        When both are given they must satisfy tau = 2 e^2 / (3 m c^3);
        when only e is given, c is derived from that relation.
    """

    hbar: float = 1.0
    m: float = 1.0
    omega0: float = 1.0
    tau: float = 0.01
    kT: float = 0.0
    K: float = 0.0
    e: float | None = None
    c: float | None = None

    @property
    def damping_rate(self) -> float:
        """Amplitude decay rate gamma = tau*omega0^2/2 (pole of the response)."""
        return 0.5 * self.tau * self.omega0 ** 2

    def mode_params(self, sign: int) -> "SystemParams":
        """Parameters of one dipole normal mode, omega_pm^2 = omega0^2 -+ K/m."""
        w2 = self.omega0 ** 2 - sign * self.K / self.m
        if w2 <= 0.0:
            raise InvalidParams(
                [f"normal mode frequency imaginary: omega0^2 - ({sign:+d})K/m = {w2}"]
            )
        return replace(self, omega0=math.sqrt(w2), K=0.0)


@dataclass(frozen=True)
class GridSpec:
    """Sampling grid and ensemble bookkeeping for one run.

    omega_cut is the ultraviolet cutoff of the synthesis band (default
    5/tau so position statistics capture the tau-dependent tail);
    omega_v_cut is the separate, much lower cutoff used when velocity
    statistics are compared to their (cutoff-dependent) closed forms.
    """

    dt: float = 0.1
    n_samples: int = 1 << 20
    omega_cut: float | None = None
    omega_v_cut: float | None = None
    n_ensemble: int = 64
    seed: int = 202608

    @property
    def duration(self) -> float:
        return self.dt * self.n_samples

    @property
    def domega(self) -> float:
        """Synthesis lattice spacing 2*pi/(n*dt)."""
        return 2.0 * math.pi / self.duration


@dataclass(frozen=True)
class Config:
    """Validated (params, grid) pair with defaults resolved; immutable."""

    params: SystemParams
    grid: GridSpec


def resolve_defaults(params: SystemParams, grid: GridSpec) -> tuple[SystemParams, GridSpec]:
    """Fill in derived quantities: omega_cut, omega_v_cut, and c from e."""
    if grid.omega_cut is None:
        grid = replace(grid, omega_cut=5.0 / params.tau)
    if grid.omega_v_cut is None:
        grid = replace(grid, omega_v_cut=5.0 * params.omega0 if params.omega0 > 0 else grid.omega_cut)
    if params.e is not None and params.c is None:
        c = (2.0 * params.e ** 2 / (3.0 * params.m * params.tau)) ** (1.0 / 3.0)
        params = replace(params, c=c)
    return params, grid


def validate(params: SystemParams, grid: GridSpec) -> Config:
    """Check every invariant and return the validated configuration.

    Raises
    ------
    InvalidParams
        Listing *every* violated invariant, not just the first.
    """
    violations = []

    if not params.hbar > 0:
        violations.append(f"hbar must be > 0, got {params.hbar}")
    if not params.m > 0:
        violations.append(f"m must be > 0, got {params.m}")
    if params.omega0 < 0:
        violations.append(f"omega0 must be >= 0, got {params.omega0}")
    if not params.tau > 0:
        violations.append(f"tau must be > 0, got {params.tau}")
    if params.kT < 0:
        violations.append(f"kT must be >= 0, got {params.kT}")

    tw = params.tau * params.omega0
    if tw >= TAU_OMEGA_REJECT:
        violations.append(
            f"tau*omega0 = {tw:g} exceeds the hard limit {TAU_OMEGA_REJECT}"
        )
    elif tw > TAU_OMEGA_WARN:
        warnings.warn(
            f"tau*omega0 = {tw:g} above the soft limit {TAU_OMEGA_WARN}; "
            "corrections of order tau*omega0 are no longer small",
            stacklevel=2,
        )

    if params.K != 0.0 and not abs(params.K) < params.m * params.omega0 ** 2:
        violations.append(
            f"|K| = {abs(params.K):g} must be < m*omega0^2 = "
            f"{params.m * params.omega0 ** 2:g} (real normal modes)"
        )

    if params.e is not None and params.c is not None and params.c > 0:
        tau_ec = 2.0 * params.e ** 2 / (3.0 * params.m * params.c ** 3)
        if abs(tau_ec - params.tau) > 1e-12 * params.tau:
            violations.append(
                f"tau = {params.tau!r} inconsistent with 2e^2/(3mc^3) = {tau_ec!r}"
            )

    params, grid = resolve_defaults(params, grid)

    if not grid.dt > 0:
        violations.append(f"dt must be > 0, got {grid.dt}")
    if grid.n_samples < 2:
        violations.append(f"n_samples must be >= 2, got {grid.n_samples}")
    if grid.n_ensemble < 1:
        violations.append(f"n_ensemble must be >= 1, got {grid.n_ensemble}")

    if grid.dt > 0:
        prod = grid.dt * grid.omega_cut
        if prod > math.pi * (1.0 + 1e-12):
            violations.append(
                f"Nyquist violated: dt*omega_cut = {prod:g} > pi"
            )
        if params.omega0 > 0:
            need = 100.0 * 2.0 * math.pi / params.omega0
            if grid.duration < need:
                violations.append(
                    f"duration {grid.duration:g} < 100 periods = {need:g} "
                    "(long-run stationarity)"
                )
        if grid.omega_cut <= params.omega0:
            violations.append(
                f"omega_cut = {grid.omega_cut:g} must exceed omega0 = {params.omega0:g}"
            )

    if violations:
        raise InvalidParams(violations)
    return Config(params=params, grid=grid)


def burn_in_samples(params: SystemParams, dt: float) -> int:
    """Samples discarded before statistics: 10/(tau*omega0^2) time units."""
    if params.omega0 <= 0:
        return 0
    t_burn = 2.0 * BURN_IN_EFOLDS / (params.tau * params.omega0 ** 2)
    return int(math.ceil(t_burn / dt))
