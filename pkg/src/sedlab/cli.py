"""Batch command-line entry point.

Subcommands: ``list`` (scenario names), ``run`` (one scenario to a report),
``verify`` (full acceptance suite), ``analytic`` (closed forms without
simulation).  Exit codes: 0 success, 1 acceptance/report failure,
2 configuration error.  Reports are canonical JSON (stable key order,
runtime excluded) so identical (scenario, config, seed) runs are
byte-identical for any ``--jobs`` value.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
from pathlib import Path

from . import analytic
from .core import GridSpec, SystemParams
from .errors import SedlabError
from .experiments import SCENARIO_NAMES, run_scenario, scenario_defaults

_PARAM_KEYS = {f.name for f in dataclasses.fields(SystemParams)}
_GRID_KEYS = {f.name for f in dataclasses.fields(GridSpec)}
_META_KEYS = {"scenario", "seed", "out", "emit", "jobs"}

_EMIT_CHOICES = ("report", "trajectories", "spectra")


class ConfigError(Exception):
    pass


def _load_config(path) -> dict:
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config must be a flat JSON object")
    unknown = set(data) - _PARAM_KEYS - _GRID_KEYS - _META_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
    return data


def _resolve(scenario: str, file_cfg: dict, args) -> tuple[SystemParams, GridSpec, dict]:
    params, grid = scenario_defaults(scenario)
    pd = dataclasses.asdict(params)
    gd = dataclasses.asdict(grid)
    for key, val in file_cfg.items():
        if key in _PARAM_KEYS:
            pd[key] = val
        elif key in _GRID_KEYS:
            gd[key] = val
    if "seed" in file_cfg:
        gd["seed"] = int(file_cfg["seed"])
    if args.seed is not None:
        gd["seed"] = args.seed
    jobs = args.jobs
    if jobs is None:
        jobs = file_cfg.get("jobs", int(os.environ.get("SEDLAB_JOBS", "1")))
    meta = {
        "out": args.out or file_cfg.get("out") or "sedlab_out",
        "emit": tuple(args.emit) if args.emit else tuple(file_cfg.get("emit", ["report"])),
        "jobs": int(jobs),
    }
    for flag in meta["emit"]:
        if flag not in _EMIT_CHOICES:
            raise ConfigError(f"unknown emit flag {flag!r}; valid: {_EMIT_CHOICES}")
    return SystemParams(**pd), GridSpec(**gd), meta


def _cmd_list(args) -> int:
    for name in SCENARIO_NAMES:
        print(name)
    return 0


def _cmd_run(args) -> int:
    file_cfg = _load_config(args.config) if args.config else {}
    scenario = args.scenario or file_cfg.get("scenario")
    if not scenario:
        raise ConfigError("no scenario given (use --scenario or a config file)")
    params, grid, meta = _resolve(scenario, file_cfg, args)

    out_dir = Path(meta["out"])
    report = run_scenario(
        scenario, params=params, grid=grid, jobs=meta["jobs"],
        out_dir=out_dir, emit=meta["emit"],
    )

    if "report" in meta["emit"]:
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / f"{scenario}_report.json").write_text(report.to_json())
        report.write_csv(out_dir / f"{scenario}_report.csv")

    for line in report.summary_lines():
        print(line)
    print(f"runtime: {report.runtime:.1f}s", file=sys.stderr)
    return 0 if report.all_passed else 1


def _cmd_verify(args) -> int:
    from .acceptance import run_all

    ok = run_all(jobs=args.jobs)
    print("acceptance suite:", "PASS" if ok else "FAIL")
    return 0 if ok else 1


def _cmd_analytic(args) -> int:
    params = SystemParams(
        tau=args.tau, omega0=args.omega0, kT=args.kT, K=args.K,
    )
    q = args.quantity
    if q == "ground_state":
        gs = analytic.ground_state(params)
        print(f"x_var={gs.x_var:g} p_var={gs.p_var:g} mean_energy={gs.mean_energy:g}")
    elif q == "heisenberg":
        print(f"x_var*p_var={analytic.heisenberg_product(params):g}")
    elif q == "commutators":
        c_xx, c_pp, c_xp = analytic.commutator_closed(params, args.t)
        print(f"c_xx({args.t:g})={float(c_xx):g} c_pp={float(c_pp):g} c_xp={float(c_xp):g}")
    elif q == "energy_fluctuation":
        ef = analytic.energy_fluctuation(params, args.t)
        print(f"recomputed={ef.recomputed:g} paper_printed={ef.paper_printed:g} "
              f"window_exact={ef.window_exact:g}")
    elif q == "dipoles":
        dp = analytic.dipole_prediction(params)
        print(f"x_plus_var={dp.x_plus_var:g} x_minus_var={dp.x_minus_var:g} "
              f"cross={dp.cross_cov:g} mean_H={dp.mean_H:.9g} "
              f"E_int_exact={dp.E_int_exact:g} E_int_paper_series={dp.E_int_paper_series:g}")
    elif q == "planck":
        pp = analytic.planck_prediction(params, params.kT)
        print(f"mean_energy={pp.mean_energy:.9g}")
    elif q == "free_particle":
        fp = analytic.free_particle(params, params.kT, args.t, args.omega_c)
        print(f"thermal_dx2={fp.thermal_dx2:g} thermal_v_var={fp.thermal_v_var:g} "
              f"zpf_dx2={fp.zpf_dx2:g} zpf_dv2={fp.zpf_dv2:g} "
              f"nonphysical={fp.zpf_dv2_nonphysical} electron_size={fp.electron_size:g}")
    else:
        raise ConfigError(f"unknown quantity {q!r}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sedlab",
        description="Zeropoint-field simulation scenarios and their closed-form checks.",
    )
    default_jobs = int(os.environ.get("SEDLAB_JOBS", "1"))
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("list", help="print scenario names").set_defaults(fn=_cmd_list)

    p_run = sub.add_parser("run", help="run one scenario and write its report")
    p_run.add_argument("--scenario", help="scenario name (see `sedlab list`)")
    p_run.add_argument("--config", help="flat JSON config file")
    p_run.add_argument("--seed", type=int, default=None)
    p_run.add_argument("--out", help="output directory (default sedlab_out)")
    p_run.add_argument("--emit", nargs="+", metavar="KIND",
                       help="artifacts to write: report trajectories spectra")
    p_run.add_argument("--jobs", type=int, default=None,
                       help="worker threads (default: config file, then "
                            "SEDLAB_JOBS, then 1); never changes results")
    p_run.set_defaults(fn=_cmd_run)

    p_ver = sub.add_parser("verify", help="run the full acceptance suite")
    p_ver.add_argument("--jobs", type=int, default=default_jobs)
    p_ver.set_defaults(fn=_cmd_verify)

    p_ana = sub.add_parser("analytic", help="print closed forms, no simulation")
    p_ana.add_argument("--quantity", required=True,
                       choices=["ground_state", "heisenberg", "commutators",
                                "energy_fluctuation", "dipoles", "planck",
                                "free_particle"])
    p_ana.add_argument("--tau", type=float, default=0.01)
    p_ana.add_argument("--omega0", type=float, default=1.0)
    p_ana.add_argument("--kT", type=float, default=0.0)
    p_ana.add_argument("--K", type=float, default=0.0)
    p_ana.add_argument("--t", type=float, default=1.0,
                       help="lag or window length for time-dependent forms")
    p_ana.add_argument("--omega-c", dest="omega_c", type=float, default=500.0)
    p_ana.set_defaults(fn=_cmd_analytic)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (ConfigError, SedlabError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
