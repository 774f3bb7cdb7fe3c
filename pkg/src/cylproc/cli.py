"""Batch command-line front end.

Subcommands evaluate closed forms, run estimator suites, compare the two,
export simulated realizations, and solve design problems.  All inputs come
from one JSON config; every command is deterministic given (config, seed,
workers).  Exit codes: 0 success, 1 usage or config error, 2 statistical
comparison failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import analytic, estimate
from .euclid import Direction
from .model import ProcessSpec, spec_from_dict
from .optimize import DesignProblem, solve_radius_law, solution_to_json, verify_solution
from .sim import Window, export_realization_csv, sample_realization


class ConfigError(ValueError):
    pass


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def _check_keys(doc: dict, path: str, required: tuple, optional: tuple = ()):
    for key in required:
        if key not in doc:
            raise ConfigError(f"{path}: missing required field '{key}'")
    for key in doc:
        if key not in required and key not in optional:
            raise ConfigError(f"{path}: unknown field '{key}'")


def _load_config(path: str) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError("config root must be a JSON object")
    return doc


def _parse_spec(config: dict) -> ProcessSpec:
    if "spec" not in config:
        raise ConfigError("config: missing required field 'spec'")
    try:
        spec = spec_from_dict(config["spec"])
    except (ValueError, TypeError) as exc:
        raise ConfigError(str(exc)) from exc
    try:
        spec.require_positive_volume()
    except ValueError as exc:
        raise ConfigError(f"spec: {exc}") from exc
    return spec


def _parse_window(config: dict) -> Window:
    if "window" not in config:
        raise ConfigError("config: missing required field 'window'")
    doc = dict(config["window"])
    _check_keys(doc, "window", ("lo", "hi"))
    try:
        return Window(tuple(doc["lo"]), tuple(doc["hi"]))
    except ValueError as exc:
        raise ConfigError(f"window: {exc}") from exc


def _write(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

_ANALYTIC_KEYS = ("lags", "spherical_radii", "linear_radii", "linear_eta", "pore_moments")


def cmd_analytic(config: dict, args) -> int:
    spec = _parse_spec(config)
    section = dict(config.get("analytic", {}))
    _check_keys(section, "analytic", (), _ANALYTIC_KEYS)
    rows: list[tuple[str, float]] = []
    rows.append(("volume_fraction", analytic.volume_fraction(spec)))
    rows.append(("specific_surface", analytic.specific_surface(spec)))
    for h in section.get("lags", []):
        rows.append((f"covariance[{','.join(_fmt(float(x)) for x in h)}]",
                     analytic.covariance(spec, np.asarray(h, dtype=float))))
    for r in section.get("spherical_radii", []):
        rows.append((f"spherical_cdf[r={_fmt(float(r))}]", analytic.spherical_cdf(spec, float(r))))
    if section.get("linear_radii"):
        if "linear_eta" not in section:
            raise ConfigError("analytic: 'linear_radii' requires 'linear_eta'")
        eta = Direction(section["linear_eta"])
        for r in section["linear_radii"]:
            rows.append((f"linear_cdf[r={_fmt(float(r))}]", analytic.linear_cdf(spec, eta, float(r))))
    if section.get("pore_moments"):
        if spec.d != 3 or spec.k != 1:
            raise ConfigError("analytic.pore_moments: pore moments apply to axial cylinders in R^3")
        pm = analytic.pore_moments(spec.intensity, spec.base.mean_boundary)
        rows += [("pore_mean", pm.mean), ("pore_second_moment", pm.second_moment),
                 ("pore_variance", pm.variance)]
    out = Path(args.out)
    _write(out / "analytic.csv", "name,value\n" + "".join(f"{n},{_fmt(v)}\n" for n, v in rows))
    _write(out / "analytic.json", json.dumps({n: v for n, v in rows}, indent=2))
    for n, v in rows:
        print(f"{n} = {_fmt(v)}")
    return 0


_EST_KEYS = ("quantities", "n_points", "n_replicates", "lags", "radii", "eta",
             "n_rays", "n_lines", "probe_length", "step", "n_dirs", "richardson")


def _run_estimators(config: dict, args) -> list[estimate.EstimateReport]:
    spec = _parse_spec(config)
    window = _parse_window(config)
    section = dict(config.get("estimate", {}))
    _check_keys(section, "estimate", ("quantities",), _EST_KEYS)
    n_points = int(section.get("n_points", 100_000))
    n_reps = int(section.get("n_replicates", 50))
    reports: list[estimate.EstimateReport] = []
    for quantity in section["quantities"]:
        if quantity == "volume_fraction":
            reports.append(estimate.est_volume_fraction(
                spec, window, n_points, n_reps, args.seed, args.workers))
        elif quantity == "covariance":
            if "lags" not in section:
                raise ConfigError("estimate: 'covariance' requires 'lags'")
            reports += estimate.est_covariance(
                spec, window, section["lags"], n_points, n_reps, args.seed, args.workers)
        elif quantity == "spherical_cdf":
            if "radii" not in section:
                raise ConfigError("estimate: 'spherical_cdf' requires 'radii'")
            reports += estimate.est_spherical_cdf(
                spec, window, section["radii"], n_points, n_reps, args.seed, args.workers)
        elif quantity == "linear_cdf":
            if "radii" not in section or "eta" not in section:
                raise ConfigError("estimate: 'linear_cdf' requires 'radii' and 'eta'")
            reports += estimate.est_linear_cdf(
                spec, window, Direction(section["eta"]), section["radii"],
                int(section.get("n_rays", n_points)), n_reps, args.seed, args.workers)
        elif quantity == "surface_linescan":
            reports.append(estimate.est_specific_surface_linescan(
                spec, window, int(section.get("n_lines", n_points)), n_reps,
                args.seed, args.workers, section.get("probe_length")))
        elif quantity == "surface_covderiv":
            reports.append(estimate.est_specific_surface_covderiv(
                spec, window, float(section.get("step", 0.02)), int(section.get("n_dirs", 32)),
                n_points, n_reps, args.seed, args.workers,
                richardson=bool(section.get("richardson", False))))
        else:
            raise ConfigError(f"estimate.quantities: unknown quantity '{quantity}'")
    return reports


def _emit_reports(reports, args) -> None:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    estimate.reports_to_csv(reports, out / "reports.csv")
    _write(out / "reports.json", estimate.reports_to_json(reports))
    for rep in reports:
        z = "" if rep.z_score is None else f"  z={_fmt(rep.z_score)}"
        ana = "" if rep.analytic is None else f"  analytic={_fmt(rep.analytic)}"
        print(f"{rep.name}: {_fmt(rep.estimate)} +- {_fmt(rep.std_error)}{ana}{z}")


def cmd_estimate(config: dict, args) -> int:
    _emit_reports(_run_estimators(config, args), args)
    return 0


def cmd_compare(config: dict, args) -> int:
    reports = _run_estimators(config, args)
    _emit_reports(reports, args)
    worst = max((abs(r.z_score) for r in reports if r.z_score is not None), default=0.0)
    print(f"worst |z| = {_fmt(worst)} (threshold {_fmt(args.z_threshold)})")
    return 0 if worst <= args.z_threshold else 2


def cmd_simulate(config: dict, args) -> int:
    spec = _parse_spec(config)
    window = _parse_window(config)
    section = dict(config.get("simulate", {}))
    _check_keys(section, "simulate", ())
    real = sample_realization(spec, window, args.seed)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    export_realization_csv(real, out / "realization.csv")
    print(f"{real.n_cylinders()} cylinders hit the window (seed {args.seed})")
    return 0


def cmd_optimize(config: dict, args) -> int:
    if "optimize" not in config:
        raise ConfigError("config: missing required field 'optimize'")
    section = dict(config["optimize"])
    _check_keys(section, "optimize", ("lambda", "epsilon", "r_max"), ("n_verify",))
    try:
        prob = DesignProblem(float(section["lambda"]), float(section["epsilon"]),
                             float(section["r_max"]))
        sol = solve_radius_law(prob)
    except ValueError as exc:
        raise ConfigError(f"optimize: {exc}") from exc
    n_verify = int(section.get("n_verify", 0))
    certified = True
    if n_verify > 0:
        certified = verify_solution(prob, sol, n_verify, args.seed)
    out = Path(args.out)
    _write(out / "solution.json", solution_to_json(sol))
    print(f"optimal radius law: mass {_fmt(1.0 - sol.q)} at 0, {_fmt(sol.q)} at {_fmt(prob.r_max)}")
    print(f"achieved volume fraction p = {_fmt(sol.achieved_p)}; Var H = {_fmt(sol.var_h)} "
          f"<= eps = {_fmt(prob.eps)}: {sol.achieved_var_bound_satisfied}")
    if n_verify > 0:
        print(f"random-search certificate ({n_verify} laws): {'ok' if certified else 'FAILED'}")
    return 0 if certified else 2


_COMMANDS = {
    "analytic": cmd_analytic,
    "estimate": cmd_estimate,
    "compare": cmd_compare,
    "simulate": cmd_simulate,
    "optimize": cmd_optimize,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cylproc",
        description="Poisson cylinder processes: closed forms, simulation, estimation, design.",
    )
    parser.add_argument("command", choices=sorted(_COMMANDS))
    parser.add_argument("--config", required=True, help="path to the JSON run configuration")
    parser.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    parser.add_argument("--workers", type=int, default=1, help="replicate-level workers")
    parser.add_argument("--out", default=".", help="output directory")
    parser.add_argument("--z-threshold", type=float, default=4.0,
                        help="compare: largest acceptable |z| (default 4)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = _load_config(args.config)
        return _COMMANDS[args.command](config, args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
