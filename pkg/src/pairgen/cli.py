"""Command-line harness: ``pairgen simulate | compare | sweep | design``.

Exit codes: 0 success, 2 invalid input, 3 integration failure, 4 a
comparison outside tolerance.
"""
from __future__ import annotations

import argparse
import itertools
import json
import math
import os
import sys
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import analytic, design as design_mod, scenarios
from .analytic import PairGenParams
from .fock import FockError
from .lindblad import AccuracyError, IntegrationError
from .serialize import (DESIGN_SCHEMA, RESULT_SCHEMA, SCENARIO_SCHEMA, SWEEP_SCHEMA,
                        SchemaError, config_from_dict, config_to_dict, dumps, state_to_dict,
                        write_csv)

__all__ = ["main", "build_parser", "EXIT_OK", "EXIT_INVALID", "EXIT_INTEGRATION",
           "EXIT_TOLERANCE", "simulate_table", "sweep_table"]

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_INTEGRATION = 3
EXIT_TOLERANCE = 4

BASE_COLUMNS = ("t", "n_plus", "n_minus", "p0", "p1", "p2", "pump_db")
COMPARED = ("n_plus", "n_minus", "p1", "p2")
MAX_AXIS_POINTS = 10_000


class InputError(ValueError):
    pass


# ---------------------------------------------------------------- config io

def _load_json(path: str) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc


def _write(out: str, text: str):
    if out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


# ---------------------------------------------------------------- simulate

def _pump_db(n_plus, reference):
    with np.errstate(divide="ignore"):
        return 10 * np.log10(reference / np.asarray(n_plus, dtype=float))


def _analytic_only_columns(config: scenarios.ScenarioConfig) -> dict[str, np.ndarray]:
    if config.kind.startswith("noon"):
        raise InputError("analytic_only: NOON kinds are available through 'sweep' (target 'noon')")
    p, t = config.params, config.times
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", analytic.WeakPumpWarning)
        p1 = np.asarray(analytic.p1_with_loss(t, p))
        p2 = np.asarray(analytic.p2_with_loss(t, p))
        return {"n_plus": np.asarray(analytic.pump_photon_number(t, p)),
                "n_minus": np.asarray(analytic.n_minus_perturbative(t, p)),
                "p0": 1 - p1 - p2, "p1": p1, "p2": p2}


def simulate_table(doc: dict, compare: bool = False):
    """Evaluate a scenario document.

    Returns ``(columns, values, report, series)`` where ``values`` maps each
    column name to an array; ``report`` is None unless comparing.
    """
    config = config_from_dict(doc)
    compare = compare or bool(doc.get("compare", False))
    reference = config.params.alpha0_sq * (2 if config.kind.startswith("noon") else 1)
    if doc.get("analytic_only", False):
        values = _analytic_only_columns(config)
        series, report, curves = None, None, {}
    elif compare:
        series, report = scenarios.run_and_compare(config)
        values = dict(series.observables)
        curves = series.diagnostics["analytic"]
    else:
        series, _ = scenarios.run(config)
        values = dict(series.observables)
        report, curves = None, {}
    values["t"] = config.times
    values["pump_db"] = _pump_db(values["n_plus"], reference)
    columns = list(BASE_COLUMNS)
    if report is not None:
        floor = 100 * config.atol
        for name in COMPARED:
            if name in curves and name in values:
                a = curves[name]
                values[f"analytic_{name}"] = a
                values[f"rel_dev_{name}"] = np.abs(values[name] - a) / np.maximum(np.abs(a), floor)
        columns += [f"analytic_{n}" for n in COMPARED if f"analytic_{n}" in values]
        columns += [f"rel_dev_{n}" for n in COMPARED if f"rel_dev_{n}" in values]
    return columns, values, report, series


def _report_dict(report: scenarios.ComparisonReport | None):
    if report is None:
        return None
    return {
        "lam": report.lam,
        "analytic_valid": report.analytic_valid,
        "tolerance_factor": report.tolerance_factor,
        "passed": report.passed,
        "deviations": {k: {"value": d.value, "tolerance": d.tolerance, "metric": d.metric,
                           "gated": d.gated, "passed": d.passed}
                       for k, d in report.deviations.items()},
        "notes": list(report.notes),
    }


def cmd_simulate(args, compare: bool = False) -> int:
    doc = _load_json(args.config)
    columns, values, report, series = simulate_table(doc, compare=compare)
    if args.format == "csv":
        rows = zip(*(values[c] for c in columns))
        _write(args.out, write_csv(columns, rows))
    else:
        extra = {k: v for k, v in values.items() if k not in columns}
        out = {
            "schema": RESULT_SCHEMA,
            "config": {**config_to_dict(config_from_dict(doc)),
                       **{k: doc[k] for k in ("compare", "analytic_only") if k in doc}},
            "columns": {c: values[c] for c in columns},
            "extra": extra,
            "report": _report_dict(report),
        }
        if series is not None:
            out["diagnostics"] = {k: v for k, v in series.diagnostics.items() if k != "analytic"}
            if args.with_state and series.final_state is not None:
                out["final_state"] = state_to_dict(series.final_state)
        _write(args.out, dumps(out))
    if report is not None:
        for line in _summary(report):
            print(line, file=sys.stderr)
        if not report.passed:
            return EXIT_TOLERANCE
    return EXIT_OK


def _summary(report):
    yield f"lam = {report.lam:.4g}  analytic_valid = {report.analytic_valid}"
    for k, d in report.deviations.items():
        tag = "PASS" if d.passed else "FAIL"
        gate = "" if d.gated else " (reported only)"
        yield f"  {k}: {d.metric} deviation {d.value:.3g} vs {d.tolerance:.3g} {tag}{gate}"
    for note in report.notes:
        yield f"  note: {note}"


# ---------------------------------------------------------------- sweep

def _axis_values(axis: dict) -> list[float]:
    if not isinstance(axis, dict) or "name" not in axis:
        raise InputError("axes[]: each axis needs a 'name'")
    if "values" in axis:
        vals = [float(v) for v in axis["values"]]
    elif {"start", "stop", "num"} <= set(axis):
        num = int(axis["num"])
        if axis.get("scale", "linear") == "log":
            vals = np.geomspace(float(axis["start"]), float(axis["stop"]), num).tolist()
        else:
            vals = np.linspace(float(axis["start"]), float(axis["stop"]), num).tolist()
    else:
        raise InputError(f"axis {axis['name']!r}: give 'values' or 'start'/'stop'/'num'")
    if not vals:
        raise InputError(f"axis {axis['name']!r} is empty")
    if len(vals) > MAX_AXIS_POINTS:
        raise InputError(f"axis {axis['name']!r} has {len(vals)} points (max {MAX_AXIS_POINTS})")
    return vals


def _set_path(doc: dict, path: str, value):
    keys = path.split(".")
    node = doc
    for k in keys[:-1]:
        node = node.setdefault(k, {})
    node[keys[-1]] = value


_PARAM_FIELDS = ("U", "gamma", "Gamma", "alpha0_sq", "v")


def _params_from(base: dict) -> PairGenParams:
    return PairGenParams(**{k: float(base[k]) for k in _PARAM_FIELDS if k in base})


def _point_pairgen(base):
    p, t = _params_from(base), float(base["t"])
    return {"n_plus": analytic.pump_photon_number(t, p),
            "n_minus": analytic.n_minus_perturbative(t, p),
            "p1": analytic.p1_with_loss(t, p), "p2": analytic.p2_with_loss(t, p),
            "pump_db": 10 * math.log10(p.alpha0_sq / analytic.pump_photon_number(t, p))
            if p.alpha0_sq > 0 else 0.0}


def _point_noon(base):
    p, T = _params_from(base), float(base["T"])
    r = analytic.noon_probabilities(T, p, with_loss=bool(base.get("with_loss", True)))
    return {"P11": r.P11, "P20": r.P20, "ratio": r.ratio}


def _point_lmin(base):
    plat = base["platform"]
    plat = design_mod.lookup(plat) if isinstance(plat, str) else design_mod.MaterialPlatform.from_dict(plat)
    fields = {k: float(base[k]) for k in ("g", "gamma3", "gamma_linear") if k in base}
    if "gamma3_over_g" in base:
        fields["gamma3"] = float(base["gamma3_over_g"]) * fields.get("g", plat.g)
    plat = replace(plat, **fields)
    n = float(base.get("pump_photons", design_mod.TYPICAL_PUMP_PHOTONS))
    u = float(base.get("U_spatial", design_mod.TYPICAL_KERR_OVER_LOSS * plat.gamma_linear))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", design_mod.AdiabaticityWarning)
        ml = design_mod.min_length(plat, n, u, float(base["delta"]))
        L = ml.L_min if math.isfinite(ml.L_min) else 0.0
        return {"Gamma": ml.Gamma, "L_min": ml.L_min, "feasible": ml.feasible,
                "rejection_db": design_mod.rejection_db(L, ml.Gamma, plat.gamma_linear)}


def _point_scenario(base):
    doc = {"schema": SCENARIO_SCHEMA, **base}
    compare = bool(base.get("compare", False))
    _, values, report, _ = simulate_table(doc, compare=compare)
    out = {k: float(values[k][-1]) for k in ("n_plus", "n_minus", "p0", "p1", "p2", "pump_db")}
    if report is not None:
        for name in sorted(report.deviations):
            out[f"max_dev_{name}"] = report.deviations[name].value
        out["passed"] = report.passed
    return out


_TARGETS = {"pairgen": _point_pairgen, "noon": _point_noon, "lmin": _point_lmin,
            "scenario": _point_scenario}


def _evaluate_point(target: str, base: dict, names: tuple[str, ...], values: tuple[float, ...]):
    doc = json.loads(json.dumps(base))
    for name, v in zip(names, values):
        _set_path(doc, name, v)
    return _TARGETS[target](doc)


def sweep_table(doc: dict, jobs: int = 1):
    """Evaluate a sweep document; rows follow the axis-major product order."""
    if not isinstance(doc, dict) or doc.get("schema") != SWEEP_SCHEMA:
        raise SchemaError(f"schema: expected {SWEEP_SCHEMA!r}")
    target = doc.get("target")
    if target not in _TARGETS:
        raise InputError(f"target: expected one of {sorted(_TARGETS)}, got {target!r}")
    axes = doc.get("axes")
    if not isinstance(axes, list) or not 1 <= len(axes) <= 2:
        raise InputError("axes: give one or two axes")
    names = tuple(a.get("name") if isinstance(a, dict) else None for a in axes)
    grids = [_axis_values(a) for a in axes]
    base = doc.get("base", {})
    points = list(itertools.product(*grids))
    args = [(target, base, names, pt) for pt in points]
    if jobs > 1 and len(points) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_evaluate_point, *zip(*args)))
    else:
        results = [_evaluate_point(*a) for a in args]
    out_cols = list(results[0])
    columns = list(names) + out_cols
    rows = [list(pt) + [r[c] for c in out_cols] for pt, r in zip(points, results)]
    return columns, rows


def _default_jobs() -> int:
    env = os.environ.get("PAIRGEN_JOBS")
    if env is None:
        return 1
    try:
        return max(1, int(env))
    except ValueError as exc:
        raise InputError(f"PAIRGEN_JOBS must be an integer, got {env!r}") from exc


def cmd_sweep(args) -> int:
    doc = _load_json(args.config)
    jobs = args.jobs if args.jobs is not None else _default_jobs()
    columns, rows = sweep_table(doc, jobs=jobs)
    if args.format == "csv":
        _write(args.out, write_csv(columns, rows))
    else:
        _write(args.out, dumps({"schema": RESULT_SCHEMA, "columns": columns, "rows": rows}))
    return EXIT_OK


# ---------------------------------------------------------------- design

def _resolve_platform(source: str, name: str | None):
    path = Path(source)
    if path.is_file():
        try:
            plats = design_mod.load_platforms(path)
        except json.JSONDecodeError as exc:
            raise InputError(f"{source}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
        if name is not None:
            return design_mod.lookup(name, plats)
        if len(plats) != 1:
            raise InputError(f"{source} holds {len(plats)} platforms; pick one with --name")
        return plats[0]
    try:
        return design_mod.lookup(source)
    except design_mod.PlatformNotFoundError as exc:
        known = ", ".join(p.name for p in design_mod.builtin_platforms())
        raise InputError(f"unknown platform {source!r} (built-in: {known})") from exc


def cmd_design(args) -> int:
    plat = _resolve_platform(args.platform, args.name)
    report = design_mod.design(plat, args.power, args.delta, pump_photons=args.pump_photons,
                               U_spatial=args.kerr_rate)
    _write(args.out, dumps({"schema": DESIGN_SCHEMA, **report.to_dict()}))
    return EXIT_OK


# ---------------------------------------------------------------- entry

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pairgen", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    for name, help_ in (("simulate", "run one scenario config"),
                        ("compare", "run one scenario and compare with the closed forms")):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--config", required=True)
        p.add_argument("--out", default="-")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--with-state", action="store_true",
                       help="include the final density matrix in JSON output")

    p = sub.add_parser("sweep", help="evaluate a 1-2 axis parameter grid")
    p.add_argument("--config", required=True)
    p.add_argument("--out", default="-")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--jobs", type=int, default=None,
                   help="worker processes (default: $PAIRGEN_JOBS or 1)")

    p = sub.add_parser("design", help="design rules for a waveguide platform")
    p.add_argument("--platform", required=True, help="built-in name or platform JSON file")
    p.add_argument("--name", default=None, help="platform name inside a multi-entry file")
    p.add_argument("--power", type=float, required=True, help="pump power in W")
    p.add_argument("--delta", type=float, required=True, help="target pump/pair ratio")
    p.add_argument("--pump-photons", type=float, default=None)
    p.add_argument("--kerr-rate", type=float, default=None, help="U per metre")
    p.add_argument("--out", default="-")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INVALID if exc.code else EXIT_OK
    try:
        if args.command in ("simulate", "compare"):
            return cmd_simulate(args, compare=args.command == "compare")
        if args.command == "sweep":
            if args.jobs is not None and args.jobs < 1:
                raise InputError("--jobs must be >= 1")
            return cmd_sweep(args)
        return cmd_design(args)
    except (IntegrationError, AccuracyError) as exc:
        print(f"integration error: {exc}", file=sys.stderr)
        return EXIT_INTEGRATION
    except (InputError, SchemaError, scenarios.ScenarioError, FockError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (ValueError, KeyError, TypeError) as exc:
        print(f"invalid input: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
