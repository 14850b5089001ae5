"""JSON and CSV encodings for states, scenario configs and result tables.

Floats are written with 17 significant digits so every double round-trips.
Every JSON document carries a versioned ``schema`` field.
"""
from __future__ import annotations

import io
import json
import math
from typing import Iterable, Mapping, Sequence

import numpy as np

from .fock import QuantumState
from .scenarios import ScenarioConfig

__all__ = [
    "STATE_SCHEMA",
    "SCENARIO_SCHEMA",
    "SWEEP_SCHEMA",
    "RESULT_SCHEMA",
    "DESIGN_SCHEMA",
    "SchemaError",
    "format_number",
    "to_jsonable",
    "dumps",
    "state_to_dict",
    "state_from_dict",
    "config_to_dict",
    "config_from_dict",
    "write_csv",
]

STATE_SCHEMA = "pairgen.state/1"
SCENARIO_SCHEMA = "pairgen.scenario/1"
SWEEP_SCHEMA = "pairgen.sweep/1"
RESULT_SCHEMA = "pairgen.result/1"
DESIGN_SCHEMA = "pairgen.design/1"


class SchemaError(ValueError):
    """A document has the wrong schema tag or a malformed field."""


def format_number(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".17g")


def to_jsonable(obj):
    """Recursively convert numpy containers and non-finite floats for ``json``."""
    if isinstance(obj, Mapping):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        # python's float repr is the shortest string that round-trips
        return x if math.isfinite(x) else format_number(x)
    if isinstance(obj, complex):
        return {"re": to_jsonable(obj.real), "im": to_jsonable(obj.imag)}
    return obj


def dumps(doc) -> str:
    return json.dumps(to_jsonable(doc), indent=2, sort_keys=False) + "\n"


def _require_schema(doc: Mapping, expected: str):
    if not isinstance(doc, Mapping):
        raise SchemaError("document must be a JSON object")
    got = doc.get("schema")
    if got != expected:
        raise SchemaError(f"schema: expected {expected!r}, got {got!r}")


def state_to_dict(state: QuantumState) -> dict:
    rho = np.asarray(state.rho)
    return {
        "schema": STATE_SCHEMA,
        "dims": list(state.dims),
        "leakage": float(state.leakage),
        "rho_re": rho.real.tolist(),
        "rho_im": rho.imag.tolist(),
    }


def state_from_dict(doc: Mapping) -> QuantumState:
    _require_schema(doc, STATE_SCHEMA)
    try:
        rho = np.asarray(doc["rho_re"], dtype=float) + 1j * np.asarray(doc["rho_im"], dtype=float)
        return QuantumState(rho, tuple(doc["dims"]), leakage=float(doc.get("leakage", 0.0)))
    except KeyError as exc:
        raise SchemaError(f"state: missing field {exc.args[0]!r}") from exc


def config_to_dict(config: ScenarioConfig, *, compare: bool = False,
                   analytic_only: bool = False) -> dict:
    doc = {"schema": SCENARIO_SCHEMA, **config.to_dict()}
    if compare:
        doc["compare"] = True
    if analytic_only:
        doc["analytic_only"] = True
    return doc


def config_from_dict(doc: Mapping) -> ScenarioConfig:
    _require_schema(doc, SCENARIO_SCHEMA)
    body = {k: v for k, v in doc.items() if k not in ("schema", "compare", "analytic_only")}
    for key in ("kind", "params", "truncation", "times"):
        if key not in body:
            raise SchemaError(f"scenario: missing field {key!r}")
    try:
        return ScenarioConfig.from_dict(body)
    except TypeError as exc:
        raise SchemaError(f"scenario.params: {exc}") from exc


def write_csv(columns: Sequence[str], rows: Iterable[Sequence]) -> str:
    """Comma-separated table with a header line and 17-digit numbers."""
    buf = io.StringIO()
    buf.write(",".join(columns) + "\n")
    for row in rows:
        buf.write(",".join(v if isinstance(v, str) else format_number(v) for v in row) + "\n")
    return buf.getvalue()
