"""JSON schemas for input files and run reports."""

from __future__ import annotations

from typing import Any, Mapping

from jsonschema import Draft202012Validator
from jsonschema.exceptions import ValidationError

from .errors import BicpbError

BICOMPLEX = {"type": "array", "items": {"type": "number"}, "minItems": 4, "maxItems": 4}

FAMILY = {
    "type": "object",
    "required": ["name"],
    "properties": {"name": {"type": "string"}, "params": {"type": "object"}},
    "additionalProperties": False,
}

FINITE_SPACE = {
    "type": "object",
    "required": ["points", "delta"],
    "properties": {
        "points": {"type": "array", "items": {"type": ["string", "number"]}, "minItems": 1},
        "delta": {"type": "array", "items": {"type": "array", "items": BICOMPLEX}},
        "order": {"type": "array", "items": {"type": "array", "items": {"type": "boolean"}}},
        "maps": {"type": "object", "additionalProperties": {"type": "array", "items": {"type": ["string", "number"]}}},
        "meta": {"type": "object"},
    },
    "additionalProperties": False,
}

PARAMS = {
    "type": "object",
    "required": ["curlyvee", "curlywedge"],
    "properties": {
        "curlyvee": {"type": "number"},
        "curlywedge": {"type": "number"},
        "s": {"type": "number"},
    },
    "additionalProperties": False,
}

SOLVE_REQUEST = {
    "type": "object",
    "required": ["space", "params"],
    "properties": {
        "space": {"oneOf": [FINITE_SPACE, {"type": "string"}]},
        "maps": {"type": "array", "items": {"type": "string"}, "minItems": 2, "maxItems": 2},
        "params": PARAMS,
        "start": {"type": ["string", "number"]},
        "tol": {"type": "number", "exclusiveMinimum": 0},
        "max_iter": {"type": "integer", "minimum": 0},
    },
    "additionalProperties": False,
}

URYSOHN_CONFIG = {
    "type": "object",
    "required": ["interval", "b", "G1", "G2"],
    "properties": {
        "interval": {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2},
        "intervals": {"type": "integer"},
        "rule": {"enum": ["simpson", "trapezoid"]},
        "b": FAMILY,
        "G1": FAMILY,
        "G2": FAMILY,
        "curlywedge": {"type": "number"},
        "curlyvee": {"type": "number"},
        "tol": {"type": "number", "exclusiveMinimum": 0},
        "max_iter": {"type": "integer", "minimum": 0},
        "components": {"type": "integer", "minimum": 1},
    },
    "additionalProperties": False,
}

_STATUS = {"enum": ["holds", "violated"]}

AXIOM_REPORT = {
    "type": "object",
    "required": ["kind", "s", "mode", "holds", "status", "counterexamples", "minimal_s",
                 "nonzero_self_distances", "points", "checked"],
    "properties": {
        "kind": {"enum": ["partial-b", "generalized", "b-metric"]},
        "s": {"type": "number"},
        "mode": {"enum": ["exhaustive", "sampled"]},
        "holds": {"type": "boolean"},
        "status": {
            "type": "object",
            "required": ["small-self-distance", "symmetry", "equality", "triangularity"],
            "additionalProperties": _STATUS,
        },
        "counterexamples": {"type": "array", "items": {
            "type": "object",
            "required": ["axiom", "points", "lhs", "rhs", "relation", "ratio"],
            "properties": {"lhs": BICOMPLEX, "rhs": BICOMPLEX, "ratio": {"type": ["number", "null"]}},
        }},
        "minimal_s": {"oneOf": [{"type": "number"}, {"type": "null"}, {"const": "infeasible"}]},
        "nonzero_self_distances": {"type": "array"},
        "points": {"type": ["array", "null"]},
        "checked": {"type": "integer"},
    },
    "additionalProperties": False,
}

ITERATION_TRACE = {
    "type": "object",
    "required": ["maps_applied", "step_distance", "step_norm", "step_gap", "bound_ok", "termination",
                 "violation_step", "h", "evaluations"],
    "properties": {
        "iterates": {"type": "array"},
        "maps_applied": {"type": "array", "items": {"enum": ["U", "V"]}},
        "step_distance": {"type": "array", "items": BICOMPLEX},
        "step_norm": {"type": "array", "items": {"type": "number"}},
        "step_gap": {"type": "array", "items": {"type": "number"}},
        "bound_ok": {"type": "array", "items": {"type": "boolean"}},
        "termination": {"enum": ["fixed-point-reached", "tolerance-met", "max-iterations", "contraction-violated"]},
        "violation_step": {"type": ["integer", "null"]},
        "h": {"type": "number"},
        "evaluations": {"type": "integer"},
    },
    "additionalProperties": False,
}

RESULTS = {
    "type": "object",
    "properties": {
        "axioms": AXIOM_REPORT,
        "trace": ITERATION_TRACE,
        "solve": {"type": "object", "required": ["verdict"],
                  "properties": {"verdict": {"enum": ["common-solution", "no-common-solution", "diverged"]},
                                 "trace": ITERATION_TRACE}},
    },
}

RUN_REPORT = {
    "type": "object",
    "required": ["command", "input_digest", "results", "payload_digest", "exit_status", "seed"],
    "properties": {
        "command": {"type": "array", "items": {"type": "string"}},
        "input_digest": {"type": "string", "pattern": "^sha256:[0-9a-f]{64}$"},
        "results": RESULTS,
        "payload_digest": {"type": "string", "pattern": "^sha256:[0-9a-f]{64}$"},
        "wall_time_s": {"type": "number", "minimum": 0},
        "exit_status": {"enum": [0, 1, 2]},
        "seed": {"type": "integer"},
        "error": {"type": "string"},
    },
    "additionalProperties": False,
}

SCHEMAS = {
    "finite-space": FINITE_SPACE,
    "solve-request": SOLVE_REQUEST,
    "urysohn-config": URYSOHN_CONFIG,
    "run-report": RUN_REPORT,
    "axiom-report": AXIOM_REPORT,
    "iteration-trace": ITERATION_TRACE,
}


class SchemaError(BicpbError, ValueError):
    """Input or report JSON does not match its schema."""


def validate(data: Any, schema: str | Mapping[str, Any]) -> None:
    """Raise :class:`SchemaError` naming the first offending location."""
    sch = SCHEMAS[schema] if isinstance(schema, str) else schema
    try:
        Draft202012Validator(sch).validate(data)
    except ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise SchemaError(f"{where}: {exc.message}") from None


def is_valid(data: Any, schema: str | Mapping[str, Any]) -> bool:
    sch = SCHEMAS[schema] if isinstance(schema, str) else schema
    return Draft202012Validator(sch).is_valid(data)
