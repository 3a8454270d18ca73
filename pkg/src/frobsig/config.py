"""Run configuration: JSON schema, validation and construction of the descriptor."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

import jsonschema
import numpy as np

from .errors import ConfigError
from .gf import GF, is_prime
from .groupscheme import GroupSchemeDescriptor

GLOBAL_ELEMENT_MAX = 5000
GLOBAL_SLICE_MAX = 50000
GLOBAL_E_MAX = 12
GLOBAL_DEGREE_MAX = 64

_entry = {"oneOf": [{"type": "integer"}, {"type": "array", "items": {"type": "integer"}}]}
_matrix = {"type": "array", "items": {"type": "array", "items": _entry}}

SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["p", "dimension"],
    "properties": {
        "p": {"type": "integer", "minimum": 2},
        "m": {"type": "integer", "minimum": 1, "default": 1},
        "modulus": {"type": "array", "items": {"type": "integer"}},
        "dimension": {"type": "integer", "minimum": 1},
        "group": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "constant_generators": {"type": "array", "items": _matrix},
                "diag": {
                    "type": "object",
                    "additionalProperties": False,
                    "required": ["orders", "weights"],
                    "properties": {
                        "orders": {"type": "array", "items": {"type": "integer", "minimum": 1}},
                        "weights": {"type": "array", "items": {"type": "array", "items": {"type": "integer"}}},
                    },
                },
            },
        },
        "module": {
            "oneOf": [
                {"const": "S"},
                {"type": "object", "additionalProperties": False, "required": ["label"],
                 "properties": {"label": {"type": "string"}}},
                {"type": "object", "additionalProperties": False, "required": ["matrices"],
                 "properties": {"matrices": {"type": "array", "items": _matrix}}},
                {"type": "object", "additionalProperties": False, "required": ["reflexive_rank"],
                 "properties": {"reflexive_rank": {"type": "integer", "minimum": 1}}},
            ]
        },
        "e_max": {"type": "integer", "minimum": 1, "maximum": GLOBAL_E_MAX},
        "degree_bound": {"type": "integer", "minimum": 0, "maximum": GLOBAL_DEGREE_MAX},
        "caps": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "element_max": {"type": "integer", "minimum": 1, "maximum": GLOBAL_ELEMENT_MAX},
                "slice_max": {"type": "integer", "minimum": 1, "maximum": GLOBAL_SLICE_MAX},
            },
        },
        "output": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "format": {"enum": ["csv", "json", "both"]},
                "path": {"type": "string"},
            },
        },
    },
}


def canonical_json(raw: dict) -> str:
    return json.dumps(raw, sort_keys=True, separators=(",", ":"))


def config_hash(raw: dict) -> str:
    return hashlib.sha256(canonical_json(raw).encode()).hexdigest()[:16]


@dataclass
class RunConfig:
    raw: dict
    field: GF
    descriptor: GroupSchemeDescriptor
    module: object
    e_max: int
    degree_bound: int
    element_max: int
    slice_max: int
    output_format: str
    output_path: str | None

    @property
    def hash(self) -> str:
        return config_hash(self.raw)


def _entry_code(F: GF, x) -> int:
    if isinstance(x, list):
        if len(x) != F.m or any(not 0 <= c < F.p for c in x):
            raise ConfigError(f"field element {x} needs {F.m} coordinates in [0, {F.p})")
        return F.from_coords(x)
    return int(x) % F.p


def parse_matrix(F: GF, rows, d: int | None = None) -> np.ndarray:
    M = np.array([[_entry_code(F, x) for x in row] for row in rows], dtype=np.int64)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or (d is not None and M.shape[0] != d):
        raise ConfigError(f"expected a square {d}x{d} matrix, got {rows}")
    return M


def _format_error(err: jsonschema.ValidationError) -> str:
    where = "/".join(str(x) for x in err.absolute_path) or "<root>"
    return f"config error at {where}: {err.message}"


def validate(raw: dict) -> None:
    validator = jsonschema.Draft202012Validator(SCHEMA)
    errors = sorted(validator.iter_errors(raw), key=lambda e: list(e.absolute_path))
    if errors:
        raise ConfigError(_format_error(errors[0]))


def from_dict(raw: dict) -> RunConfig:
    from .fsig import ModuleChoice

    validate(raw)
    p = raw["p"]
    if not is_prime(p):
        raise ConfigError(f"config error at p: {p} is not prime")
    m = raw.get("m", 1)
    try:
        F = GF(p, m, raw.get("modulus"))
    except ValueError as exc:
        raise ConfigError(f"config error at modulus: {exc}") from None
    d = raw["dimension"]
    group = raw.get("group", {})
    gens = [parse_matrix(F, g, d) for g in group.get("constant_generators", [])]
    diag = group.get("diag")
    orders: tuple = ()
    W = None
    if diag:
        orders = tuple(diag["orders"])
        W = np.array(diag["weights"], dtype=np.int64)
        if W.shape != (d, len(orders)):
            raise ConfigError(f"config error at group/diag/weights: need a {d}x{len(orders)} matrix")
    caps = raw.get("caps", {})
    element_max = caps.get("element_max", 200)
    desc = GroupSchemeDescriptor(F, d, gens, orders, W, element_max)
    out = raw.get("output", {})
    return RunConfig(raw, F, desc, ModuleChoice.from_config(raw.get("module", "S")), raw.get("e_max", 1),
                     raw.get("degree_bound", 4), element_max, caps.get("slice_max", 5000),
                     out.get("format", "csv"), out.get("path"))


def load(path: str | Path) -> RunConfig:
    try:
        raw = json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from None
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    return from_dict(raw)
