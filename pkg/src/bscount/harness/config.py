"""Experiment configuration: JSON documents validated per kind, with defaults filled in."""

import copy
import hashlib
import json
from dataclasses import dataclass, field

import jsonschema

from .rng import SEED_MAX

KINDS = (
    "abstract_bound",
    "antisym_oracle",
    "jordan",
    "schrodinger",
    "constants_table",
    "accumulation_sweep",
)

_NUMBER_LIST = {"type": "array", "items": {"type": "number"}, "minItems": 1}
_POSITIVE_LIST = {"type": "array", "items": {"type": "number", "exclusiveMinimum": 0}, "minItems": 1}

_POTENTIAL = {
    "type": "object",
    "required": ["kind"],
    "properties": {
        "kind": {"enum": ["zero", "delta_well", "imaginary_ball", "scaled_char", "grid_samples"]},
        "t": {"type": "number"},
        "width": {"type": "number", "exclusiveMinimum": 0},
        "h_strength": {"type": "number"},
        "radius": {"type": "number", "exclusiveMinimum": 0},
        "c": {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2},
        "values": {"type": "array", "items": {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2}},
    },
    "allOf": [
        {"if": {"properties": {"kind": {"const": "delta_well"}}}, "then": {"required": ["t", "width"]}},
        {"if": {"properties": {"kind": {"const": "imaginary_ball"}}}, "then": {"required": ["h_strength"]}},
        {"if": {"properties": {"kind": {"const": "scaled_char"}}}, "then": {"required": ["c", "radius"]}},
        {"if": {"properties": {"kind": {"const": "grid_samples"}}}, "then": {"required": ["values"]}},
    ],
    "additionalProperties": False,
}

_WEIGHT = {
    "type": "object",
    "required": ["kind"],
    "properties": {"kind": {"enum": ["exp", "const", "inv1p"]}, "param": {"type": "number"}},
    "additionalProperties": False,
}

_GRID = {
    "d": {"enum": [1, 2]},
    "L": {"type": "number", "exclusiveMinimum": 0},
    "n": {"type": "integer", "minimum": 16},
    "levels": {"type": "integer", "minimum": 2},
}

PARAM_SCHEMAS = {
    "abstract_bound": {
        "max_dim": {"type": "integer", "minimum": 1, "maximum": 64},
        "alphas": _NUMBER_LIST,
        "eps_range": {"type": "array", "items": {"type": "number", "exclusiveMinimum": 0}, "minItems": 2, "maxItems": 2},
        "sigmas": _POSITIVE_LIST,
        "k_probability": {"type": "number", "minimum": 0, "maximum": 1},
        "conventions": {"type": "array", "items": {"enum": ["raw", "clamp_at_zero"]}, "minItems": 1, "uniqueItems": True},
    },
    "antisym_oracle": {
        "n_values": {"type": "array", "items": {"type": "integer", "minimum": 1, "maximum": 4}, "minItems": 1},
        "d_values": {"type": "array", "items": {"type": "integer", "minimum": 1, "maximum": 8}, "minItems": 1},
    },
    "jordan": {
        "max_block": {"type": "integer", "minimum": 1, "maximum": 8},
        "max_blocks": {"type": "integer", "minimum": 1, "maximum": 6},
        "deltas": _POSITIVE_LIST,
        "spread": {"type": "number", "exclusiveMinimum": 0},
    },
    "schrodinger": {
        **_GRID,
        "potential": _POTENTIAL,
        "alphas": _NUMBER_LIST,
        "eps": _POSITIVE_LIST,
        "gammas": {"type": "array", "items": {"type": "number", "minimum": 0}, "minItems": 1},
        "kappas": _POSITIVE_LIST,
        "weights": {"type": "array", "items": _WEIGHT},
    },
    "constants_table": {
        "ds": {"type": "array", "items": {"type": "integer", "minimum": 1}, "minItems": 1},
        "gammas": {"type": "array", "items": {"type": "number", "minimum": 0}, "minItems": 1},
    },
    "accumulation_sweep": {
        "L": {"type": "number", "exclusiveMinimum": 0},
        "n": {"type": "integer", "minimum": 16, "maximum": 70},
        "levels": {"type": "integer", "minimum": 2},
        "h_strengths": _POSITIVE_LIST,
        "weights": {"type": "array", "items": _WEIGHT, "minItems": 1},
        "p_exp": {"type": "number", "exclusiveMinimum": 0},
    },
}

DEFAULTS = {
    "abstract_bound": {
        "max_dim": 12,
        "alphas": [-3, -1, -0.3, 0, 0.3, 1, 3],
        "eps_range": [1e-3, 10],
        "sigmas": [0.1, 1, 10],
        "k_probability": 0.5,
        "conventions": ["raw"],
    },
    "antisym_oracle": {"n_values": [2, 3], "d_values": [3, 4, 5, 6]},
    "jordan": {
        "max_block": 5,
        "max_blocks": 3,
        "deltas": [1e-6, 1e-5, 1e-4, 1e-3, 1e-2, 1e-1],
        "spread": 2.0,
    },
    "schrodinger": {
        "d": 1,
        "L": 20.0,
        "n": 799,
        "levels": 2,
        "potential": {"kind": "delta_well", "t": 1.0, "width": 0.01},
        "alphas": [-1, 0, 1],
        "eps": [0.05, 0.2475],
        "gammas": [0.5, 1.0],
        "kappas": [0.05, 0.5, 5],
        "weights": [{"kind": "exp", "param": 1.0}, {"kind": "inv1p"}],
    },
    "constants_table": {"ds": [1, 2, 3], "gammas": [0, 0.5, 1, 1.5, 2]},
    "accumulation_sweep": {
        "L": 4.0,
        "n": 39,
        "levels": 2,
        "h_strengths": [1, 2, 4, 8],
        "weights": [{"kind": "exp", "param": 1.0}, {"kind": "inv1p"}],
        "p_exp": 1.0,
    },
}


def _config_schema():
    branches = []
    for kind in KINDS:
        branches.append(
            {
                "if": {"properties": {"kind": {"const": kind}}},
                "then": {
                    "properties": {
                        "params": {
                            "type": "object",
                            "properties": PARAM_SCHEMAS[kind],
                            "additionalProperties": False,
                        }
                    }
                },
            }
        )
    return {
        "$schema": "https://json-schema.org/draft/2020-12/schema",
        "type": "object",
        "required": ["kind"],
        "properties": {
            "kind": {"enum": list(KINDS)},
            "seed": {"type": "integer", "minimum": 0, "maximum": SEED_MAX},
            "trials": {"type": "integer", "minimum": 1},
            "out": {"type": "string"},
            "params": {"type": "object"},
        },
        "additionalProperties": False,
        "allOf": branches,
    }


CONFIG_SCHEMA = _config_schema()
_VALIDATOR = jsonschema.Draft202012Validator(CONFIG_SCHEMA)


class ConfigError(ValueError):
    def __init__(self, path, message):
        self.path = path
        super().__init__(f"{path}: {message}")


def _format_path(parts):
    out = "config"
    for p in parts:
        out += f"[{p}]" if isinstance(p, int) else f".{p}"
    return out


@dataclass
class ExperimentConfig:
    kind: str
    params: dict = field(default_factory=dict)
    seed: int = 0
    trials: int = 1
    out: str | None = None

    def to_dict(self):
        d = {"kind": self.kind, "seed": self.seed, "trials": self.trials, "params": self.params}
        if self.out is not None:
            d["out"] = self.out
        return d

    def digest(self):
        """Hash of everything that determines the record stream (``out`` excluded)."""
        body = {"kind": self.kind, "seed": self.seed, "trials": self.trials, "params": self.params}
        return hashlib.sha256(json.dumps(body, sort_keys=True).encode()).hexdigest()[:16]


def validate(doc):
    errors = sorted(_VALIDATOR.iter_errors(doc), key=lambda e: (len(e.absolute_path), list(map(str, e.absolute_path))))
    if errors:
        err = jsonschema.exceptions.best_match(errors)
        raise ConfigError(_format_path(err.absolute_path), err.message)
    if doc["kind"] == "abstract_bound":
        lo, hi = doc.get("params", {}).get("eps_range", [1, 1])
        if lo > hi:
            raise ConfigError("config.params.eps_range", f"lower end {lo} exceeds upper end {hi}")


def from_dict(doc):
    """Validate and fill defaults; returns an ExperimentConfig."""
    validate(doc)
    kind = doc["kind"]
    params = copy.deepcopy(DEFAULTS[kind])
    params.update(copy.deepcopy(doc.get("params", {})))
    return ExperimentConfig(
        kind=kind,
        params=params,
        seed=int(doc.get("seed", 0)),
        trials=int(doc.get("trials", 1)),
        out=doc.get("out"),
    )


def load(path):
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError("config", f"not valid JSON: {exc}") from exc
    return doc
