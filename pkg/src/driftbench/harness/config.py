"""Experiment configuration: a JSON document validated against ``CONFIG_SCHEMA``."""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field

import jsonschema
import numpy as np

DETECTORS = ("padd", "cddd", "adwin", "ddm", "eddm")

_int_list = {"type": "array", "items": {"type": "integer", "minimum": 1}, "minItems": 1}
_num_list = {"type": "array", "items": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1}, "minItems": 1}

CONFIG_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["base_seed"],
    "additionalProperties": False,
    "properties": {
        "base_seed": {"type": "integer", "minimum": 0, "maximum": 2**64 - 1},
        "detectors": {"type": "array", "items": {"type": "string"}},
        "streams": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "dynamics": {
                    "type": "array",
                    "items": {"enum": ["sudden", "gradual"]},
                    "minItems": 1,
                },
                "n_drifts": {"type": "array", "items": {"type": "integer", "minimum": 0}, "minItems": 1},
                "n_features": _int_list,
                "replications": {"type": "integer", "minimum": 0},
                "n_chunks": {"type": "integer", "minimum": 1},
                "chunk_size": {"type": "integer", "minimum": 1},
                "informative_fraction": {"type": "number", "exclusiveMinimum": 0, "maximum": 1},
            },
        },
        "detector_params": {
            "type": "object",
            "propertyNames": {"enum": list(DETECTORS)},
            "additionalProperties": {"type": "object"},
        },
        "reset_classifier": {"type": "boolean"},
        "sweep": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "alphas": _num_list,
                "thetas": _num_list,
                "n_drifts": {"type": "integer", "minimum": 1},
                "dynamics": {"type": "array", "items": {"enum": ["sudden", "gradual"]}, "minItems": 1},
                "n_features": _int_list,
                "replications": {"type": "integer", "minimum": 0},
            },
        },
        "out": {"type": "string"},
        "jobs": {"type": "integer", "minimum": 1},
    },
}


class ConfigError(ValueError):
    """Schema violation; ``path`` locates the offending element."""

    def __init__(self, message: str, path: str = "$"):
        self.path = path
        super().__init__(f"{path}: {message}")


class RosterError(ConfigError):
    pass


def _grid(lo: float, hi: float, n: int) -> tuple[float, ...]:
    return tuple(float(v) for v in np.round(np.linspace(lo, hi, n), 6))


@dataclass(frozen=True)
class SweepSpec:
    alphas: tuple[float, ...] = _grid(0.03, 0.2, 15)
    thetas: tuple[float, ...] = _grid(0.1, 0.3, 10)
    n_drifts: int = 10
    dynamics: tuple[str, ...] = ("sudden", "gradual")
    n_features: tuple[int, ...] = (30, 60, 90)
    replications: int | None = None

    def __post_init__(self):
        for name in ("alphas", "thetas"):
            grid = getattr(self, name)
            if not grid or any(b <= a for a, b in zip(grid, grid[1:])):
                raise ConfigError("grid must be non-empty and strictly increasing", f"$.sweep.{name}")


@dataclass(frozen=True)
class ExperimentConfig:
    base_seed: int
    detectors: tuple[str, ...] = DETECTORS
    dynamics: tuple[str, ...] = ("sudden", "gradual")
    n_drifts: tuple[int, ...] = (3, 5, 10, 15)
    n_features: tuple[int, ...] = (30, 60, 90)
    replications: int = 10
    n_chunks: int = 250
    chunk_size: int = 200
    informative_fraction: float = 0.30
    detector_params: dict = field(default_factory=dict)
    reset_classifier: bool = True
    sweep: SweepSpec = field(default_factory=SweepSpec)
    out: str = "results"
    jobs: int = 1

    def to_dict(self) -> dict:
        sweep = asdict(self.sweep)
        if sweep["replications"] is None:
            del sweep["replications"]
        return {
            "base_seed": self.base_seed,
            "detectors": list(self.detectors),
            "streams": {
                "dynamics": list(self.dynamics),
                "n_drifts": list(self.n_drifts),
                "n_features": list(self.n_features),
                "replications": self.replications,
                "n_chunks": self.n_chunks,
                "chunk_size": self.chunk_size,
                "informative_fraction": self.informative_fraction,
            },
            "detector_params": self.detector_params,
            "reset_classifier": self.reset_classifier,
            "sweep": {k: list(v) if isinstance(v, tuple) else v for k, v in sweep.items()},
            "out": self.out,
            "jobs": self.jobs,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def stream_overrides(self) -> dict:
        return {
            "n_chunks": self.n_chunks,
            "chunk_size": self.chunk_size,
            "informative_fraction": self.informative_fraction,
        }


def _json_path(error: jsonschema.ValidationError) -> str:
    path = "$"
    for part in error.absolute_path:
        path += f"[{part}]" if isinstance(part, int) else f".{part}"
    return path


def config_from_dict(doc: dict) -> ExperimentConfig:
    validator = jsonschema.Draft202012Validator(CONFIG_SCHEMA)
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.absolute_path))
    if errors:
        raise ConfigError(errors[0].message, _json_path(errors[0]))
    detectors = tuple(doc.get("detectors", DETECTORS))
    unknown = [d for d in detectors if d not in DETECTORS]
    if unknown:
        raise RosterError(f"unknown detector(s) {unknown}; available: {list(DETECTORS)}", "$.detectors")
    if len(set(detectors)) != len(detectors):
        raise RosterError("duplicate detector names", "$.detectors")
    streams = doc.get("streams", {})
    sweep_doc = doc.get("sweep", {})
    sweep = SweepSpec(**{k: tuple(v) if isinstance(v, list) else v for k, v in sweep_doc.items()})
    defaults = ExperimentConfig(base_seed=doc["base_seed"])
    return ExperimentConfig(
        base_seed=doc["base_seed"],
        detectors=detectors,
        dynamics=tuple(streams.get("dynamics", defaults.dynamics)),
        n_drifts=tuple(streams.get("n_drifts", defaults.n_drifts)),
        n_features=tuple(streams.get("n_features", defaults.n_features)),
        replications=streams.get("replications", defaults.replications),
        n_chunks=streams.get("n_chunks", defaults.n_chunks),
        chunk_size=streams.get("chunk_size", defaults.chunk_size),
        informative_fraction=float(streams.get("informative_fraction", defaults.informative_fraction)),
        detector_params=doc.get("detector_params", {}),
        reset_classifier=doc.get("reset_classifier", True),
        sweep=sweep,
        out=doc.get("out", defaults.out),
        jobs=doc.get("jobs", defaults.jobs),
    )


def parse_config(text: str) -> ExperimentConfig:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc}") from exc
    return config_from_dict(doc)
