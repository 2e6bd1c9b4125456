"""Experiment configuration: JSON schema, parsing, estimator tags."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import jsonschema

from .grid import GAIN_PROFILES, GridConfig

# canonical estimator tags; "raw"/"avg" accepted as shorthand
ESTIMATOR_TAGS = (
    "raw-single",
    "raw-avg",
    "threshold",
    "omp",
    "denoised-single",
    "denoised-avg",
    "perfect-csi",
)
TAG_ALIASES = {"raw": "raw-single", "avg": "raw-avg", "denoised": "denoised-avg", "perfect": "perfect-csi"}
LEARNED_TAGS = ("denoised-single", "denoised-avg")

CONFIG_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["grid", "channel", "seed"],
    "properties": {
        "grid": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "M": {"type": "integer", "minimum": 1},
                "N": {"type": "integer", "minimum": 1},
                "delta_f_hz": {"type": "number", "exclusiveMinimum": 0},
                "f_c_hz": {"type": "number", "exclusiveMinimum": 0},
                "M_tau": {"type": "integer", "minimum": 1},
                "N_nu": {"type": "integer", "minimum": 2},
                "N_cp": {"type": "integer", "minimum": 0},
                "F": {"type": "integer", "minimum": 1},
            },
        },
        "channel": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "P": {"type": "integer", "minimum": 1},
                "gain_profile": {"enum": list(GAIN_PROFILES)},
                "fractional": {"enum": ["integer", "doppler", "fdfd"]},
            },
        },
        "v_max_kmh": {"type": "number", "exclusiveMinimum": 0},
        "sigma_p": {"type": "number", "exclusiveMinimum": 0},
        "psnr_grid_db": {"type": "array", "items": {"type": "number"}, "minItems": 1},
        "data_snr_grid_db": {"type": "array", "items": {"type": "number"}, "minItems": 1},
        "trials": {"type": "integer", "minimum": 1},
        "estimators": {"type": "array", "items": {"type": "string"}, "minItems": 1},
        "seed": {"type": "integer", "minimum": 0},
        "weights": {"type": "string"},
        "gamma": {"type": "number", "minimum": 0},
        "max_atoms": {"type": "integer", "minimum": 1},
        "dataset": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "snapshots_per_psnr": {"type": "integer", "minimum": 1},
                "split_ratio": {
                    "type": "array",
                    "items": {"type": "number", "minimum": 0},
                    "minItems": 3,
                    "maxItems": 3,
                },
            },
        },
    },
}


class ConfigError(ValueError):
    """Config file missing, malformed, or inconsistent."""


@dataclass(frozen=True)
class ExperimentConfig:
    grid: GridConfig
    P: int = 5
    gain_profile: str = "equal"
    fractional: str = "fdfd"
    v_max_kmh: float = 507.6
    sigma_p: float = 1.0
    psnr_grid_db: tuple = (0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0)
    data_snr_grid_db: tuple = (0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0)
    trials: int = 200
    estimators: tuple = ("raw-single", "raw-avg", "threshold", "omp")
    seed: int = 0
    weights: str | None = None
    gamma: float = 3.0
    max_atoms: int = 5
    snapshots_per_psnr: int = 6000
    split_ratio: tuple = (0.6, 0.2, 0.2)

    def __post_init__(self):
        if abs(sum(self.split_ratio) - 1.0) > 1e-9:
            raise ConfigError("dataset split ratios must sum to 1")
        for tag in self.estimators:
            if tag not in ESTIMATOR_TAGS:
                raise ConfigError(f"unknown estimator tag {tag!r}")


def canonical_tag(tag: str) -> str:
    tag = TAG_ALIASES.get(tag, tag)
    if tag not in ESTIMATOR_TAGS:
        raise ConfigError(
            f"unknown estimator tag {tag!r}; known: {', '.join(ESTIMATOR_TAGS)}"
        )
    return tag


def load_config(path) -> ExperimentConfig:
    """Read, schema-check, and materialize an experiment config."""
    try:
        raw = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        obj = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    try:
        jsonschema.validate(obj, CONFIG_SCHEMA)
    except jsonschema.ValidationError as exc:
        raise ConfigError(f"config {path}: {exc.message}") from exc

    g = obj.get("grid", {})
    try:
        grid = GridConfig(
            M=g.get("M", 32),
            N=g.get("N", 32),
            delta_f=g.get("delta_f_hz", 15e3),
            f_c=g.get("f_c_hz", 4e9),
            M_tau=g.get("M_tau", 8),
            N_nu=g.get("N_nu", 8),
            N_cp=g.get("N_cp", -1),
            F=g.get("F", 5),
        )
    except ValueError as exc:
        raise ConfigError(f"config {path}: {exc}") from exc

    ch = obj.get("channel", {})
    ds = obj.get("dataset", {})
    estimators = tuple(canonical_tag(t) for t in obj.get("estimators", ["raw-single", "raw-avg"]))
    try:
        return ExperimentConfig(
            grid=grid,
            P=ch.get("P", 5),
            gain_profile=ch.get("gain_profile", "equal"),
            fractional=ch.get("fractional", "fdfd"),
            v_max_kmh=obj.get("v_max_kmh", 507.6),
            sigma_p=obj.get("sigma_p", 1.0),
            psnr_grid_db=tuple(obj.get("psnr_grid_db", (0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0))),
            data_snr_grid_db=tuple(
                obj.get("data_snr_grid_db", (0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0))
            ),
            trials=obj.get("trials", 200),
            estimators=estimators,
            seed=obj["seed"],
            weights=obj.get("weights"),
            gamma=obj.get("gamma", 3.0),
            max_atoms=obj.get("max_atoms", 5),
            snapshots_per_psnr=ds.get("snapshots_per_psnr", 6000),
            split_ratio=tuple(ds.get("split_ratio", (0.6, 0.2, 0.2))),
        )
    except ValueError as exc:
        raise ConfigError(f"config {path}: {exc}") from exc
