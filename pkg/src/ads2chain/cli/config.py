"""Experiment configuration: TOML parsing, defaults and validation."""

from __future__ import annotations

import copy
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from ..geometry import LatticeGeometry
from ..model import ModelParams

KINDS = ("spectrum", "heatmap", "ee", "gap", "chirality", "current", "otoc",
         "rstats", "quench", "continuum", "validate")
FF_CAPABLE = {"heatmap", "ee", "gap", "chirality", "continuum"}
ENGINES = ("ed", "ff", "auto")

GEOMETRY_DEFAULTS = {"num_sites": 12, "spacing": 1.0, "ads_radius": 1.0,
                     "horizon_radius": 0.0, "background": "ads"}
MODEL_DEFAULTS = {"mass": 0.0, "chem_potential": 0.0, "disorder_width": 0.0,
                  "disorder_weighted": False, "seed": 0, "chiral_weighting": "bond",
                  "redshift": "raw"}

# experiment-specific sweep defaults; every key is echoed into metadata
SWEEP_DEFAULTS = {
    "spectrum": {},
    "heatmap": {"mL_range": [-10.0, 10.0], "muL_range": [-10.0, 10.0], "grid": [41, 41],
                "energy_convention": "full"},
    "ee": {"num_sites": [12, 16, 20], "mL": [0.0, 1.0], "cuts": "half"},
    "gap": {"num_sites": [10], "horizon_radius": [0.0], "mass": [1.0],
            "horizon_over_N": False},
    "chirality": {"num_sites": [20, 40, 80]},
    "current": {"horizon_radius": [0.0], "mass": [0.1], "t_max": 50.0, "n_times": 200,
                "weighted": False, "initial": "massless_ground"},
    "otoc": {"horizon_radius": [0.0], "mass": [0.5], "bonds": [4, 8], "t_max": 20.0,
             "n_times": 2001, "reference": "ground"},
    "rstats": {"horizon_radius": [1.0], "mass": [0.5], "poly_degree": 6, "min_levels": 10,
               "brody_method": "lsq"},
    "quench": {"disorder_width": [5.0], "horizon_radius": [1.0], "n_samples": 100,
               "t_max": 50.0, "n_times": 200, "weighted": False, "tail_fraction": 0.4},
    "continuum": {"num_sites": [64, 144, 256]},
    "validate": {"quick": True},
}


class ConfigError(ValueError):
    """Invalid configuration; the message names the offending key."""


@dataclass
class ExperimentConfig:
    kind: str
    geometry: dict
    model: dict
    sweep: dict
    engine: str = "auto"
    output: dict = field(default_factory=dict)
    name: str = ""

    def resolved_engine(self) -> str:
        if self.engine == "auto":
            return "ff" if self.kind in FF_CAPABLE else "ed"
        return self.engine

    def make_geometry(self, **overrides) -> LatticeGeometry:
        g = {**self.geometry, **overrides}
        L = g["ads_radius"]
        if isinstance(L, str):
            L = math.inf if L.lower() == "inf" else float(L)
        return LatticeGeometry(int(g["num_sites"]), float(g["spacing"]), L,
                               float(g["horizon_radius"]), g["background"])

    def make_params(self, **overrides) -> ModelParams:
        p = {**self.model, **overrides}
        return ModelParams(float(p["mass"]), float(p["chem_potential"]),
                           float(p["disorder_width"]), bool(p["disorder_weighted"]),
                           int(p["seed"]), 0, p["chiral_weighting"], p["redshift"])

    def to_dict(self) -> dict:
        return {"experiment": self.kind, "name": self.name, "engine": self.engine,
                "resolved_engine": self.resolved_engine(),
                "geometry": copy.deepcopy(self.geometry), "model": copy.deepcopy(self.model),
                "sweep": copy.deepcopy(self.sweep), "output": copy.deepcopy(self.output)}


def _merge(defaults: dict, given: dict, section: str) -> dict:
    unknown = set(given) - set(defaults)
    if unknown:
        raise ConfigError(f"unknown key(s) in [{section}]: {', '.join(sorted(unknown))}")
    out = copy.deepcopy(defaults)
    out.update(given)
    return out


def parse_config(data: dict) -> ExperimentConfig:
    """Validate a raw mapping and fill in every default."""
    data = dict(data)
    kind = data.pop("experiment", None)
    if kind not in KINDS:
        raise ConfigError(f"'experiment' must be one of {KINDS}, got {kind!r}")
    engine = data.pop("engine", "auto")
    if engine not in ENGINES:
        raise ConfigError(f"'engine' must be one of {ENGINES}, got {engine!r}")
    name = str(data.pop("name", ""))
    geometry = _merge(GEOMETRY_DEFAULTS, data.pop("geometry", {}), "geometry")
    model = _merge(MODEL_DEFAULTS, data.pop("model", {}), "model")
    sweep = _merge(SWEEP_DEFAULTS[kind], data.pop("sweep", {}), "sweep")
    output = _merge({"svg": False, "dir": None}, data.pop("output", {}), "output")
    if data:
        raise ConfigError(f"unknown top-level key(s): {', '.join(sorted(data))}")
    if engine == "ff" and kind not in FF_CAPABLE:
        raise ConfigError(f"'engine': experiment {kind!r} needs the ed engine")

    if kind == "heatmap" and sweep["energy_convention"] not in ("full", "traceless"):
        raise ConfigError("'sweep.energy_convention' must be 'full' or 'traceless'")
    if "grid" in sweep:
        g = sweep["grid"]
        if len(g) != 2 or min(g) < 1:
            raise ConfigError("'sweep.grid' must be two sizes >= 1")
    for key in ("n_samples", "n_times"):
        if key in sweep and int(sweep[key]) < 1:
            raise ConfigError(f"'sweep.{key}' must be >= 1")
    cfg = ExperimentConfig(kind, geometry, model, sweep, engine, output, name)
    try:
        cfg.make_geometry()
        cfg.make_params()
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"invalid geometry/model block: {exc}") from exc
    return cfg


def loads(text: str) -> ExperimentConfig:
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"cannot parse config: {exc}") from exc
    return parse_config(data)


def load(path) -> ExperimentConfig:
    return loads(Path(path).read_text())
