"""Experiment configuration: a single human-editable YAML document that fully
determines a sweep.  Rerunning the same config (same seed) reproduces every
number bit for bit; the canonical serialization is hashed into every result
row for traceability.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import yaml

from .errors import ConfigError
from .measures import MeasureSpec, measure_from_dict, measure_to_dict, validate_measure
from .quadrature import DEFAULT_MAX_NODES
from .sets import SetFamily, family_from_dict, family_to_dict

__all__ = [
    "FunctionalSpec",
    "ExperimentConfig",
    "parse_config",
    "load_config",
    "serialize_config",
    "config_hash",
    "KNOWN_FUNCTIONALS",
]

SCHEMA_VERSION = 1

# name -> (defaults, validator)
KNOWN_FUNCTIONALS = {
    "density": {"r": 2.0},
    "harmonic": {},
    "eigen": {},
    "pnorm": {"p": 2.0, "restarts": 6},
    "supnorm": {"samples": 50, "weight": None},
    "weights": {"scales": [0.1, 0.2, 0.4], "n_caps": 12, "seed": 0},
    "regularize": {"eps": 0.5, "delta": None, "r": 2.0},
}


@dataclass(frozen=True)
class FunctionalSpec:
    name: str
    tag: str
    params: dict


@dataclass(frozen=True)
class ExperimentConfig:
    d: int
    L_list: tuple
    family: SetFamily
    measure: MeasureSpec
    functionals: tuple
    seed: int = 0
    label: str = ""
    oversample: float = 4.0
    spacing_factor: float = 2.5
    max_nodes: int = DEFAULT_MAX_NODES
    resolution_factor: int = 6
    schema: int = SCHEMA_VERSION


def _require(cond: bool, field_name: str, msg: str):
    if not cond:
        raise ConfigError(f"field {field_name!r}: {msg}")


def _parse_functional(entry, index: int) -> FunctionalSpec:
    where = f"functionals[{index}]"
    if isinstance(entry, str):
        entry = {"name": entry}
    _require(isinstance(entry, dict), where, "must be a name or a mapping")
    name = entry.get("name")
    _require(name in KNOWN_FUNCTIONALS, f"{where}.name", f"unknown functional {name!r}")
    params = dict(KNOWN_FUNCTIONALS[name])
    for key, val in entry.items():
        if key in ("name", "tag"):
            continue
        _require(key in params, f"{where}.{key}", f"unknown parameter for {name}")
        params[key] = val
    if name == "density":
        _require(params["r"] > 0, f"{where}.r", "must be positive")
    if name == "pnorm":
        _require(params["p"] >= 1, f"{where}.p", "must be >= 1")
        _require(int(params["restarts"]) >= 1, f"{where}.restarts", "must be >= 1")
    if name == "supnorm":
        _require(int(params["samples"]) >= 1, f"{where}.samples", "must be >= 1")
        if params["weight"] is not None:
            try:
                measure_from_dict(params["weight"])
            except (KeyError, ValueError, TypeError) as exc:
                raise ConfigError(f"field {where}.weight: {exc}") from exc
    if name == "regularize":
        _require(params["eps"] > 0, f"{where}.eps", "must be positive")
    tag = entry.get("tag", name)
    return FunctionalSpec(name=name, tag=str(tag), params=params)


def parse_config(text: str) -> ExperimentConfig:
    """Parse and validate a YAML experiment config; raises ConfigError with the
    offending field on any problem."""
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"not valid YAML: {exc}") from exc
    _require(isinstance(data, dict), "<document>", "must be a mapping")

    d = data.get("d")
    _require(d in (1, 2), "d", "must be 1 or 2")
    L_list = data.get("L_list")
    _require(
        isinstance(L_list, list) and L_list and all(isinstance(x, int) and x >= 1 for x in L_list),
        "L_list",
        "must be a nonempty list of integers >= 1",
    )
    _require("family" in data, "family", "missing")
    try:
        family = family_from_dict(data["family"])
    except (KeyError, ValueError, TypeError) as exc:
        raise ConfigError(f"field 'family': {exc}") from exc
    try:
        measure = measure_from_dict(data.get("measure", {"kind": "lebesgue"}))
        validate_measure(measure, d)
    except (KeyError, ValueError, TypeError) as exc:
        raise ConfigError(f"field 'measure': {exc}") from exc

    raw_fn = data.get("functionals")
    _require(isinstance(raw_fn, list) and raw_fn, "functionals", "must be a nonempty list")
    functionals = tuple(_parse_functional(f, i) for i, f in enumerate(raw_fn))
    tags = [f.tag for f in functionals]
    _require(len(set(tags)) == len(tags), "functionals", "tags must be unique (set 'tag')")

    quad = data.get("quadrature", {})
    _require(isinstance(quad, dict), "quadrature", "must be a mapping")
    oversample = float(quad.get("oversample", 4.0))
    _require(oversample >= 1.0, "quadrature.oversample", "must be >= 1")
    spacing_factor = float(quad.get("spacing_factor", 2.5))
    _require(spacing_factor > 0, "quadrature.spacing_factor", "must be positive")
    max_nodes = int(quad.get("max_nodes", DEFAULT_MAX_NODES))

    res = data.get("resolution", {})
    _require(isinstance(res, dict), "resolution", "must be a mapping")
    resolution_factor = int(res.get("per_great_circle_factor", 6))
    _require(resolution_factor >= 1, "resolution.per_great_circle_factor", "must be >= 1")

    seed = int(data.get("seed", 0))
    label = str(data.get("label") or data["family"].get("label", "") or family.label)
    schema = int(data.get("schema", SCHEMA_VERSION))
    _require(schema == SCHEMA_VERSION, "schema", f"supported schema version is {SCHEMA_VERSION}")

    return ExperimentConfig(
        d=d,
        L_list=tuple(L_list),
        family=family,
        measure=measure,
        functionals=functionals,
        seed=seed,
        label=label,
        oversample=oversample,
        spacing_factor=spacing_factor,
        max_nodes=max_nodes,
        resolution_factor=resolution_factor,
        schema=schema,
    )


def load_config(path) -> ExperimentConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read())


def _config_dict(cfg: ExperimentConfig) -> dict:
    fns = []
    for f in cfg.functionals:
        entry = {"name": f.name, "tag": f.tag}
        entry.update({k: v for k, v in f.params.items() if v is not None})
        fns.append(entry)
    return {
        "schema": cfg.schema,
        "d": cfg.d,
        "L_list": list(cfg.L_list),
        "seed": cfg.seed,
        "label": cfg.label,
        "family": family_to_dict(cfg.family),
        "measure": measure_to_dict(cfg.measure),
        "functionals": fns,
        "quadrature": {
            "oversample": cfg.oversample,
            "spacing_factor": cfg.spacing_factor,
            "max_nodes": cfg.max_nodes,
        },
        "resolution": {"per_great_circle_factor": cfg.resolution_factor},
    }


def serialize_config(cfg: ExperimentConfig) -> str:
    """Canonical YAML form; parse(serialize(parse(text))) is stable."""
    return yaml.safe_dump(_config_dict(cfg), sort_keys=True, default_flow_style=False)


def config_hash(cfg: ExperimentConfig) -> str:
    return hashlib.sha256(serialize_config(cfg).encode("utf-8")).hexdigest()[:12]
