"""Training configurations, evaluation scenarios and config-file loading.

A config file is YAML naming a preset plus optional overrides::

    preset: large_dr
    seeds: [0, 1, 2]
    ppo: {num_envs: 64, iterations: 20}
    env: {episode_len: 400}

Resolution order: built-in defaults, then the preset, then the ``--scale``
block, then the file's overrides.
"""
from __future__ import annotations

import copy
import dataclasses
import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml

from ..envdock import DockingConfig, DomainRandomization
from ..learner import PpoConfig
from ..rigidbody import PayloadSpec
from ..vehicle import VehicleConfig


class ConfigError(ValueError):
    """Invalid or inconsistent configuration."""


PRESETS = {
    "naive": {"dr": {"enabled": False, "mass_upper": 0.0, "spawn_radius": 0.0}, "history_len": 1},
    "small_dr": {"dr": {"enabled": True, "mass_upper": 2.5, "spawn_radius": 0.1}, "history_len": 1},
    "large_dr": {"dr": {"enabled": True, "mass_upper": 5.0, "spawn_radius": 0.3}, "history_len": 1},
    "large_dr_history": {"dr": {"enabled": True, "mass_upper": 5.0, "spawn_radius": 0.3}, "history_len": 3},
}
PRESET_NAMES = tuple(PRESETS)

SCALES = {
    "desk": {"num_envs": 256, "iterations": 150},
    "paper": {"num_envs": 2048, "iterations": 500},
}


@dataclass
class TrainingConfig:
    name: str = "naive"
    dr: DomainRandomization = field(default_factory=DomainRandomization)
    history_len: int = 1
    seeds: list = field(default_factory=lambda: [0, 1, 2])
    ppo: PpoConfig = field(default_factory=PpoConfig)
    env: DockingConfig = field(default_factory=DockingConfig)
    vehicle: VehicleConfig = field(default_factory=VehicleConfig)
    checkpoint_every: int = 50

    def __post_init__(self):
        self.env.history_len = self.history_len

    def validate(self) -> None:
        if self.history_len < 1:
            raise ConfigError("history_len must be >= 1")
        if self.checkpoint_every < 1:
            raise ConfigError("checkpoint_every must be >= 1")
        try:
            self.dr.validate()
            self.env.validate()
            self.ppo.validate()
            self.vehicle.mass_properties()
            self.vehicle.hydro_params()
            self.vehicle.thruster_layout()
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "TrainingConfig":
        data = copy.deepcopy(data)
        nested = {"dr": DomainRandomization, "ppo": PpoConfig, "env": DockingConfig, "vehicle": VehicleConfig}
        kwargs = {}
        known = {f.name for f in dataclasses.fields(cls)}
        for key, value in data.items():
            if key not in known:
                raise ConfigError(f"unknown config key {key!r}")
            if key in nested:
                kwargs[key] = _build(nested[key], value or {}, key)
            else:
                kwargs[key] = value
        return cls(**kwargs)

    def hash(self) -> str:
        return config_hash(self.to_dict())


def _build(kind, values: dict, where: str):
    known = {f.name for f in dataclasses.fields(kind)}
    unknown = set(values) - known
    if unknown:
        raise ConfigError(f"unknown key(s) in {where}: {sorted(unknown)}")
    try:
        return kind(**values)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{where}: {exc}") from exc


def config_hash(data: dict) -> str:
    return hashlib.sha256(json.dumps(data, sort_keys=True).encode()).hexdigest()[:16]


def deep_merge(base: dict, override: dict) -> dict:
    out = copy.deepcopy(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = deep_merge(out[key], value)
        else:
            out[key] = copy.deepcopy(value)
    return out


def preset_config(name: str, scale: str | None = None, overrides: dict | None = None) -> TrainingConfig:
    if name not in PRESETS:
        raise ConfigError(f"unknown preset {name!r}; choose from {list(PRESETS)}")
    data = deep_merge(TrainingConfig().to_dict(), PRESETS[name])
    data["name"] = name
    if scale is not None:
        if scale not in SCALES:
            raise ConfigError(f"unknown scale {scale!r}")
        data = deep_merge(data, {"ppo": SCALES[scale]})
    if overrides:
        data = deep_merge(data, overrides)
    data["env"]["history_len"] = data["history_len"]
    cfg = TrainingConfig.from_dict(data)
    cfg.validate()
    return cfg


def load_config(source, scale: str | None = None) -> TrainingConfig:
    """Resolve a YAML file path (or an already-parsed dict) into a config."""
    if isinstance(source, dict):
        raw = copy.deepcopy(source)
    else:
        path = Path(source)
        if not path.is_file():
            raise ConfigError(f"config file not found: {path}")
        try:
            raw = yaml.safe_load(path.read_text()) or {}
        except yaml.YAMLError as exc:
            raise ConfigError(f"{path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config must be a mapping")
    preset = raw.pop("preset", raw.get("name", "naive"))
    return preset_config(preset, scale, raw)


def dump_config(cfg: TrainingConfig) -> str:
    return yaml.safe_dump(cfg.to_dict(), sort_keys=True)


@dataclass(frozen=True)
class EvalScenario:
    name: str
    payload: PayloadSpec
    episodes: int = 20


SCENARIOS = {
    "easy": EvalScenario("easy", PayloadSpec(0.0, np.zeros(3))),
    "medium": EvalScenario("medium", PayloadSpec(3.5, np.array([0.15, 0.0, 0.0]))),
    "hard": EvalScenario("hard", PayloadSpec(7.0, np.array([0.3, 0.0, 0.0]))),
}
SCENARIO_NAMES = tuple(SCENARIOS)


def get_scenario(name: str, episodes: int | None = None) -> EvalScenario:
    if name not in SCENARIOS:
        raise ConfigError(f"unknown scenario {name!r}; choose from {list(SCENARIOS)}")
    scenario = SCENARIOS[name]
    if episodes is not None:
        if episodes < 1:
            raise ConfigError("episodes must be >= 1")
        scenario = dataclasses.replace(scenario, episodes=episodes)
    return scenario
