# -*- coding: utf-8 -*-
"""
Experiment Configuration
JSON experiment documents for the CLI and the API server. Thresholds and
gains are given in dB; everything downstream works in linear units.

Environment overrides (read after loading .env):
    METADIST_SEED, METADIST_WORKERS
Precedence: command-line flag > environment > config file.
"""

import json
import math
import os
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional

import numpy as np
from dotenv import load_dotenv

from errors import ConfigError
from point_processes import Poisson, Window
from sir_core import TierSpec, parse_number

load_dotenv()

MODES = ("g0", "gb", "moments", "meta-analytic", "meta-beta", "meta-sim", "hcn", "critical-theta", "compare")

# modes that evaluate the per-tier analytic approximation
GAIN_MODES = ("meta-analytic", "meta-beta", "hcn", "compare")


def _section(data: Dict, name: str) -> Dict:
    value = data.get(name, {})
    if not isinstance(value, dict):
        raise ConfigError(name, "expected an object")
    return value


def _number_list(data: Dict, name: str, default: List[float]) -> List[float]:
    values = data.get(name, default)
    if not isinstance(values, list):
        raise ConfigError(name, "expected a list of numbers")
    return [parse_number(name, v) for v in values]


@dataclass(frozen=True)
class ThetaGrid:
    """start_db, start_db + step_db, ... up to and including stop_db."""

    start_db: float = -20.0
    stop_db: float = 10.0
    step_db: float = 1.0

    def __post_init__(self):
        if not self.step_db > 0:
            raise ConfigError("theta_grid.step_db", f"must be > 0, got {self.step_db}")
        if self.stop_db < self.start_db:
            raise ConfigError("theta_grid.stop_db", "must not be below start_db")

    def values_db(self) -> np.ndarray:
        count = int(math.floor((self.stop_db - self.start_db) / self.step_db + 1e-9)) + 1
        return self.start_db + self.step_db * np.arange(count)

    def to_dict(self) -> Dict:
        return {"start_db": self.start_db, "stop_db": self.stop_db, "step_db": self.step_db}


@dataclass
class ExperimentConfig:
    mode: str
    tiers: List[TierSpec]
    window: Window = field(default_factory=Window)
    theta_grid: ThetaGrid = field(default_factory=ThetaGrid)
    xs: List[float] = field(default_factory=lambda: [0.95])
    b_values: List[float] = field(default_factory=lambda: [1.0, 2.0])
    n: int = 100_000
    seed: int = 0
    out: Optional[str] = None
    workers: Optional[int] = None

    def __post_init__(self):
        self.validate()

    def validate(self):
        if self.mode not in MODES:
            raise ConfigError("mode", f"unknown mode {self.mode!r}; expected one of {list(MODES)}")
        if not self.tiers:
            raise ConfigError("tiers", "at least one tier is required")
        if self.n < 1:
            raise ConfigError("n", f"realization count must be >= 1, got {self.n}")
        if not self.xs:
            raise ConfigError("xs", "empty reliability grid")
        for x in self.xs:
            if not 0.0 <= x <= 1.0:
                raise ConfigError("xs", f"reliability {x} outside [0, 1]")
        if self.mode in ("gb", "moments") and not self.b_values:
            raise ConfigError("b_values", f"mode {self.mode} needs at least one moment order")
        if self.mode == "gb" and any(b <= 0 for b in self.b_values):
            raise ConfigError("b_values", "gain orders must be > 0")
        if self.mode in GAIN_MODES:
            for k, tier in enumerate(self.tiers):
                if tier.gain_db is None and not isinstance(tier.kind, Poisson):
                    raise ConfigError(f"tiers[{k}].gain_db", f"required for mode {self.mode}")
        if self.workers is not None and self.workers < 1:
            raise ConfigError("workers", f"must be >= 1, got {self.workers}")

    def to_dict(self) -> Dict:
        data = {
            "mode": self.mode,
            "tiers": [t.to_dict() for t in self.tiers],
            "window": {"half_extent": self.window.half_extent},
            "theta_grid": self.theta_grid.to_dict(),
            "xs": list(self.xs),
            "b_values": list(self.b_values),
            "n": self.n,
            "seed": self.seed,
        }
        if self.out is not None:
            data["out"] = self.out
        if self.workers is not None:
            data["workers"] = self.workers
        return data

    @classmethod
    def from_dict(cls, data: Dict) -> "ExperimentConfig":
        if not isinstance(data, dict):
            raise ConfigError("config", "expected a JSON object")
        if "mode" not in data:
            raise ConfigError("mode", "missing")
        tiers = data.get("tiers")
        if not isinstance(tiers, list) or not all(isinstance(t, dict) for t in tiers):
            raise ConfigError("tiers", "expected a list of tier objects")
        window = _section(data, "window")
        grid = _section(data, "theta_grid")
        workers = data.get("workers")
        try:
            return cls(
                mode=data["mode"],
                tiers=[TierSpec.from_dict(t) for t in tiers],
                window=Window(**{k: parse_number(f"window.{k}", v) for k, v in window.items()}),
                theta_grid=ThetaGrid(**{k: parse_number(f"theta_grid.{k}", v) for k, v in grid.items()}),
                xs=_number_list(data, "xs", [0.95]),
                b_values=_number_list(data, "b_values", [1.0, 2.0]),
                n=parse_number("n", data.get("n", 100_000), int),
                seed=parse_number("seed", data.get("seed", 0), int),
                out=data.get("out"),
                workers=None if workers is None else parse_number("workers", workers, int),
            )
        except TypeError as e:
            raise ConfigError("config", str(e))

    @classmethod
    def load(cls, path: str, mode: Optional[str] = None) -> "ExperimentConfig":
        """Read a JSON config; `mode` (the CLI subcommand) replaces the stored one."""
        try:
            with open(path, "r", encoding="utf-8") as f:
                data = json.load(f)
        except FileNotFoundError:
            raise ConfigError("config", f"file not found: {path}")
        except json.JSONDecodeError as e:
            raise ConfigError("config", f"{path} is not valid JSON: {e}")
        if mode is not None and isinstance(data, dict):
            data = dict(data, mode=mode)
        return cls.from_dict(data)

    def dump(self, path: str):
        with open(path, "w", encoding="utf-8") as f:
            json.dump(self.to_dict(), f, indent=2)


def env_int(name: str) -> Optional[int]:
    raw = os.getenv(name)
    if raw is None or raw == "":
        return None
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(name, f"not an integer: {raw!r}")


def with_env_overrides(config: ExperimentConfig) -> ExperimentConfig:
    seed = env_int("METADIST_SEED")
    workers = env_int("METADIST_WORKERS")
    changes = {}
    if seed is not None:
        changes["seed"] = seed
    if workers is not None:
        changes["workers"] = workers
    return replace(config, **changes) if changes else config


def with_cli_overrides(config: ExperimentConfig, seed: Optional[int] = None, n: Optional[int] = None,
                       out: Optional[str] = None, workers: Optional[int] = None) -> ExperimentConfig:
    changes = {k: v for k, v in {"seed": seed, "n": n, "out": out, "workers": workers}.items() if v is not None}
    return replace(config, **changes) if changes else config
