"""Engine configuration.

One flat dataclass covers every tunable the pipeline exposes.  Values load
from a TOML or JSON file and individual fields can be overridden through
``IVOSEG_<FIELD>`` environment variables (e.g. ``IVOSEG_PORT=9000``).
"""

from __future__ import annotations

import dataclasses
import json
import os
from dataclasses import dataclass
from pathlib import Path

try:
    import tomllib  # py >= 3.11
except ModuleNotFoundError:  # pragma: no cover - py 3.10 path
    import tomli as tomllib

from .errors import FormatError

ENV_PREFIX = "IVOSEG_"


@dataclass(frozen=True)
class EngineConfig:
    # attention sharpness on unit-normalized descriptors; logits are dot/temperature.
    # 0.01 keeps retrieval near-exact: without it a large crowd of mediocre keys
    # out-votes a handful of excellent ones through sheer softmax mass
    temperature: float = 0.01
    # sharpness of the within-frame star attention
    within_temperature: float = 0.05
    heads: int = 2
    # mask-head fusion weights: across-frame readout, local readout, previous mask
    alpha: float = 1.0
    beta: float = 1.0
    gamma: float = 0.5
    # identity-channel provenance weights
    scribble_confidence: float = 1.0
    prev_mask_confidence: float = 0.5
    # spatial coordinate channels are scaled by this before descriptor normalization
    position_weight: float = 0.15
    # decoder batches at most this many objects per attention pass
    capacity: int = 10
    # cross-frame attention pools its key/value token set down to this count
    token_cap: int = 4096
    # memory entries allowed before update_memory fails fast; None = unbounded
    memory_cap: int | None = None
    enhancer_channels: int = 16
    enhancer_seed: int = 0x1DF0
    re_propagate: bool = True
    seed: int = 7
    threads: int = 1
    port: int = 8008
    host: str = "127.0.0.1"

    def __post_init__(self):
        if self.temperature <= 0 or self.within_temperature <= 0:
            raise ValueError("temperatures must be positive")
        if self.heads < 1:
            raise ValueError("heads must be >= 1")
        if self.capacity < 1:
            raise ValueError("capacity must be >= 1")


_FIELD_TYPES = {f.name: f.type for f in dataclasses.fields(EngineConfig)}


def _coerce(name: str, raw: str):
    typ = _FIELD_TYPES[name]
    if typ in ("int", "int | None"):
        return int(raw)
    if typ == "float":
        return float(raw)
    if typ == "bool":
        return raw.lower() in ("1", "true", "yes", "on")
    return raw


def load_config(path: str | Path | None = None, env: dict | None = None) -> EngineConfig:
    """Build a config from an optional TOML/JSON file plus env-var overrides."""
    values: dict = {}
    if path is not None:
        path = Path(path)
        if not path.exists():
            raise FormatError(f"config file not found: {path}")
        text = path.read_text()
        if path.suffix == ".toml":
            values = tomllib.loads(text)
        elif path.suffix == ".json":
            values = json.loads(text)
        else:
            raise FormatError(f"config must be .toml or .json, got {path.suffix!r}")
        unknown = set(values) - set(_FIELD_TYPES)
        if unknown:
            raise FormatError(f"unknown config keys: {sorted(unknown)}")

    env = os.environ if env is None else env
    for name in _FIELD_TYPES:
        key = ENV_PREFIX + name.upper()
        if key in env:
            values[name] = _coerce(name, env[key])
    return EngineConfig(**values)
