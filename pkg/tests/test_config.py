"""Config loading: file plus environment overrides."""
from __future__ import annotations

import pytest

from ivoseg.config import EngineConfig, load_config
from ivoseg.errors import FormatError


def test_defaults():
    cfg = EngineConfig()
    assert cfg.temperature == 0.01
    assert cfg.within_temperature == 0.05
    assert cfg.heads == 2
    assert (cfg.alpha, cfg.beta, cfg.gamma) == (1.0, 1.0, 0.5)
    assert cfg.capacity == 10
    assert cfg.token_cap == 4096
    assert cfg.memory_cap is None
    assert cfg.re_propagate is True
    assert cfg.port == 8008


def test_validation():
    with pytest.raises(ValueError):
        EngineConfig(temperature=0.0)
    with pytest.raises(ValueError):
        EngineConfig(heads=0)
    with pytest.raises(ValueError):
        EngineConfig(capacity=0)


def test_load_toml(tmp_path):
    path = tmp_path / "engine.toml"
    path.write_text('temperature = 0.02\ncapacity = 5\nhost = "0.0.0.0"\n')
    cfg = load_config(path, env={})
    assert cfg.temperature == 0.02
    assert cfg.capacity == 5
    assert cfg.host == "0.0.0.0"
    assert cfg.heads == 2  # untouched default


def test_load_json(tmp_path):
    path = tmp_path / "engine.json"
    path.write_text('{"gamma": 0.25, "re_propagate": false}')
    cfg = load_config(path, env={})
    assert cfg.gamma == 0.25
    assert cfg.re_propagate is False


def test_env_overrides_beat_file(tmp_path):
    path = tmp_path / "engine.toml"
    path.write_text("port = 9100\nalpha = 0.5\n")
    env = {
        "IVOSEG_PORT": "9200",
        "IVOSEG_CAPACITY": "7",
        "IVOSEG_TEMPERATURE": "0.03",
        "IVOSEG_BETA": "2.0",
        "IVOSEG_SEED": "99",
        "IVOSEG_RE_PROPAGATE": "false",
    }
    cfg = load_config(path, env=env)
    assert cfg.port == 9200
    assert cfg.alpha == 0.5  # file value survives, no env override
    assert cfg.capacity == 7
    assert cfg.temperature == 0.03
    assert cfg.beta == 2.0
    assert cfg.seed == 99
    assert cfg.re_propagate is False


def test_env_only():
    cfg = load_config(None, env={"IVOSEG_GAMMA": "0.75"})
    assert cfg.gamma == 0.75


def test_env_memory_cap():
    cfg = load_config(None, env={"IVOSEG_MEMORY_CAP": "3"})
    assert cfg.memory_cap == 3


def test_empty_env_is_defaults():
    assert load_config(None, env={}) == EngineConfig()


def test_bad_files(tmp_path):
    with pytest.raises(FormatError):
        load_config(tmp_path / "missing.toml", env={})
    bad = tmp_path / "engine.yaml"
    bad.write_text("a: 1\n")
    with pytest.raises(FormatError):
        load_config(bad, env={})
    unknown = tmp_path / "engine.json"
    unknown.write_text('{"warp_speed": 9}')
    with pytest.raises(FormatError):
        load_config(unknown, env={})
