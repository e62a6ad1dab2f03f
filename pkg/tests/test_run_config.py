import json
import os

import pytest

from errors import ConfigError
from run_config import (
    LEVEL_CAP,
    RunConfig,
    SeedSection,
    Wave2DSection,
    load_run_config,
    membrane_seed,
    parse_ratio,
)


def write_config(tmp_path, data, name="run.json"):
    path = tmp_path / name
    path.write_text(data if isinstance(data, str) else json.dumps(data))
    return str(path)


def test_defaults():
    config = RunConfig()
    assert config.caps.level == LEVEL_CAP
    assert config.seed.kind == "cantor"
    assert config.seed.ratio == pytest.approx(1 / 3)
    assert config.output.directory == "results"
    assert config.wave1d is None


def test_full_document(tmp_path):
    path = write_config(tmp_path, {
        "caps": {"modes_1d": 8},
        "output": {"directory": str(tmp_path / "out")},
        "seed": {"pieces": 2, "ratio": "1/4", "level": 30},
        "wave1d": {"length": 2.0, "profile": "sin(pi*u/2)", "times": [0.0, 1.0]},
        "dispersion": {"k_values": [0.5, 1.0]},
    })
    config = load_run_config(path)
    assert config.seed.ratio == 0.25
    assert config.caps.modes_1d == 8
    assert config.wave1d.length == 2.0
    assert config.wave1d.seed_x is None
    assert config.dispersion.k_values == [0.5, 1.0]


@pytest.mark.parametrize(
    "document, fragment",
    [
        ({"seed": {"pieces": 3, "ratio": 0.4}}, "overlap"),
        ({"seed": {"ratio": "one third"}}, "seed.ratio"),
        ({"wave1d": {"speed_factor": 1.5}}, "wave1d.speed_factor"),
        ({"dispersion": {"k_min": 2.0, "k_max": 1.0}}, "k_max"),
        ({"dispersion": {"k_values": [1.0, -1.0]}}, "positive"),
        ({"lacunary": {"support": "disc"}}, "lacunary.support"),
        ({"colour": "blue"}, "colour"),
    ],
)
def test_invalid_documents_are_itemized(tmp_path, document, fragment):
    with pytest.raises(ConfigError) as info:
        load_run_config(write_config(tmp_path, document))
    assert any(fragment in problem for problem in info.value.problems)
    assert str(tmp_path) in str(info.value)


def test_malformed_json(tmp_path):
    with pytest.raises(ConfigError) as info:
        load_run_config(write_config(tmp_path, '{"seed": '))
    assert info.value.problems[0].startswith("line 1")


def test_parse_ratio():
    assert parse_ratio("1/3") == pytest.approx(1 / 3)
    assert parse_ratio(" 0.25 ") == 0.25
    assert parse_ratio(0.5) == 0.5
    with pytest.raises(ValueError):
        parse_ratio("1/0")


def test_membrane_seed_defaults_to_quarter_cantor():
    assert membrane_seed(RunConfig(wave2d=Wave2DSection())).ratio == 0.25
    explicit = RunConfig(seed=SeedSection(ratio=0.2), wave2d=Wave2DSection())
    assert membrane_seed(explicit).ratio == 0.2
    own = RunConfig(wave2d=Wave2DSection(seed_x=SeedSection(kind="identity")))
    assert membrane_seed(own).kind == "identity"


@pytest.mark.parametrize("name", ["string_1d.json", "membrane_2d.json", "dispersion.json", "lacunary.json"])
def test_bundled_run_configs_validate(name):
    path = os.path.join(os.path.dirname(__file__), os.pardir, "configs", name)
    config = load_run_config(path)
    assert config.output.directory.startswith("results/")
