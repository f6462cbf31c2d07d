import json
import math

import pytest

from slipfield.config import (
    CONFIG_ENV_VAR,
    KNOWN_KEYS,
    load_config,
    parse_config,
    render_config,
)
from slipfield.errors import ConfigError
from slipfield.models.params import CosineLoad, RunConfig, TabulatedLoad


def test_empty_document_gives_defaults():
    cfg = parse_config("")

    assert cfg == RunConfig()
    assert cfg.grid.Nx == 256 and cfg.grid.Ny == 128
    assert cfg.output.snapshots == 50


def test_dotted_keys_are_applied():
    cfg = parse_config(json.dumps({
        "load.kind": "cosine",
        "load.amplitude": 1.0,
        "load.omega": 0.5,
        "T": 8 * math.pi,
        "ic.x0": 0.0,
    }))

    assert cfg.load == CosineLoad(amplitude=1.0, omega=0.5)
    assert cfg.params.T == pytest.approx(25.132741228718345)


@pytest.mark.parametrize(
    "document, key",
    [
        ({"Nx": 0}, "Nx"),
        ({"alpha": -1.0}, "alpha"),
        ({"load.kind": "square"}, "load.kind"),
        ({"ic.x0": 2.5}, "ic.x0"),
        ({"output.snapshots": 1}, "output.snapshots"),
        ({"solver.max_order": 3}, "solver.max_order"),
        ({"mystery": 1}, "mystery"),
    ],
)
def test_invalid_values_name_the_key(document, key):
    with pytest.raises(ConfigError) as excinfo:
        parse_config(json.dumps(document))

    assert excinfo.value.key == key
    assert key in str(excinfo.value)


def test_table_load_must_cover_horizon():
    doc = {"load.kind": "table", "load.times": [0.0, 1.0], "load.values": [0.0, 1.0], "T": 4.0}

    with pytest.raises(ConfigError) as excinfo:
        parse_config(json.dumps(doc))

    assert excinfo.value.key == "load.times"


def test_malformed_json():
    with pytest.raises(ConfigError):
        parse_config("{not json")
    with pytest.raises(ConfigError):
        parse_config("[1, 2]")


@pytest.mark.parametrize(
    "document",
    [
        {},
        {"load.kind": "cosine", "load.amplitude": 0.25, "T": 8 * math.pi, "Nx": 64, "Ny": 32},
        {"load.kind": "table", "load.times": [0.0, 1.5, 4.0], "load.values": [0.1, 0.3, 0.2]},
        {"ic.kind": "uniform", "ic.value": 0.03, "coupling": False, "solver.rtol": 1e-5},
    ],
)
def test_render_parse_round_trip(document):
    cfg = parse_config(json.dumps(document))

    assert parse_config(render_config(cfg)) == cfg


def test_rendered_document_only_uses_known_keys():
    cfg = parse_config(json.dumps({"load.kind": "table", "load.times": [0, 4], "load.values": [1, 1]}))

    assert isinstance(cfg.load, TabulatedLoad)
    assert set(json.loads(render_config(cfg))) <= KNOWN_KEYS


def test_load_config_from_env(tmp_path, monkeypatch):
    path = tmp_path / "run.json"
    path.write_text(json.dumps({"Nx": 64, "Ny": 32}), encoding="utf-8")
    monkeypatch.setenv(CONFIG_ENV_VAR, str(path))

    cfg = load_config()

    assert (cfg.grid.Nx, cfg.grid.Ny) == (64, 32)


def test_missing_config_file(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "absent.json")
