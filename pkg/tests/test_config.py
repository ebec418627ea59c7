from __future__ import annotations

import json

import pytest

from shapedtw_depth.config import RunConfig
from shapedtw_depth.descriptors import default_descriptor
from shapedtw_depth.exceptions import ConfigError


def test_defaults_build_the_default_pipeline():
    cfg = RunConfig().match_config()
    assert cfg.window_ft == 20.0
    assert cfg.margin_frac == 0.1
    assert cfg.samples_per_ft is None
    assert cfg.band_halfwidth is None
    assert cfg.descriptor == default_descriptor()


def test_from_mapping_coerces_types():
    cfg = RunConfig.from_mapping({"window_ft": 15, "cell_size": 20.0, "descriptor": "grad", "band": 12})
    assert cfg.window_ft == 15.0 and isinstance(cfg.window_ft, float)
    assert cfg.cell_size == 20 and isinstance(cfg.cell_size, int)
    assert cfg.descriptor_config().kind == "gradient"
    assert cfg.match_config().band_halfwidth == 12


@pytest.mark.parametrize(
    "data, message",
    [
        ({"windowft": 20}, "unknown config key"),
        ({"cell_size": 2.5}, "must be an integer"),
        ({"cell_size": True}, "must be a number"),
        ({"margin_frac": "0.1"}, "must be a number"),
        ({"descriptor": "sift"}, "must be one of"),
        ({"window_ft": None}, "may not be null"),
    ],
)
def test_from_mapping_rejects_bad_entries(data, message):
    with pytest.raises(ConfigError, match=message):
        RunConfig.from_mapping(data)


def test_load_json_file(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"window_ft": 25, "hog_weight": 2, "radius": None}), encoding="utf-8")
    cfg = RunConfig.load(path)
    assert cfg.window_ft == 25.0
    assert cfg.hog_weight == 2.0
    assert cfg.radius is None


@pytest.mark.parametrize("text", ["{not json", "[1, 2]"])
def test_load_rejects_malformed_files(tmp_path, text):
    path = tmp_path / "cfg.json"
    path.write_text(text, encoding="utf-8")
    with pytest.raises(ConfigError):
        RunConfig.load(path)


def test_merged_overrides_only_given_values():
    base = RunConfig(window_ft=25.0, cell_size=30)
    merged = base.merged({"window_ft": None, "cell_size": 40, "margin_frac": 0.2})
    assert merged.window_ft == 25.0
    assert merged.cell_size == 40
    assert merged.margin_frac == 0.2
    with pytest.raises(ConfigError):
        base.merged({"bogus": 1})


def test_invalid_values_surface_from_the_built_configs():
    with pytest.raises(ConfigError):
        RunConfig(window_ft=40.0).match_config()
    with pytest.raises(ConfigError, match="degenerate compound"):
        RunConfig(hog_weight=0.0, raw_weight=0.0).descriptor_config()


def test_to_dict_round_trips():
    cfg = RunConfig(descriptor="hog1d", radius=50, samples_per_ft=8.0)
    assert RunConfig.from_mapping(cfg.to_dict()) == cfg
