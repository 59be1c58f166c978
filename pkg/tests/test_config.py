"""
Unit Tests for Configuration Module.

This test suite validates settings loading, layering, the base-seed rule
and schema validation of study and scene documents.
"""
import logging

import pytest

from config import (
    DEFAULT_SEED,
    SEED_ENV_VAR,
    get_base_seed,
    get_default_config,
    load_config,
    load_document,
    merge_overrides,
    validate_document,
)
from models.errors import ConfigError
from schema import SCENE_CONFIG_SCHEMA


def test_get_default_config():
    """Test default configuration values."""
    config = get_default_config()

    assert config["seed"] == DEFAULT_SEED
    assert config["penalty"]["scad_a"] == 3.7
    assert config["path"]["grid_size"] == 30
    assert config["study"]["failure_budget"] == 0.1
    assert config["logging"]["backup_count"] == 3


def test_load_config_from_project_root():
    """Test loading config.yml from project root."""
    config = load_config()

    assert "solver" in config
    assert config["penalty"]["scad_a"] == 3.7


def test_load_config_searches_parent_directories(tmp_path, monkeypatch, caplog):
    (tmp_path / "config.yml").write_text("seed: 11\n")
    nested = tmp_path / "runs" / "today"
    nested.mkdir(parents=True)
    monkeypatch.chdir(nested)

    with caplog.at_level(logging.INFO):
        config = load_config()
    assert config["seed"] == 11
    assert str(tmp_path / "config.yml") in caplog.text


def test_load_config_with_explicit_path(tmp_path):
    """Values in the file win; missing sections keep their defaults."""
    path = tmp_path / "config.yml"
    path.write_text("solver:\n  max_outer_iterations: 50\nseed: 7\n")

    config = load_config(str(path))
    assert config["solver"]["max_outer_iterations"] == 50
    assert config["solver"]["coordinate_tolerance"] == 1e-7
    assert config["seed"] == 7
    assert config["path"] == get_default_config()["path"]


def test_load_config_file_not_found():
    """Test loading config when file doesn't exist."""
    config = load_config("/nonexistent/path/config.yml")

    # Should return default config
    assert config == get_default_config()


def test_load_config_invalid_yaml(tmp_path):
    """Test loading config with invalid YAML."""
    path = tmp_path / "config.yml"
    path.write_text("solver: [unclosed\n")

    assert load_config(str(path)) == get_default_config()


def test_load_config_non_mapping(tmp_path):
    path = tmp_path / "config.yml"
    path.write_text("- just\n- a list\n")

    assert load_config(str(path)) == get_default_config()


def test_merge_overrides_is_deep_and_copies():
    base = {"solver": {"a": 1, "b": 2}, "seed": 1}
    merged = merge_overrides(base, {"solver": {"b": 3}, "extra": [1]})

    assert merged == {"solver": {"a": 1, "b": 3}, "seed": 1, "extra": [1]}
    assert base["solver"]["b"] == 2


class TestBaseSeed:
    def test_config_seed(self):
        assert get_base_seed({"seed": 12}) == 12

    def test_default_when_missing(self):
        assert get_base_seed({}) == DEFAULT_SEED

    def test_environment_wins(self, monkeypatch):
        monkeypatch.setenv(SEED_ENV_VAR, " 42 ")
        assert get_base_seed({"seed": 12}) == 42

    def test_invalid_environment(self, monkeypatch):
        monkeypatch.setenv(SEED_ENV_VAR, "forty-two")
        with pytest.raises(ConfigError) as exc_info:
            get_base_seed({})
        assert exc_info.value.field_path == SEED_ENV_VAR

    def test_negative_seed(self):
        with pytest.raises(ConfigError):
            get_base_seed({"seed": -1})

    def test_non_integer_seed(self):
        with pytest.raises(ConfigError):
            get_base_seed({"seed": 1.5})


class TestDocuments:
    def test_load_json_document(self, tmp_path):
        path = tmp_path / "scene.json"
        path.write_text('{"sign": -1}')
        assert load_document(str(path)) == {"sign": -1}

    def test_missing_document(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            load_document(str(tmp_path / "none.json"))

    def test_document_must_be_mapping(self, tmp_path):
        path = tmp_path / "scene.yml"
        path.write_text("- 1\n")
        with pytest.raises(ConfigError, match="mapping"):
            load_document(str(path))

    def test_validation_reports_nested_path(self):
        with pytest.raises(ConfigError) as exc_info:
            validate_document({"grid": {"x_range": [0, "a"]}}, SCENE_CONFIG_SCHEMA, "scene")
        assert exc_info.value.field_path == "scene.grid.x_range[1]"

    def test_valid_document_passes(self):
        validate_document({"sign": 1, "grid": {"nx": 5}}, SCENE_CONFIG_SCHEMA, "scene")
