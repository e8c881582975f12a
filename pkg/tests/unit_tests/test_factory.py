"""Tests for the BttStudio factory."""

import logging
import os

import pytest
from pydantic import ValidationError

from bttrep import BttConfig, BttStudioFactory, create_studio
from bttrep.factory import load_config
from bttrep.services.counting.counting import CountingService
from bttrep.services.synthesis.synthesis import SynthesisService
from bttrep.studio.regression import RELATIVE_RECORD
from bttrep.studio.studio import BttStudio
from tests.utils.factories import write_class_data


class TestBttConfig:
    """Test configuration loading."""

    def test_default_config(self):
        """Test creating a config with defaults."""
        config = BttConfig()
        assert config.discriminant_bound == 1_000_000
        assert config.bfs_depth_bound == 12
        assert config.residue_enumeration_bound == 64
        assert config.class_data_path is None
        assert config.allow_infinite_ramification is False
        assert config.log_level == "WARNING"

    def test_environment_variables(self, monkeypatch):
        """Test that BTTREP_ variables are read."""
        monkeypatch.setenv("BTTREP_BFS_DEPTH_BOUND", "20")
        monkeypatch.setenv("BTTREP_LOG_LEVEL", "debug")
        config = BttConfig()
        assert config.bfs_depth_bound == 20
        assert config.log_level == "DEBUG"

    def test_expand_class_data_path_with_tilde(self):
        """Test that ~ is expanded in class data paths."""
        config = BttConfig(class_data_path="~/classdata.json")
        assert config.class_data_path.startswith(os.path.expanduser("~"))

    @pytest.mark.parametrize(
        "overrides",
        [
            {"bfs_depth_bound": 0},
            {"discriminant_bound": -1},
            {"approximation_retries": -1},
            {"log_level": "LOUD"},
        ],
    )
    def test_invalid_values_raise_error(self, overrides):
        """Test that bounds and levels are validated."""
        with pytest.raises(ValidationError):
            BttConfig(**overrides)

    def test_configure_logging(self, mocker):
        """Test that the root logger is configured with the level."""
        basic_config = mocker.patch("bttrep.config.logging.basicConfig")
        BttConfig(log_level="INFO").configure_logging()
        assert basic_config.call_args.kwargs["level"] == logging.INFO

    def test_from_toml(self, tmp_path):
        """Test loading config from TOML file."""
        config_file = tmp_path / "config.toml"
        config_file.write_text(
            """
[bttrep]
bfs_depth_bound = 16
group_order_bound = 128
allow_infinite_ramification = true
"""
        )

        config = BttConfig.from_toml(config_file)
        assert config.bfs_depth_bound == 16
        assert config.group_order_bound == 128
        assert config.allow_infinite_ramification is True

    def test_from_toml_without_bttrep_key(self, tmp_path):
        """Test loading config from TOML file without 'bttrep' key."""
        config_file = tmp_path / "config.toml"
        config_file.write_text("unit_exponent_bound = 4\n")

        assert BttConfig.from_toml(config_file).unit_exponent_bound == 4

    def test_from_yaml(self, tmp_path):
        """Test loading config from YAML file."""
        config_file = tmp_path / "config.yaml"
        config_file.write_text("bttrep:\n  approximation_retries: 3\n  log_level: error\n")

        config = BttConfig.from_file(config_file)
        assert config.approximation_retries == 3
        assert config.log_level == "ERROR"

    def test_from_file_unsupported_format_raises_error(self, tmp_path):
        """Test that unsupported file format raises error."""
        config_file = tmp_path / "config.json"
        config_file.write_text("{}")

        with pytest.raises(ValueError, match="Unsupported configuration file format"):
            BttConfig.from_file(config_file)

    def test_missing_file_raises_error(self, tmp_path):
        """Test that a missing configuration file raises error."""
        with pytest.raises(FileNotFoundError):
            BttConfig.from_toml(tmp_path / "absent.toml")

    def test_load_config_overrides(self, tmp_path):
        """Test that keyword overrides win over the file."""
        config_file = tmp_path / "config.toml"
        config_file.write_text("[bttrep]\nbfs_depth_bound = 16\ngroup_order_bound = 128\n")

        config = load_config(config_file, bfs_depth_bound=4)
        assert config.bfs_depth_bound == 4
        assert config.group_order_bound == 128


class TestBttStudioFactory:
    """Test BttStudio factory."""

    def test_create_with_config(self):
        """Test creating BttStudio with explicit config."""
        studio = BttStudioFactory.create(config=BttConfig(bfs_depth_bound=5, approximation_retries=2))
        assert isinstance(studio, BttStudio)
        assert isinstance(studio.counting_service, CountingService)
        assert isinstance(studio.synthesis_service, SynthesisService)
        assert studio.counting_service.options.bfs_depth_bound == 5
        assert studio.synthesis_service.approximation_retries == 2

    def test_class_data_is_loaded(self, tmp_path, K5):
        """Test that the class data table is read from class_data_path."""
        path = write_class_data(tmp_path, [RELATIVE_RECORD])
        options = BttStudioFactory.build_options(BttConfig(class_data_path=str(path)))
        assert options.class_data.source == str(path)
        assert options.class_data.find(K5, K5.element(-1)) is not None

    def test_missing_class_data_raises_error(self, tmp_path):
        """Test that a configured but absent class data file raises error."""
        with pytest.raises(FileNotFoundError, match="Class data file not found"):
            BttStudioFactory.build_options(BttConfig(class_data_path=str(tmp_path / "absent.json")))

    def test_create_from_config_file(self, tmp_path):
        """Test creating BttStudio from config file."""
        config_file = tmp_path / "config.toml"
        config_file.write_text("[bttrep]\ngroup_order_bound = 64\n")

        studio = BttStudioFactory.create_from_config_file(config_file)
        assert studio.counting_service.options.group_order_bound == 64

    def test_create_from_env(self, monkeypatch):
        """Test creating BttStudio from environment variables."""
        monkeypatch.setenv("BTTREP_GROUP_ORDER_BOUND", "32")
        studio = BttStudioFactory.create_from_env()
        assert studio.counting_service.options.group_order_bound == 32

    def test_create_studio_convenience_function(self, tmp_path):
        """Test convenience function with config file and overrides."""
        config_file = tmp_path / "config.toml"
        config_file.write_text("[bttrep]\nbfs_depth_bound = 16\n")

        studio = create_studio(config_file=config_file, bfs_depth_bound=8)
        assert isinstance(studio, BttStudio)
        assert studio.counting_service.options.bfs_depth_bound == 8
