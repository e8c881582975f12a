"""
Configuration module for bttrep.

This module provides configuration management for the counting and synthesis
services, supporting configuration files (TOML/YAML) and environment variables.
"""

import logging
import os
from pathlib import Path
from typing import Optional

from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

_LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


class BttConfig(BaseSettings):
    """
    Configuration for bttrep.

    This class uses Pydantic Settings to load configuration from multiple sources:
    1. Environment variables (prefixed with BTTREP_)
    2. Configuration files (.toml or .yaml)
    3. Default values

    Attributes:
        discriminant_bound: Largest |disc| of an imaginary quadratic field whose class group is computed.
        real_discriminant_bound: Largest disc of a real quadratic field whose class group is computed.
        residue_enumeration_bound: Largest residue field whose tree neighbors are enumerated.
        bfs_depth_bound: Distance from the seeds at which a branch search gives up.
        group_order_bound: Largest finite matrix group that is enumerated.
        unit_exponent_bound: Exponent range for units of L when searching U_{I'}.
        approximation_retries: Retries of strong approximation, each with higher precision.
        class_data_path: JSON table of class data for degree-4 fields.
        allow_infinite_ramification: Whether L/K may ramify at infinite places in the selectivity check.
        log_level: Root logging level of the command line tool.

    Example:
        >>> # From environment variables
        >>> os.environ["BTTREP_CLASS_DATA_PATH"] = "~/classdata.json"
        >>> config = BttConfig()

        >>> # Direct instantiation
        >>> config = BttConfig(bfs_depth_bound=16, log_level="DEBUG")
    """

    model_config = SettingsConfigDict(
        env_prefix="BTTREP_",
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
        case_sensitive=False,
    )

    # Arithmetic bounds
    discriminant_bound: int = Field(
        default=1_000_000,
        description="Largest |disc| of an imaginary quadratic field with a computed class group",
    )

    real_discriminant_bound: int = Field(
        default=20_000,
        description="Largest disc of a real quadratic field with a computed class group",
    )

    residue_enumeration_bound: int = Field(
        default=64,
        description="Largest residue field size enumerated by the tree",
    )

    # Search bounds
    bfs_depth_bound: int = Field(
        default=12,
        description="Branch search gives up beyond this distance from the seeds",
    )

    group_order_bound: int = Field(
        default=512,
        description="Largest finite matrix group that is enumerated",
    )

    unit_exponent_bound: int = Field(
        default=12,
        description="Exponent range for units of L in the U_{I'} search",
    )

    approximation_retries: int = Field(
        default=6,
        description="Strong approximation retries, each raising the precision by 2",
    )

    # Class data and conventions
    class_data_path: Optional[str] = Field(
        default=None,
        description="JSON table of class data for degree-4 fields",
    )

    allow_infinite_ramification: bool = Field(
        default=False,
        description="Allow L/K to ramify at infinite places in the selectivity check",
    )

    log_level: str = Field(
        default="WARNING",
        description="Root logging level",
    )

    @field_validator("class_data_path", mode="before")
    @classmethod
    def expand_class_data_path(cls, v):
        """Expand ~ and environment variables in the class data path."""
        if v is None:
            return v
        return os.path.expanduser(os.path.expandvars(v))

    @field_validator("discriminant_bound", "real_discriminant_bound", "residue_enumeration_bound")
    @classmethod
    def validate_positive_bound(cls, v):
        if v < 1:
            raise ValueError("bounds must be positive")
        return v

    @field_validator("bfs_depth_bound", "group_order_bound", "unit_exponent_bound")
    @classmethod
    def validate_search_bound(cls, v):
        if v < 1:
            raise ValueError("search bounds must be positive")
        return v

    @field_validator("approximation_retries")
    @classmethod
    def validate_retries(cls, v):
        if v < 0:
            raise ValueError("approximation_retries must not be negative")
        return v

    @field_validator("log_level")
    @classmethod
    def validate_log_level(cls, v):
        level = str(v).upper()
        if level not in _LOG_LEVELS:
            raise ValueError(f"log_level must be one of {', '.join(_LOG_LEVELS)}")
        return level

    def configure_logging(self) -> None:
        """Configure the root logger with ``log_level``."""
        logging.basicConfig(
            level=getattr(logging, self.log_level),
            format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        )

    @classmethod
    def from_toml(cls, path: str | Path) -> "BttConfig":
        """
        Load configuration from a TOML file.

        Args:
            path: Path to the TOML configuration file.

        Returns:
            BttConfig instance.

        Example:
            >>> config = BttConfig.from_toml("bttrep.toml")
        """
        import tomllib

        path = Path(path)
        if not path.exists():
            raise FileNotFoundError(f"Configuration file not found: {path}")

        with open(path, "rb") as f:
            data = tomllib.load(f)

        # Handle nested structure if config is under a "bttrep" key
        bttrep_data = data.get("bttrep", data)

        return cls(**bttrep_data)

    @classmethod
    def from_yaml(cls, path: str | Path) -> "BttConfig":
        """
        Load configuration from a YAML file.

        Args:
            path: Path to the YAML configuration file.

        Returns:
            BttConfig instance.
        """
        try:
            import yaml  # type: ignore
        except ImportError:
            raise ImportError(
                "PyYAML is required to load YAML configuration files. Install it with: pip install pyyaml"
            )

        path = Path(path)
        if not path.exists():
            raise FileNotFoundError(f"Configuration file not found: {path}")

        with open(path, "r") as f:
            data = yaml.safe_load(f) or {}

        bttrep_data = data.get("bttrep", data)

        return cls(**bttrep_data)

    @classmethod
    def from_file(cls, path: str | Path) -> "BttConfig":
        """
        Load configuration from a file (auto-detect format).

        Supports .toml and .yaml/.yml files.

        Example:
            >>> config = BttConfig.from_file("bttrep.toml")
            >>> config = BttConfig.from_file("bttrep.yaml")
        """
        path = Path(path)
        suffix = path.suffix.lower()

        if suffix == ".toml":
            return cls.from_toml(path)
        elif suffix in [".yaml", ".yml"]:
            return cls.from_yaml(path)
        else:
            raise ValueError(
                f"Unsupported configuration file format: {suffix}. Supported formats: .toml, .yaml, .yml"
            )
