"""
Factory module for creating BttStudio instances.

This module provides a factory function to create properly configured
BttStudio instances with all required dependencies.
"""

from pathlib import Path
from typing import Optional

from bttrep.config import BttConfig
from bttrep.services.counting.classdata import ClassDataTable
from bttrep.services.counting.counting import CountingOptions, CountingService
from bttrep.services.synthesis.synthesis import SynthesisService
from bttrep.studio.studio import BttStudio


class BttStudioFactory:
    """
    Factory for creating BttStudio instances.

    This factory handles:
    - Loading configuration from various sources
    - Loading the class data table
    - Instantiating all required services
    - Building the BttStudio instance

    Example:
        >>> # Using default configuration (from environment variables)
        >>> studio = BttStudioFactory.create()

        >>> # Using a configuration file
        >>> studio = BttStudioFactory.create_from_config_file("bttrep.toml")

        >>> # Using explicit configuration
        >>> config = BttConfig(class_data_path="classdata.json", bfs_depth_bound=16)
        >>> studio = BttStudioFactory.create(config=config)
    """

    @staticmethod
    def build_options(config: BttConfig) -> CountingOptions:
        """
        Translate the configuration into counting options.

        Raises:
            FileNotFoundError: If ``class_data_path`` does not exist.
        """
        class_data = ClassDataTable()
        if config.class_data_path:
            path = Path(config.class_data_path)
            if not path.exists():
                raise FileNotFoundError(f"Class data file not found: {path}")
            class_data = ClassDataTable.from_json(path)
        return CountingOptions(
            discriminant_bound=config.discriminant_bound,
            real_discriminant_bound=config.real_discriminant_bound,
            bfs_depth_bound=config.bfs_depth_bound,
            residue_enumeration_bound=config.residue_enumeration_bound,
            group_order_bound=config.group_order_bound,
            unit_exponent_bound=config.unit_exponent_bound,
            allow_infinite_ramification=config.allow_infinite_ramification,
            class_data=class_data,
        )

    @staticmethod
    def create(config: Optional[BttConfig] = None) -> BttStudio:
        """
        Create a BttStudio instance.

        Args:
            config: Configuration object. If None, loads from environment variables.

        Returns:
            Configured BttStudio instance.
        """
        if config is None:
            config = BttConfig()

        options = BttStudioFactory.build_options(config)

        # Create services with dependency injection
        counting_service = CountingService(options)
        synthesis_service = SynthesisService(options, config.approximation_retries)

        return BttStudio(counting_service=counting_service, synthesis_service=synthesis_service)

    @staticmethod
    def create_from_config_file(config_path: str | Path) -> BttStudio:
        """
        Create a BttStudio from a configuration file.

        Args:
            config_path: Path to configuration file (.toml, .yaml, or .yml).
        """
        config = BttConfig.from_file(config_path)
        return BttStudioFactory.create(config=config)

    @staticmethod
    def create_from_env() -> BttStudio:
        """
        Create a BttStudio from environment variables prefixed with BTTREP_.

        Example:
            >>> import os
            >>> os.environ["BTTREP_CLASS_DATA_PATH"] = "/path/to/classdata.json"
            >>> studio = BttStudioFactory.create_from_env()
        """
        return BttStudioFactory.create(config=BttConfig())


def load_config(config_file: Optional[str | Path] = None, **config_kwargs) -> BttConfig:
    """
    Configuration from an optional file, with keyword overrides.

    Keyword arguments take precedence over the file, which takes precedence
    over environment variables.
    """
    if config_file:
        config = BttConfig.from_file(config_file)
        if config_kwargs:
            config_dict = config.model_dump()
            config_dict.update(config_kwargs)
            config = BttConfig(**config_dict)
        return config
    return BttConfig(**config_kwargs)


# Convenience function for quick access
def create_studio(
    config_file: Optional[str | Path] = None,
    **config_kwargs,
) -> BttStudio:
    """
    Convenience function to create a BttStudio.

    Args:
        config_file: Optional path to configuration file.
        **config_kwargs: Configuration parameters passed directly to BttConfig.

    Returns:
        Configured BttStudio instance.

    Examples:
        >>> studio = create_studio()
        >>> studio = create_studio(config_file="bttrep.toml")
        >>> studio = create_studio(config_file="bttrep.toml", class_data_path="classdata.json")
    """
    return BttStudioFactory.create(config=load_config(config_file, **config_kwargs))
