"""
Configuration Manager Package

This package provides functionality for loading, validating, and accessing
configuration values from YAML files.
"""

from quadbound.src.config_manager.config_manager import ConfigManager, DEFAULT_CONFIG_PATH

__all__ = ["ConfigManager", "DEFAULT_CONFIG_PATH"]
