"""
Configuration Manager for QuadBound

This module loads the packaged defaults, lays an optional user YAML file
over them section by section, validates the result and provides access to
the values.
"""

import logging
from pathlib import Path
from typing import Any, Callable, Dict, Optional, Tuple, Union

import yaml

DEFAULT_CONFIG_PATH = Path(__file__).resolve().parents[2] / "config" / "quadbound_config.yaml"

LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


def _positive(value: Any) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool) and value > 0


def _count(minimum: int) -> Callable[[Any], bool]:
    return lambda value: isinstance(value, int) and not isinstance(value, bool) and value >= minimum


# (section, key, check, requirement); absent or null keys are not checked
VALUE_CHECKS: Tuple[Tuple[str, str, Callable[[Any], bool], str], ...] = (
    ("run", "tol", _positive, "a positive 'tol'"),
    ("run", "eps", _positive, "a positive 'eps'"),
    ("run", "M", lambda v: isinstance(v, (int, float)) and v >= 0, "a nonnegative 'M'"),
    ("run", "weight", lambda v: v in ("lebesgue", "chebyshev"), "'weight' lebesgue or chebyshev"),
    ("integration", "panel_order", _count(2), "an integer 'panel_order' >= 2"),
    ("integration", "max_panels", _count(1), "an integer 'max_panels' >= 1"),
    ("conformal", "boundary_samples", _count(8), "an integer 'boundary_samples' >= 8"),
    ("conformal", "residual_tol", _positive, "a positive 'residual_tol'"),
    ("optimizer", "max_sweeps", _count(1), "an integer 'max_sweeps' >= 1"),
    ("optimizer", "workers", _count(1), "an integer 'workers' >= 1"),
    ("sweep", "workers", _count(1), "an integer 'workers' >= 1"),
    ("output", "format", lambda v: v in ("csv", "json"), "'format' csv or json"),
    ("error_handling", "log_level", lambda v: str(v).upper() in LOG_LEVELS,
     f"'log_level' one of {', '.join(LOG_LEVELS)}"),
)


class ConfigManager:
    """
    Manages configuration for the bound calculators and the CLI.

    The packaged file supplies every section; a user file only needs the
    keys it changes.
    """

    REQUIRED_SECTIONS = (
        "run", "integration", "conformal", "optimizer", "output", "error_handling"
    )

    def __init__(self, config_path: Union[str, Path, None] = None) -> None:
        """
        Initialize the configuration manager.

        Args:
            config_path: Path to a YAML file overriding the packaged defaults
        """
        self.config_path = Path(config_path) if config_path else DEFAULT_CONFIG_PATH
        self.config: Dict[str, Any] = self._read(DEFAULT_CONFIG_PATH)
        if self.config_path != DEFAULT_CONFIG_PATH:
            self._merge(self._read(self.config_path))
        self._validate_config()

    @staticmethod
    def _read(path: Path) -> Dict[str, Any]:
        """
        Load one YAML file.

        Raises:
            FileNotFoundError: If the configuration file is not found
            yaml.YAMLError: If the configuration file cannot be parsed
            ValueError: If the top level is not a mapping
        """
        try:
            with open(path, "r", encoding="utf-8") as f:
                data = yaml.safe_load(f)
        except FileNotFoundError:
            logging.error(f"Configuration file not found: {path}")
            raise
        except yaml.YAMLError as e:
            logging.error(f"Error parsing configuration file {path}: {e}")
            raise
        if data is None:
            return {}
        if not isinstance(data, dict):
            raise ValueError(f"Configuration file {path} must contain a mapping of sections")
        logging.info(f"Loaded configuration from {path}")
        return data

    def _merge(self, overrides: Dict[str, Any]) -> None:
        for section, values in overrides.items():
            if values is None:
                continue
            if not isinstance(values, dict):
                raise ValueError(f"Configuration section '{section}' must be a mapping")
            self.config.setdefault(section, {})
            self.config[section] = {**(self.config[section] or {}), **values}

    def _validate_config(self) -> None:
        """
        Validate the merged configuration.

        Raises:
            ValueError: If the configuration is invalid
        """
        for section in self.REQUIRED_SECTIONS:
            if not isinstance(self.config.get(section), dict):
                msg = f"Missing required section in configuration: {section}"
                logging.error(msg)
                raise ValueError(msg)

        for section, key, check, requirement in VALUE_CHECKS:
            value = self.get(section, key)
            if value is not None and not check(value):
                msg = f"Section '{section}' must contain {requirement}, got {value!r}"
                logging.error(msg)
                raise ValueError(msg)

        for name, c in self.get_section("presets").items():
            if not isinstance(c, (int, float)) or c <= 1:
                msg = f"Preset '{name}' must be an ellipse parameter c > 1"
                logging.error(msg)
                raise ValueError(msg)

        logging.debug("Configuration validated successfully")

    def get(self, section: str, key: str, default: Optional[Any] = None) -> Any:
        """
        Get a configuration value.

        Null values count as missing, so `directory: null` yields the default.
        """
        value = (self.config.get(section) or {}).get(key)
        return default if value is None else value

    def get_section(self, section: str) -> Dict[str, Any]:
        """Return a copy of a section, or an empty dict."""
        return dict(self.config.get(section) or {})

    def get_preset(self, name: str) -> Optional[float]:
        """Return the ellipse parameter of a named preset, or None."""
        value = self.get_section("presets").get(name)
        return float(value) if value is not None else None
