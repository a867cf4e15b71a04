"""Configuration management for the NCCW diagonal engine."""
import copy
import os
from pathlib import Path
from typing import Any, Callable, Dict, Optional, Tuple

import yaml

DEFAULT_CONFIG_PATH = Path(__file__).parent / "config.yaml"

# Environment variable -> (section, key, converter)
ENV_OVERRIDES: Dict[str, Tuple[str, str, Callable[[str], Any]]] = {
    'NCCW_LOG_LEVEL': ('logging', 'level', str.upper),
    'NCCW_OUTPUT_DIR': ('cli', 'output_dir', str),
    'NCCW_SEED': ('cli', 'default_seed', int),
}


def _merge(base: Dict[str, Any], override: Dict[str, Any]) -> Dict[str, Any]:
    merged = copy.deepcopy(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _merge(merged[key], value)
        else:
            merged[key] = value
    return merged


def _read_yaml(path: Path) -> Dict[str, Any]:
    with open(path, 'r') as f:
        data = yaml.safe_load(f) or {}
    if not isinstance(data, dict):
        raise ValueError(f"Configuration file {path} must contain a mapping")
    return data


class Config:
    """Configuration loader and manager (process-wide singleton)."""

    _instance: Optional['Config'] = None
    _config: Dict[str, Any] = {}

    def __new__(cls):
        """Singleton pattern to ensure single config instance."""
        if cls._instance is None:
            cls._instance = super(Config, cls).__new__(cls)
        return cls._instance

    def load(self, config_path: Optional[str] = None) -> 'Config':
        """Load the bundled defaults, then a user file on top of them.

        A user file only needs the keys it changes; nested sections are merged.

        Args:
            config_path: Optional path to a YAML file overriding the defaults.
        """
        data = _read_yaml(DEFAULT_CONFIG_PATH)
        if config_path is not None:
            data = _merge(data, _read_yaml(Path(config_path)))
        self._config = data
        self._override_from_env()
        return self

    def _override_from_env(self):
        """Apply NCCW_* environment variables."""
        for var, (section, key, convert) in ENV_OVERRIDES.items():
            raw = os.getenv(var)
            if not raw:
                continue
            try:
                value = convert(raw)
            except ValueError as e:
                raise ValueError(f"Invalid value for {var}: '{raw}'") from e
            self._config.setdefault(section, {})[key] = value

    def get(self, key: str, default: Any = None) -> Any:
        """Get configuration value by dot-notation key.

        Args:
            key: Configuration key (e.g., 'tower.max_depth_path')
            default: Default value if key not found

        Returns:
            Configuration value
        """
        value = self._config
        for k in key.split('.'):
            if not isinstance(value, dict):
                return default
            value = value.get(k)
            if value is None:
                return default
        return value

    def as_dict(self) -> Dict[str, Any]:
        return copy.deepcopy(self._config)

    @property
    def logging(self) -> Dict[str, Any]:
        return self._config.get('logging', {})

    @property
    def classify(self) -> Dict[str, Any]:
        return self._config.get('classify', {})

    @property
    def spectrum(self) -> Dict[str, Any]:
        return self._config.get('spectrum', {})

    @property
    def tower(self) -> Dict[str, Any]:
        return self._config.get('tower', {})

    @property
    def cli(self) -> Dict[str, Any]:
        """Command-line defaults: seed, output directory, output format."""
        return self._config.get('cli', {})

    @property
    def metrics(self) -> Dict[str, Any]:
        return self._config.get('metrics', {})


# Global config instance - load immediately on import
config = Config()
config.load()
