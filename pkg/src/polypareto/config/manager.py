"""
Configuration manager for polypareto.

Handles the cascading configuration system:
Defaults -> General Config -> User Config -> Problem File -> Command Line
"""

import json
import logging
import os
from copy import deepcopy
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Tuple

from .defaults import DEFAULT_CONFIG
from .schemas import ConfigSchema, ConfigValidationError


logger = logging.getLogger(__name__)

_MISSING = object()


def merge_layer(base: Dict[str, Any], layer: Dict[str, Any]) -> None:
    """Merge a configuration layer into ``base`` in place; nested records merge key by key."""
    for key, value in layer.items():
        current = base.get(key)
        if isinstance(current, dict) and isinstance(value, dict):
            merge_layer(current, value)
        else:
            base[key] = deepcopy(value)


def read_layer(path: str) -> Dict[str, Any]:
    """
    Read one JSON configuration layer.

    Raises:
        ConfigValidationError: If the file is unreadable, not JSON or not an object
    """
    try:
        with open(path, 'r', encoding='utf-8') as f:
            layer = json.load(f)
    except json.JSONDecodeError as e:
        raise ConfigValidationError(f"{path} is not valid JSON: {e}")
    except OSError as e:
        raise ConfigValidationError(f"Cannot read {path}: {e}")
    if not isinstance(layer, dict):
        raise ConfigValidationError(f"{path} must hold a JSON object")
    return layer


class ConfigurationManager:
    """Budgets, tolerances and run settings merged from every configuration layer."""

    def __init__(self) -> None:
        self._config: Dict[str, Any] = {}
        self._layers: List[Tuple[str, Path]] = []
        self._overrides: Dict[str, Any] = {}
        self._loaded = False

    def load_configuration(
        self,
        general_config_path: Optional[str] = None,
        user_config_path: Optional[str] = None,
    ) -> Dict[str, Any]:
        """
        Start from the defaults and merge the file layers.

        Args:
            general_config_path: General JSON layer; it must exist when given
            user_config_path: User JSON layer; skipped when the file is absent

        Returns:
            The merged configuration

        Raises:
            ConfigValidationError: If a layer is unreadable or the result is invalid
        """
        self._config = deepcopy(DEFAULT_CONFIG)
        self._layers = []
        self._overrides = {}

        if general_config_path:
            merge_layer(self._config, read_layer(general_config_path))
            self._layers.append(('general', Path(general_config_path)))
            logger.info(f"Merged general configuration {general_config_path}")

        if user_config_path and os.path.exists(user_config_path):
            try:
                merge_layer(self._config, read_layer(user_config_path))
                self._layers.append(('user', Path(user_config_path)))
                logger.info(f"Merged user configuration {user_config_path}")
            except ConfigValidationError as e:
                logger.warning(f"Ignoring user configuration: {e}")

        self._validate()
        self._loaded = True
        logger.debug(f"Configuration ready ({len(self._layers)} file layers)")
        return self._config

    def apply_overrides(self, overrides: Iterable[Tuple[str, Any]], source: str = "override") -> None:
        """
        Apply dotted-key overrides on top of the loaded configuration.

        Args:
            overrides: (dotted key, value) pairs, later pairs win
            source: Label used in messages (problem file, command line)

        Raises:
            RuntimeError: If no configuration is loaded yet
            ConfigValidationError: On an unknown key or an invalid result
        """
        self._require_loaded()
        for key, value in overrides:
            parent, _, leaf = key.rpartition('.')
            record = self._find(parent) if parent else self._config
            # Keys whose default is None (max_workers) still count as known.
            if not isinstance(record, dict) or leaf not in record:
                raise ConfigValidationError(f"Unknown configuration key from {source}: {key}")
            record[leaf] = value
            self._overrides[key] = value
            logger.debug(f"{source}: {key} = {value}")
        self._validate()

    def _require_loaded(self) -> None:
        if not self._loaded:
            raise RuntimeError("Configuration not loaded. Call load_configuration() first.")

    def _validate(self) -> None:
        try:
            ConfigSchema.validate_config(self._config)
        except ConfigValidationError as e:
            logger.error(f"Invalid configuration: {e}")
            raise

    def _find(self, key: str) -> Any:
        node: Any = self._config
        for part in key.split('.'):
            if not isinstance(node, dict) or part not in node:
                return _MISSING
            node = node[part]
        return node

    def get(self, key: str, default: Any = None) -> Any:
        """
        Value at a dotted key such as ``budgets.tangency.n_seeds``.

        Missing keys and keys holding None give ``default``.

        Raises:
            RuntimeError: If no configuration is loaded yet
        """
        self._require_loaded()
        value = self._find(key)
        return default if value is _MISSING or value is None else value

    def set(self, key: str, value: Any) -> None:
        """Set a dotted key, creating intermediate records; no validation."""
        self._require_loaded()
        *parents, leaf = key.split('.')
        node = self._config
        for part in parents:
            if not isinstance(node.get(part), dict):
                node[part] = {}
            node = node[part]
        node[leaf] = value

    def describe(self) -> Dict[str, Any]:
        """Merged file layers and applied overrides, for diagnostics."""
        return {
            'loaded': self._loaded,
            'layers': {label: str(path) for label, path in self._layers},
            'overrides': dict(sorted(self._overrides.items())),
            'version': self.get('version') if self._loaded else None,
        }

    def as_dict(self) -> Dict[str, Any]:
        """Deep copy of the merged configuration."""
        return deepcopy(self._config)

    @staticmethod
    def parse_override(text: str) -> Tuple[str, Any]:
        """
        Parse a ``key=value`` override.

        Integral literals become ``int``, other numeric literals ``float``;
        ``true``/``false``/``null`` map to their JSON meaning and anything else
        stays a string.

        Raises:
            ConfigValidationError: If the text has no ``=`` or an empty key
        """
        key, sep, raw = text.partition('=')
        key, raw = key.strip(), raw.strip()
        if not sep or not key:
            raise ConfigValidationError(f"Override must look like KEY=VALUE: {text!r}")
        return key, _parse_literal(raw)


def _parse_literal(raw: str) -> Any:
    lowered = raw.lower()
    if lowered in ("true", "false"):
        return lowered == "true"
    if lowered in ("null", "none"):
        return None
    try:
        return int(raw)
    except ValueError:
        pass
    try:
        return float(raw)
    except ValueError:
        return raw
