"""
Configuration management module for polypareto.

This module handles the cascading configuration system:
Defaults -> General Config -> User Config -> Problem File -> Command Line
"""

from .manager import ConfigurationManager
from .defaults import DEFAULT_CONFIG
from .schemas import ConfigSchema, ConfigValidationError

__all__ = [
    "ConfigurationManager",
    "DEFAULT_CONFIG",
    "ConfigSchema",
    "ConfigValidationError",
]
