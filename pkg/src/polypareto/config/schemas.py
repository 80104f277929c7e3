"""
Configuration schema validation for polypareto.
"""

from typing import Any, Dict


class ConfigValidationError(Exception):
    """A configuration layer or override holds an unknown key or a bad value."""


_VALID_LEVELS = ["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"]
_VALID_FORMATS = ["json", "csv"]

# Budget keys that may legitimately be negative or non-integral.
_SIGNED_BUDGET_KEYS = {"divergence_threshold"}
_GROWTH_FACTORS = (
    ("tangency", "radius_factor"),
    ("sublevel", "radius_factor"),
    ("sublevel", "sweep_factor"),
)


class ConfigSchema:
    """Checks a merged configuration record by record."""

    @staticmethod
    def validate_config(config: Dict[str, Any]) -> None:
        """Raise ConfigValidationError on the first invalid section."""
        ConfigSchema._validate_logging(config.get("logging", {}))
        ConfigSchema._validate_performance(config.get("performance", {}))
        ConfigSchema._validate_output(config.get("output", {}))
        ConfigSchema._validate_run(config.get("run", {}))
        ConfigSchema._validate_tolerances(config.get("tolerances", {}))
        ConfigSchema._validate_budgets(config.get("budgets", {}))

    @staticmethod
    def _validate_logging(settings: Dict[str, Any]) -> None:
        if "level" in settings:
            level = settings["level"]
            if not isinstance(level, str) or level.upper() not in _VALID_LEVELS:
                raise ConfigValidationError(f"logging level must be one of: {_VALID_LEVELS}")

    @staticmethod
    def _validate_performance(performance: Dict[str, Any]) -> None:
        workers = performance.get("max_workers")
        if workers is not None and (not _is_int(workers) or workers < 1):
            raise ConfigValidationError("max_workers must be a positive integer or null")

    @staticmethod
    def _validate_output(output: Dict[str, Any]) -> None:
        if "format" in output and output["format"] not in _VALID_FORMATS:
            raise ConfigValidationError(f"output format must be one of: {_VALID_FORMATS}")
        if "indent" in output and (not _is_int(output["indent"]) or output["indent"] < 0):
            raise ConfigValidationError("output indent must be a non-negative integer")

    @staticmethod
    def _validate_run(run: Dict[str, Any]) -> None:
        if "seed" in run:
            seed = run["seed"]
            if not _is_int(seed) or seed < 0 or seed >= 2 ** 64:
                raise ConfigValidationError("seed must be an unsigned 64-bit integer")

    @staticmethod
    def _validate_tolerances(tolerances: Dict[str, Any]) -> None:
        """Every tolerance is a positive real."""
        for name, value in tolerances.items():
            if not _is_number(value) or value <= 0:
                raise ConfigValidationError(f"tolerance {name} must be a positive number")

    @staticmethod
    def _validate_budgets(budgets: Dict[str, Any]) -> None:
        """Every budget entry is positive; integer-valued entries stay integers."""
        for section, record in budgets.items():
            if not isinstance(record, dict):
                raise ConfigValidationError(f"budget section {section} must be an object")
            for name, value in record.items():
                key = f"{section}.{name}"
                if not _is_number(value):
                    raise ConfigValidationError(f"budget {key} must be a number")
                if name in _SIGNED_BUDGET_KEYS:
                    if value >= 0:
                        raise ConfigValidationError(f"budget {key} must be negative")
                    continue
                if value <= 0:
                    raise ConfigValidationError(f"budget {key} must be positive")
        for section, name in _GROWTH_FACTORS:
            record = budgets.get(section, {})
            if name in record and record[name] <= 1:
                raise ConfigValidationError(f"budget {section}.{name} must exceed 1")
        rabier = budgets.get("rabier", {})
        if "max_components" in rabier and rabier["max_components"] > 16:
            raise ConfigValidationError("budget rabier.max_components cannot exceed 16")


def _is_int(value: Any) -> bool:
    return isinstance(value, int) and not isinstance(value, bool)


def _is_number(value: Any) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool)
