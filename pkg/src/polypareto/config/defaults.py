"""
Default configuration values for polypareto.
"""

import os
from pathlib import Path


def config_dir() -> Path:
    """Per-user directory holding ``user_config.json``."""
    if os.name == 'nt':
        root = os.environ.get('APPDATA') or str(Path.home() / 'AppData' / 'Roaming')
    else:
        root = os.environ.get('XDG_CONFIG_HOME') or str(Path.home() / '.config')
    return Path(root) / 'polypareto'


_CONFIG_DIR = config_dir()

DEFAULT_CONFIG = {
    "version": "1.0.0",
    "config_files": {
        "general_config_name": "polypareto_config.json",
        "user_config_file": str(_CONFIG_DIR / "user_config.json"),
    },
    "logging": {
        "level": "WARNING",  # "DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"
        "file_enabled": False,
        "file_path": str(_CONFIG_DIR / 'polypareto.log'),
        "console_enabled": True,
    },
    "performance": {
        "max_workers": None,  # None = os.cpu_count()
    },
    "output": {
        "format": "json",
        "indent": 2,
    },
    "run": {
        "seed": 0,
    },
    "tolerances": {
        "dependency_tol": 1e-6,
        "cluster_rtol": 1e-3,
        "slack_rtol": 1e-6,
        "grad_rtol": 1e-9,
        "witness_rtol": 1e-4,
        "root_rtol": 1e-9,
        "rank_rtol": 1e-6,
        "verify_rtol": 1e-7,
        "fw_gap_rtol": 1e-12,
    },
    "budgets": {
        "rabier": {
            "max_iterations": 10000,
            "max_components": 16,
        },
        "tangency": {
            "n_seeds": 32,
            "n_weights": 8,
            "radius_start": 10.0,
            "radius_factor": 2.0,
            "radius_steps": 14,
            "max_iterations": 3000,
        },
        "sublevel": {
            "n_starts": 16,
            "R_max": 1e5,
            "iter_cap": 500,
            "divergence_threshold": -1e6,
            "penalty_scale": 1e4,
            "escape_factor": 1e3,
            "sweep_factor": 4.0,
            "sweep_iterations": 3000,
            "sample_radius": 3.0,
            "radius_start": 10.0,
            "radius_factor": 2.0,
            "n_targets": 10,
            "n_image_samples": 400,
        },
        "palais_smale": {
            "n_seeds": 8,
            "n_weights": 4,
            "radius_steps": 12,
        },
        "newton": {
            "n_starts": 20,
            "box": 3.0,
            "min_abs_coordinate": 0.05,
        },
        "critical": {
            "n_starts": 32,
            "box_radius": 3.0,
            "iter_cap": 500,
        },
        "pareto": {
            "n_weights": 8,
            "n_starts": 8,
            "box_radius": 3.0,
            "verify_samples": 2000,
            "n_epsilon_levels": 8,
            "improvement_starts": 4,
            "n_image_samples": 100,
            "iter_cap": 500,
        },
    },
}
