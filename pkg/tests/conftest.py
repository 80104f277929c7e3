"""
Shared fixtures for the polypareto test suite.
"""

import numpy as np
import pytest

from polypareto.config.manager import ConfigurationManager
from polypareto.core.catalog import load_bundled_problem
from polypareto.core.polynomial import PolyMap, parse_poly_map


@pytest.fixture
def config_manager() -> ConfigurationManager:
    """Defaults only; no general or user file is read."""
    manager = ConfigurationManager()
    manager.load_configuration(general_config_path=None, user_config_path=None)
    return manager


@pytest.fixture
def bundled():
    """Loader for the problem files shipped with the package."""
    return load_bundled_problem


@pytest.fixture
def motzkin() -> PolyMap:
    return parse_poly_map("x1^2*x2^4 + x1^4*x2^2 - 3*x1^2*x2^2 + 1", 2)


@pytest.fixture
def rsps() -> PolyMap:
    return parse_poly_map("x1^2 + x2^2\nx1^2 - x2^2", 2)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)


@pytest.fixture
def output_dir(tmp_path):
    path = tmp_path / "out"
    path.mkdir()
    return path
