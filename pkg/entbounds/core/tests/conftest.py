"""
Pytest fixtures for entbounds.core tests.
"""

import numpy as np
import pytest

from entbounds.config import Config, ConfigManager
from entbounds.core import relations
from entbounds.core.designs import QuantumDesign, builtin_design


@pytest.fixture
def rng() -> np.random.Generator:
    """Fixed-seed generator scoped per test."""
    return np.random.default_rng(20240521)


@pytest.fixture
def config() -> Config:
    """Default configuration, isolated from the caller's environment."""
    return ConfigManager(environ={}).get_config()


@pytest.fixture
def octahedron() -> QuantumDesign:
    return builtin_design("octahedron")


@pytest.fixture
def mub3() -> QuantumDesign:
    return builtin_design("mub3")


@pytest.fixture(autouse=True)
def reset_certifications(monkeypatch):
    """Each test starts with no certified steering bounds."""
    monkeypatch.setattr(relations, "_certified", set())
