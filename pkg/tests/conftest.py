"""Test configuration and fixtures."""

import os
from collections.abc import Generator
from contextlib import ExitStack
from unittest.mock import patch

import numpy as np
import pytest

# Set environment variables immediately when this module is imported
# This ensures they're available before any other modules try to load Settings
test_env_vars = {
    "DDE_COMPOUND_APP_NAME": "Compound DDE Test",
    "DDE_COMPOUND_APP_VERSION": "1.0.0-test",
    "DDE_COMPOUND_LOG_LEVEL": "DEBUG",
    "DDE_COMPOUND_THREADS": "1",
    "DDE_COMPOUND_DEFAULT_SEED": "7",
    "DDE_COMPOUND_CONE_TOLERANCE": "1e-10",
    "DDE_COMPOUND_MAX_MATRIX_DIM": "2048",
    "DDE_COMPOUND_MAX_TENSOR_DIM": "4096",
    "DDE_COMPOUND_MAX_CUBE_ENTRIES": "4000000",
}

# Set environment variables immediately
for key, value in test_env_vars.items():
    os.environ[key] = value

# Modules that read settings through their own ``get_settings`` reference
SETTINGS_CONSUMERS = (
    "dde_compound.models.grid",
    "dde_compound.services.tensor_spectra",
    "dde_compound.services.compound",
    "dde_compound.utils.parallel",
)


@pytest.fixture(scope="session", autouse=True)
def setup_test_environment() -> None:
    """Set up test environment variables."""
    # Environment variables are already set at module level
    yield

    # Clean up environment variables after tests
    for key in test_env_vars:
        os.environ.pop(key, None)


@pytest.fixture
def grid16():
    """Sixteen cells per unit delay."""
    from dde_compound.models.grid import Grid

    return Grid(16)


@pytest.fixture
def grid8():
    """Coarse grid for the multi-variable operators."""
    from dde_compound.models.grid import Grid

    return Grid(8)


@pytest.fixture
def unit_system(grid16):
    """x'(t) = -x(t-1) with period 1."""
    from dde_compound.models.coefficient import DdeSystem

    return DdeSystem.constant(grid16, 0.0, 1.0)


@pytest.fixture
def rng() -> np.random.Generator:
    """Seeded generator."""
    return np.random.default_rng(20240601)


@pytest.fixture
def mock_settings() -> Generator[object, None, None]:
    """Mock settings with small capacity ceilings for individual tests."""
    from dde_compound.config import Settings

    mock_settings_instance = Settings(
        app_name="Test App",
        app_version="1.0.0",
        log_level="DEBUG",
        threads=1,
        default_seed=7,
        max_matrix_dim=16,
        max_tensor_dim=64,
        max_cube_entries=1000,
        max_simplex_order=4,
    )
    with ExitStack() as stack:
        for module in SETTINGS_CONSUMERS:
            mocked = stack.enter_context(patch(f"{module}.get_settings"))
            mocked.return_value = mock_settings_instance
        yield mock_settings_instance
