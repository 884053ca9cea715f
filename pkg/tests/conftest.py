"""
Pytest fixtures for QuadBound tests.

This module provides fixtures that can be used across all test files.
"""

import shutil
import tempfile

import pytest

from quadbound.src.domains import DiskDomain
from quadbound.src.hyperbolic import DiskMap, ellipse_map
from quadbound.src.quadrature import WeightMeasure
from tests.test_utils import MockConfigManager, TestFileManager, default_config


@pytest.fixture
def mock_config():
    """
    Fixture that provides a mock ConfigManager with default configuration.

    Returns:
        A MockConfigManager instance with default configuration.
    """
    return MockConfigManager(default_config()).mock


@pytest.fixture
def custom_mock_config(request):
    """
    Fixture that provides a mock ConfigManager with custom configuration.

    Usage:
        @pytest.mark.parametrize('custom_mock_config', [
            {'run': {'tol': 1e-8}}
        ], indirect=True)
        def test_something(custom_mock_config):
            ...
    """
    manager = MockConfigManager(default_config())
    for section, section_data in getattr(request, "param", {}).items():
        for key, value in section_data.items():
            manager.update_config(section, key, value)
    return manager.mock


@pytest.fixture
def temp_dir():
    """
    Fixture that provides a temporary directory for testing.

    Returns:
        Path to a temporary directory that will be cleaned up after the test.
    """
    temp_dir = tempfile.mkdtemp()
    yield temp_dir
    shutil.rmtree(temp_dir)


@pytest.fixture
def test_file_manager():
    file_manager = TestFileManager()
    yield file_manager
    file_manager.cleanup()


@pytest.fixture(scope="session")
def map_c15():
    """Calibrated conformal map of E_1.5, shared by the session."""
    return ellipse_map(1.5)


@pytest.fixture(scope="session")
def map_c2():
    return ellipse_map(2.0)


@pytest.fixture
def disk_map():
    return DiskMap(DiskDomain(2.0))


@pytest.fixture
def lebesgue():
    return WeightMeasure.lebesgue()


@pytest.fixture
def chebyshev():
    return WeightMeasure.chebyshev()

