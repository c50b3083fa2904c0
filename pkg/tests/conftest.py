"""Shared fixtures for the test suite."""
import pytest

from mbtsim.config import build_environment_config
from mbtsim.environment import EnvironmentConfig
from support import load_preset


@pytest.fixture(scope="session")
def benchmark_parsed():
    return load_preset("cj-benchmark-v1")


@pytest.fixture(scope="session")
def benchmark_config(benchmark_parsed) -> EnvironmentConfig:
    return build_environment_config(benchmark_parsed)
