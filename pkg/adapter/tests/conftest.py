import importlib.resources as resources

import pytest

SMALL_CONFIG = """
[env]
terminal_time = 1.0
n_steps = 20
num_trajectories = 8
max_inventory = 5
master_seed = 11

[arrival]
model = "poisson"
lambda_bid = 10.0
lambda_ask = 10.0

[midprice]
model = "bm"
s0 = 100.0
volatility = 2.0

[fill]
model = "exponential"
fill_exponent = 1.5

[reward]
model = "running_penalty"
per_step_inventory_aversion = 0.5
terminal_inventory_aversion = 1.0
"""


@pytest.fixture
def small_config() -> str:
    return SMALL_CONFIG


@pytest.fixture(scope="session")
def benchmark_config() -> str:
    path = resources.files("mbtsim") / "presets" / "cj-benchmark-v1.toml"
    return path.read_text()
