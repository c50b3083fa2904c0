"""Shared helpers for the test suite."""
from __future__ import annotations

from dataclasses import replace
from importlib import resources

import numpy as np

from mbtsim import arrivals as arr
from mbtsim import fills as fl
from mbtsim import midprice as mp
from mbtsim import rewards as rw
from mbtsim.config import build_environment_config, parse_config_text
from mbtsim.environment import EnvironmentConfig, TradingEnvironment


def load_preset(name: str):
    text = (resources.files("mbtsim") / "presets" / f"{name}.toml").read_text()
    return parse_config_text(text, f"preset:{name}")


def make_config(**overrides) -> EnvironmentConfig:
    """Small constant-rate environment; keyword overrides replace fields."""
    base = dict(
        arrival=arr.PoissonArrival(lambda_bid=140.0, lambda_ask=140.0),
        midprice=mp.BrownianMidprice(s0=100.0, drift=0.0, volatility=2.0),
        fill=fl.ExponentialFill(fill_exponent=1.5),
        reward=rw.RunningInventoryPenalty(
            per_step_inventory_aversion=0.5, terminal_inventory_aversion=1.0
        ),
        terminal_time=1.0,
        n_steps=20,
        num_trajectories=16,
        max_inventory=10,
        master_seed=7,
    )
    base.update(overrides)
    return EnvironmentConfig(**base)


def run_episode(env: TradingEnvironment, agent, episode: int | None = None):
    """Full episode; returns per-step (observations, rewards, infos) stacked.

    observations has shape (N, n_steps + 1, D) including the reset row.
    """
    obs = env.reset(episode)
    n_steps = env.config.n_steps
    observations = [obs]
    rewards = []
    infos = []
    for _ in range(n_steps):
        result = env.step(agent.get_action(obs))
        obs = result.observations
        observations.append(obs)
        rewards.append(result.rewards)
        infos.append(result.info)
    return np.stack(observations, axis=1), np.stack(rewards, axis=1), infos


ARRIVAL_CHOICES = ("poisson", "hawkes")
MIDPRICE_CHOICES = ("bm", "gbm", "bm_jump", "ou", "ou_drift", "ou_jump", "ou_jump_drift")
FILL_CHOICES = ("exponential", "triangular", "power")
REWARD_CHOICES = ("pnl", "running_penalty", "exponential_utility")
ACTION_CHOICES = ("limit", "limit_and_market", "touch")


def random_environment_config(rng: np.random.Generator, **overrides) -> EnvironmentConfig:
    """Sample a valid config covering every model and action variant."""
    kind = rng.choice(ARRIVAL_CHOICES)
    if kind == "poisson":
        arrival = arr.PoissonArrival(
            lambda_bid=float(rng.uniform(0.0, 200.0)),
            lambda_ask=float(rng.uniform(0.0, 200.0)),
        )
    else:
        reversion = float(rng.uniform(2.0, 10.0))
        arrival = arr.HawkesArrival(
            baseline=float(rng.uniform(1.0, 50.0)),
            reversion=reversion,
            jump=float(rng.uniform(0.0, 0.9 * reversion)),
            initial_intensity_bid=float(rng.uniform(0.0, 50.0)),
            initial_intensity_ask=float(rng.uniform(0.0, 50.0)),
        )
    s0 = float(rng.uniform(20.0, 200.0))
    vol = float(rng.uniform(0.0, 4.0))
    kind = rng.choice(MIDPRICE_CHOICES)
    if kind == "bm":
        midprice = mp.BrownianMidprice(s0, float(rng.uniform(-2, 2)), vol)
    elif kind == "gbm":
        midprice = mp.GeometricBrownianMidprice(s0, float(rng.uniform(-0.3, 0.3)),
                                                float(rng.uniform(0.0, 0.5)))
    elif kind == "bm_jump":
        midprice = mp.JumpBrownianMidprice(s0, vol, float(rng.uniform(0, 0.1)),
                                           float(rng.uniform(0, 0.1)))
    elif kind == "ou":
        midprice = mp.OuMidprice(s0, float(rng.uniform(0.5, 5)), s0, vol)
    elif kind == "ou_drift":
        midprice = mp.OuDriftMidprice(s0, vol, float(rng.uniform(-1, 1)),
                                      float(rng.uniform(0.5, 5)), 0.0,
                                      float(rng.uniform(0.0, 2.0)))
    elif kind == "ou_jump":
        midprice = mp.OuJumpMidprice(s0, float(rng.uniform(0.5, 5)), s0, vol,
                                     float(rng.uniform(0, 0.1)), float(rng.uniform(0, 0.1)))
    else:
        midprice = mp.OuJumpDriftMidprice(s0, vol, 0.0, float(rng.uniform(0.5, 5)),
                                          0.0, float(rng.uniform(0.0, 2.0)),
                                          float(rng.uniform(0, 0.5)),
                                          float(rng.uniform(0, 0.5)))
    kind = rng.choice(FILL_CHOICES)
    if kind == "exponential":
        fill = fl.ExponentialFill(float(rng.uniform(0.3, 3.0)))
    elif kind == "triangular":
        fill = fl.TriangularFill(float(rng.uniform(0.5, 5.0)))
    else:
        fill = fl.PowerFill(float(rng.uniform(0.5, 3.0)), float(rng.uniform(0.2, 3.0)))
    kind = rng.choice(REWARD_CHOICES)
    if kind == "pnl":
        reward = rw.PnlReward()
    elif kind == "running_penalty":
        reward = rw.RunningInventoryPenalty(float(rng.uniform(0, 1)), float(rng.uniform(0, 1)))
    else:
        reward = rw.ExponentialUtility(float(rng.uniform(0.01, 0.3)))
    action_type = str(rng.choice(ACTION_CHOICES))
    max_inventory = int(rng.integers(2, 15))
    lo = int(rng.integers(-max_inventory, max_inventory + 1))
    hi = int(rng.integers(lo, max_inventory + 1))
    initial = (lo, hi) if rng.random() < 0.5 else int(rng.integers(-max_inventory,
                                                                   max_inventory + 1))
    config = dict(
        arrival=arrival,
        midprice=midprice,
        fill=fill,
        reward=reward,
        terminal_time=float(rng.uniform(0.3, 2.0)),
        n_steps=int(rng.integers(5, 40)),
        num_trajectories=100,
        action_type=action_type,
        initial_cash=float(rng.uniform(-50, 50)),
        initial_inventory=initial,
        max_inventory=max_inventory,
        minimum_tick_size=float(rng.uniform(0.001, 0.1)),
        observe_auxiliaries=bool(rng.random() < 0.5),
        master_seed=int(rng.integers(0, 2**31)),
    )
    config.update(overrides)
    return EnvironmentConfig(**config)


def replace_config(config: EnvironmentConfig, **overrides) -> EnvironmentConfig:
    return replace(config, **overrides)
