"""Batch-vectorized market making environment.

One environment instance simulates ``num_trajectories`` independent
episodes in lockstep.  All per-step state lives in arrays of shape (N,)
and every trajectory consumes its own random substream, so a batch run
and N width-1 runs with matching substreams produce identical paths.

Step ordering, fixed by contract:

1. sample liquidity-taker arrivals per side,
2. update the arrival intensities (Hawkes decay plus jump),
3. sample fills of the agent's quotes against the pre-step midprice,
4. execute the agent's market orders at tick distance from the mid,
5. settle cash and inventory,
6. update the midprice, including jumps driven by this step's arrivals,
7. advance time, compute the reward, flag episode completion.

Fills and market orders that would push |inventory| beyond
``max_inventory`` are suppressed, as if that side had not been posted.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import arrivals as arr
from . import fills as fl
from . import midprice as mp
from . import rewards as rw
from .errors import ConfigError
from .rng import RandomSource

ACTION_TYPES = ("limit", "limit_and_market", "touch")

ACTION_COLUMNS = {
    "limit": ("delta_bid", "delta_ask"),
    "limit_and_market": ("delta_bid", "delta_ask", "mo_buy", "mo_sell"),
    "touch": ("post_bid", "post_ask"),
}


@dataclass(frozen=True)
class EnvironmentConfig:
    arrival: arr.ArrivalModel
    midprice: mp.MidpriceModel
    fill: fl.FillModel
    reward: rw.RewardModel
    terminal_time: float = 1.0
    n_steps: int = 200
    num_trajectories: int = 1
    action_type: str = "limit"
    initial_cash: float = 0.0
    initial_inventory: int | tuple[int, int] = 0
    max_inventory: int = 100
    minimum_tick_size: float = 0.0
    observe_auxiliaries: bool = True
    master_seed: int = 0
    substream_offset: int = 0

    @property
    def dt(self) -> float:
        return self.terminal_time / self.n_steps

    @property
    def action_dim(self) -> int:
        return len(ACTION_COLUMNS[self.action_type])

    def validate(self) -> list[str]:
        problems: list[str] = []
        if not self.terminal_time > 0:
            problems.append("env.terminal_time must be > 0")
        if self.n_steps < 1:
            problems.append("env.n_steps must be >= 1")
        if self.num_trajectories < 1:
            problems.append("env.num_trajectories must be >= 1")
        if self.action_type not in ACTION_TYPES:
            problems.append(f"env.action_type must be one of {ACTION_TYPES}")
        if self.max_inventory < 1:
            problems.append("env.max_inventory must be >= 1")
        if not self.minimum_tick_size >= 0:
            problems.append("env.minimum_tick_size must be >= 0")
        if self.action_type == "touch" and not self.minimum_tick_size > 0:
            problems.append("env.minimum_tick_size must be > 0 for touch actions")
        inv = self.initial_inventory
        if isinstance(inv, tuple):
            lo, hi = inv
            if lo > hi:
                problems.append("env.initial_inventory interval must have low <= high")
            if abs(lo) > self.max_inventory or abs(hi) > self.max_inventory:
                problems.append("env.initial_inventory must lie within max_inventory")
        elif abs(int(inv)) > self.max_inventory:
            problems.append("env.initial_inventory must lie within max_inventory")
        if self.substream_offset < 0:
            problems.append("env.substream_offset must be >= 0")
        problems += self.arrival.validate()
        problems += self.midprice.validate()
        problems += self.fill.validate()
        problems += self.reward.validate()
        return problems


@dataclass(frozen=True)
class ObservationField:
    name: str
    index: int
    unit: str


def observation_layout(config: EnvironmentConfig) -> tuple[ObservationField, ...]:
    """Field order of observation vectors for this configuration."""
    fields = [
        ObservationField("cash", 0, "currency"),
        ObservationField("inventory", 1, "units"),
        ObservationField("time", 2, "time"),
        ObservationField("midprice", 3, "currency"),
    ]
    if config.observe_auxiliaries:
        i = len(fields)
        if mp.has_drift_state(config.midprice):
            fields.append(ObservationField("drift", i, "currency/time"))
            i += 1
        if isinstance(config.arrival, arr.HawkesArrival):
            fields.append(ObservationField("lambda_bid", i, "events/time"))
            fields.append(ObservationField("lambda_ask", i + 1, "events/time"))
    return tuple(fields)


@dataclass
class StepResult:
    observations: np.ndarray
    rewards: np.ndarray
    done: np.ndarray
    info: dict[str, np.ndarray] = field(default_factory=dict)


class TradingEnvironment:
    """Vectorized simulator; see the module docstring for step semantics."""

    def __init__(self, config: EnvironmentConfig):
        problems = config.validate()
        if problems:
            raise ConfigError(problems)
        self.config = config
        self.dt = config.dt
        self.max_depth = fl.max_depth(config.fill)
        self.layout = observation_layout(config)
        self.observation_dim = len(self.layout)
        self.action_dim = config.action_dim
        self._rng = RandomSource(
            config.master_seed, config.num_trajectories, config.substream_offset
        )
        self._n_normals = mp.n_normals(config.midprice)
        self._episode_counter = 0
        self._step_index = 0
        self._noise = None

    # -- episode control ---------------------------------------------------

    def reset(self, episode: int | None = None) -> np.ndarray:
        """Start an episode; same (master_seed, episode) always replays."""
        cfg = self.config
        n = cfg.num_trajectories
        if episode is None:
            episode = self._episode_counter
        self.episode = int(episode)
        self._episode_counter = self.episode + 1
        draw_initial = isinstance(cfg.initial_inventory, tuple)
        self._noise = self._rng.episode_noise(
            self.episode, cfg.n_steps, self._n_normals, draw_initial
        )
        self.cash = np.full(n, float(cfg.initial_cash))
        if draw_initial:
            lo, hi = cfg.initial_inventory
            width = hi - lo + 1
            self.inventory = lo + np.floor(self._noise.initial_uniform * width).astype(np.int64)
        else:
            self.inventory = np.full(n, int(cfg.initial_inventory), dtype=np.int64)
        self._market = mp.init_state(cfg.midprice, n)
        self._intensity = arr.initial_intensities(cfg.arrival, n)
        self._step_index = 0
        self._mark0 = self.cash + self.inventory * self._market.mid
        return self.observation()

    @property
    def step_index(self) -> int:
        return self._step_index

    @property
    def time(self) -> float:
        return self._step_index * self.dt

    @property
    def midprice(self) -> np.ndarray:
        return self._market.mid

    def observation(self) -> np.ndarray:
        cols = [
            self.cash,
            self.inventory.astype(float),
            np.full(self.config.num_trajectories, self.time),
            self._market.mid,
        ]
        if self.config.observe_auxiliaries:
            if self._market.drift is not None:
                cols.append(self._market.drift)
            if isinstance(self.config.arrival, arr.HawkesArrival):
                cols.append(self._intensity[:, 0])
                cols.append(self._intensity[:, 1])
        return np.stack(cols, axis=1)

    # -- stepping ----------------------------------------------------------

    def _check_actions(self, actions) -> np.ndarray:
        a = np.asarray(actions, dtype=float)
        expected = (self.config.num_trajectories, self.action_dim)
        if a.shape != expected:
            raise ValueError(f"actions must have shape {expected}, got {a.shape}")
        if not np.isfinite(a).all():
            raise ValueError("actions must be finite")
        kind = self.config.action_type
        flags = a[:, 2:] if kind == "limit_and_market" else (a if kind == "touch" else None)
        if flags is not None and not np.isin(flags, (0.0, 1.0)).all():
            raise ValueError(f"{kind} flag entries must be 0 or 1")
        return a

    def step(self, actions) -> StepResult:
        if self._noise is None:
            raise RuntimeError("call reset() before step()")
        if self._step_index >= self.config.n_steps:
            raise RuntimeError("episode is complete; call reset()")
        cfg = self.config
        a = self._check_actions(actions)
        k = self._step_index
        u = self._noise.uniforms[:, k, :]
        z = self._noise.normals[:, k, :]
        q_max = cfg.max_inventory
        tick = cfg.minimum_tick_size
        mid_before = self._market.mid
        mark_before = self.cash + self.inventory * mid_before

        events = arr.sample_arrivals(self._intensity, self.dt, u[:, :2])
        self._intensity = arr.update_intensities(cfg.arrival, self._intensity, events, self.dt)

        if cfg.action_type == "touch":
            posted = a.astype(bool)
            depth_bid = np.full_like(mid_before, tick)
            depth_ask = np.full_like(mid_before, tick)
            fill_bid = events[:, 0] & posted[:, 0]
            fill_ask = events[:, 1] & posted[:, 1]
        else:
            depth_bid = np.clip(a[:, 0], 0.0, self.max_depth)
            depth_ask = np.clip(a[:, 1], 0.0, self.max_depth)
            fill_bid = fl.sample_fills(cfg.fill, depth_bid, events[:, 0], u[:, 2])
            fill_ask = fl.sample_fills(cfg.fill, depth_ask, events[:, 1], u[:, 3])

        # A side whose fill would breach the inventory bound was never posted.
        fill_bid &= self.inventory + 1 <= q_max
        fill_ask &= self.inventory - 1 >= -q_max

        price_bid = mid_before - depth_bid
        price_ask = mid_before + depth_ask
        self.cash = self.cash - fill_bid * price_bid + fill_ask * price_ask
        self.inventory = self.inventory + fill_bid - fill_ask

        info: dict[str, np.ndarray] = {
            "arrival_bid": events[:, 0].copy(),
            "arrival_ask": events[:, 1].copy(),
            "fill_bid": fill_bid,
            "fill_ask": fill_ask,
            "exec_price_bid": np.where(fill_bid, price_bid, np.nan),
            "exec_price_ask": np.where(fill_ask, price_ask, np.nan),
        }

        if cfg.action_type == "limit_and_market":
            mo_buy = a[:, 2].astype(bool) & (self.inventory + 1 <= q_max)
            mo_sell = a[:, 3].astype(bool) & (self.inventory - 1 >= -q_max)
            self.cash = self.cash - mo_buy * (mid_before + tick) + mo_sell * (mid_before - tick)
            self.inventory = self.inventory + mo_buy - mo_sell
            info["mo_buy"] = mo_buy
            info["mo_sell"] = mo_sell

        mp.update_state(cfg.midprice, self._market, self.dt, z, events)
        self._step_index = k + 1
        terminal = self._step_index == cfg.n_steps
        mark_after = self.cash + self.inventory * self._market.mid
        rewards = rw.step_reward(
            cfg.reward, mark_before, mark_after, self.inventory,
            self.dt, terminal, self._mark0,
        )
        done = np.full(cfg.num_trajectories, terminal)
        return StepResult(self.observation(), rewards, done, info)
