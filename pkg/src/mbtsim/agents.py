"""Baseline quoting agents.

Agents map a batch of observations to a batch of actions.  They locate
state fields through the environment's observation layout, so they work
with or without auxiliary observables present.
"""
from __future__ import annotations

import numpy as np

from .closed_form import CjSolution, as_quotes
from .environment import ObservationField, TradingEnvironment


def field_index(layout: tuple[ObservationField, ...], name: str) -> int:
    for f in layout:
        if f.name == name:
            return f.index
    raise ValueError(f"observation layout has no field named {name!r}")


class RandomAgent:
    """Uniform over the action space: depths uniform in [0, max_depth],
    market-order and posting flags fair coin flips."""

    name = "random"

    def __init__(self, env: TradingEnvironment, seed: int = 0):
        self.action_type = env.config.action_type
        self.max_depth = env.max_depth
        self.action_dim = env.action_dim
        self._rng = np.random.Generator(np.random.PCG64(seed))

    def get_action(self, observations: np.ndarray) -> np.ndarray:
        n = observations.shape[0]
        if self.action_type == "touch":
            return self._rng.integers(0, 2, size=(n, 2)).astype(float)
        depths = self._rng.uniform(0.0, self.max_depth, size=(n, 2))
        if self.action_type == "limit":
            return depths
        flags = self._rng.integers(0, 2, size=(n, 2)).astype(float)
        return np.concatenate([depths, flags], axis=1)


class FixedActionAgent:
    """Replays one action, or a per-step schedule of shape (n_steps, dim)."""

    name = "fixed_action"

    def __init__(self, action, layout=None, dt: float | None = None):
        self.action = np.asarray(action, dtype=float)
        self.layout = layout
        self.dt = dt
        if self.action.ndim == 2 and (layout is None or dt is None):
            raise ValueError("a schedule needs the observation layout and dt")

    def get_action(self, observations: np.ndarray) -> np.ndarray:
        n = observations.shape[0]
        if self.action.ndim == 1:
            return np.tile(self.action, (n, 1))
        t = observations[0, field_index(self.layout, "time")]
        k = int(np.rint(t / self.dt))
        if not 0 <= k < self.action.shape[0]:
            raise ValueError(f"schedule has no action for step {k}")
        return np.tile(self.action[k], (n, 1))


class FixedSpreadAgent:
    """Symmetric limit quotes at a constant half-spread, no market orders."""

    name = "fixed_spread"

    def __init__(self, half_spread: float, action_dim: int = 2):
        if half_spread < 0:
            raise ValueError("half_spread must be >= 0")
        if action_dim not in (2, 4):
            raise ValueError("fixed spread quoting needs a limit action space")
        self.half_spread = float(half_spread)
        self.action_dim = action_dim

    def get_action(self, observations: np.ndarray) -> np.ndarray:
        n = observations.shape[0]
        a = np.zeros((n, self.action_dim))
        a[:, 0] = self.half_spread
        a[:, 1] = self.half_spread
        return a


class AvellanedaStoikovAgent:
    """Reservation-price quoting for the exponential-utility market maker."""

    name = "avellaneda_stoikov"

    def __init__(
        self,
        layout: tuple[ObservationField, ...],
        risk_aversion: float,
        volatility: float,
        terminal_time: float,
        fill_exponent: float,
    ):
        if risk_aversion <= 0:
            raise ValueError("risk_aversion must be > 0")
        self._q_index = field_index(layout, "inventory")
        self._t_index = field_index(layout, "time")
        self.risk_aversion = float(risk_aversion)
        self.volatility = float(volatility)
        self.terminal_time = float(terminal_time)
        self.fill_exponent = float(fill_exponent)

    def get_action(self, observations: np.ndarray) -> np.ndarray:
        q = observations[:, self._q_index]
        time_to_go = self.terminal_time - observations[:, self._t_index]
        bid, ask = as_quotes(
            q, time_to_go, self.risk_aversion, self.volatility, self.fill_exponent
        )
        return np.stack([bid, ask], axis=1)


class CarteaJaimungalAgent:
    """Quotes the precomputed optimal half-spread tables.

    Suppressed sides (bid at +q_max, ask at -q_max) quote at max_depth;
    the environment's inventory guard blocks those fills regardless.
    """

    name = "cartea_jaimungal"

    def __init__(
        self,
        solution: CjSolution,
        layout: tuple[ObservationField, ...],
        max_quote_depth: float,
    ):
        self.solution = solution
        self._q_index = field_index(layout, "inventory")
        self._t_index = field_index(layout, "time")
        bid, ask = solution.half_spreads()
        bid = np.where(np.isnan(bid), max_quote_depth, bid)
        ask = np.where(np.isnan(ask), max_quote_depth, ask)
        self.bid_table = np.clip(bid, 0.0, max_quote_depth)
        self.ask_table = np.clip(ask, 0.0, max_quote_depth)

    def get_action(self, observations: np.ndarray) -> np.ndarray:
        q_max = self.solution.params.max_inventory
        q = np.rint(observations[:, self._q_index]).astype(int)
        qi = np.clip(q + q_max, 0, 2 * q_max)
        ti = self.solution.time_index(observations[:, self._t_index])
        return np.stack([self.bid_table[ti, qi], self.ask_table[ti, qi]], axis=1)
