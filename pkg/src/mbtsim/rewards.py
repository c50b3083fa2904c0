"""Reward models over mark-to-market wealth Y = cash + inventory * midprice.

Per-step rewards are defined so that their episode sum reproduces the
episode objective exactly (up to float rounding):

- pnl: change in Y each step.
- running_penalty: change in Y, minus phi * Q^2 * dt charged on the
  post-step inventory, minus a * Q_T^2 at the terminal step.
- exponential_utility: zero until the terminal step, then
  -exp(-gamma * (Y_T - Y_0)).  The utility is negated so that larger
  terminal wealth always means larger reward.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class PnlReward:
    def validate(self) -> list[str]:
        return []


@dataclass(frozen=True)
class RunningInventoryPenalty:
    per_step_inventory_aversion: float
    terminal_inventory_aversion: float

    def validate(self) -> list[str]:
        problems = []
        if not self.per_step_inventory_aversion >= 0:
            problems.append("reward.per_step_inventory_aversion must be >= 0")
        if not self.terminal_inventory_aversion >= 0:
            problems.append("reward.terminal_inventory_aversion must be >= 0")
        return problems


@dataclass(frozen=True)
class ExponentialUtility:
    risk_aversion: float

    def validate(self) -> list[str]:
        if not self.risk_aversion > 0:
            return ["reward.risk_aversion must be > 0"]
        return []


RewardModel = PnlReward | RunningInventoryPenalty | ExponentialUtility


def step_reward(
    model: RewardModel,
    mark_before: np.ndarray,
    mark_after: np.ndarray,
    inventory_after: np.ndarray,
    dt: float,
    terminal: bool,
    mark_initial: np.ndarray,
) -> np.ndarray:
    if isinstance(model, PnlReward):
        return mark_after - mark_before
    if isinstance(model, RunningInventoryPenalty):
        q2 = inventory_after.astype(float) ** 2
        r = (mark_after - mark_before) - model.per_step_inventory_aversion * q2 * dt
        if terminal:
            r = r - model.terminal_inventory_aversion * q2
        return r
    if isinstance(model, ExponentialUtility):
        if not terminal:
            return np.zeros_like(mark_after)
        return -np.exp(-model.risk_aversion * (mark_after - mark_initial))
    raise TypeError(f"unknown reward model {type(model).__name__}")


def episode_objective(
    model: RewardModel,
    cash: np.ndarray,
    inventory: np.ndarray,
    midprice: np.ndarray,
    dt: float,
) -> np.ndarray:
    """Episode objective from full state paths of shape (N, n_steps + 1).

    Row k of each array is the state after k steps; column 0 is the
    initial state.  Sums of per-step rewards telescope to this value.
    """
    cash = np.asarray(cash, dtype=float)
    inventory = np.asarray(inventory, dtype=float)
    midprice = np.asarray(midprice, dtype=float)
    if not (cash.shape == inventory.shape == midprice.shape):
        raise ValueError("cash, inventory and midprice paths must share a shape")
    if cash.ndim != 2 or cash.shape[1] < 2:
        raise ValueError("paths must be (N, n_steps + 1) with n_steps >= 1")
    y = cash + inventory * midprice
    pnl = y[:, -1] - y[:, 0]
    if isinstance(model, PnlReward):
        return pnl
    if isinstance(model, RunningInventoryPenalty):
        running = model.per_step_inventory_aversion * dt * (inventory[:, 1:] ** 2).sum(axis=1)
        terminal = model.terminal_inventory_aversion * inventory[:, -1] ** 2
        return pnl - running - terminal
    if isinstance(model, ExponentialUtility):
        return -np.exp(-model.risk_aversion * pnl)
    raise TypeError(f"unknown reward model {type(model).__name__}")
