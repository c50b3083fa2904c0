"""Backward-induction oracle for the discrete quoting problem.

Solves the exact finite-horizon MDP the simulator implements for the
constant-rate, exponential-fill, zero-drift configuration: per step and
side, an arrival occurs with probability clip(lambda * dt, 0, 1) and
lifts a quote at depth delta with probability exp(-kappa * delta).  Depths
are restricted to a caller-supplied grid.  The reward is the quoting edge
plus the running penalty phi * q^2 * dt on post-step inventory, with the
terminal penalty a * q^2 at the horizon.  Sides that would breach the
inventory bound are not posted.

This is independent of the closed-form route: no omega functions, just
expectation over the four fill outcomes and a grid argmax, so it serves
as the verification oracle for the analytic quotes.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .closed_form import CjParams
from .errors import SimulationError


@dataclass
class DpSolution:
    params: CjParams
    depth_grid: np.ndarray
    times: np.ndarray
    values: np.ndarray
    policy_bid: np.ndarray
    policy_ask: np.ndarray

    @property
    def inventories(self) -> np.ndarray:
        return np.arange(-self.params.max_inventory, self.params.max_inventory + 1)


def dp_solve(params: CjParams, depth_grid: np.ndarray, time_grid: np.ndarray) -> DpSolution:
    """Value iteration over (time, inventory) with gridded depths.

    values has shape (len(time_grid), 2*q_max+1); policy tables have one
    row per step and NaN on suppressed sides.  Grid-tied argmax ties break
    toward the smallest grid index.
    """
    problems = params.validate()
    if problems:
        raise SimulationError("invalid solver parameters: " + "; ".join(problems))
    grid = np.asarray(depth_grid, dtype=float)
    times = np.asarray(time_grid, dtype=float)
    if grid.ndim != 1 or grid.size < 2:
        raise SimulationError("depth_grid must be a 1-d grid with >= 2 points")
    if times.ndim != 1 or times.size < 2:
        raise SimulationError("time_grid must be a 1-d grid with >= 2 points")
    steps = np.diff(times)
    if not np.allclose(steps, steps[0], rtol=1e-9, atol=1e-12):
        raise SimulationError("time_grid must be uniform")
    dt = float(steps[0])
    kappa = params.fill_exponent
    q_max = params.max_inventory
    q = np.arange(-q_max, q_max + 1, dtype=float)
    n_q = q.size
    n_t = times.size

    fill_given_arrival = np.exp(-kappa * grid)
    p_bid = min(params.lambda_bid * dt, 1.0) * fill_given_arrival
    p_ask = min(params.lambda_ask * dt, 1.0) * fill_given_arrival

    values = np.empty((n_t, n_q))
    values[-1] = -params.terminal_aversion * q**2
    policy_bid = np.full((n_t - 1, n_q), np.nan)
    policy_ask = np.full((n_t - 1, n_q), np.nan)
    penalty = params.running_aversion * q**2 * dt

    for k in range(n_t - 2, -1, -1):
        u = values[k + 1] - penalty
        u_up = np.empty(n_q)      # post-step value after a bid fill (q + 1)
        u_dn = np.empty(n_q)      # post-step value after an ask fill (q - 1)
        u_up[:-1] = u[1:]
        u_up[-1] = 0.0            # unused: bid suppressed at q = +q_max
        u_dn[1:] = u[:-1]
        u_dn[0] = 0.0             # unused: ask suppressed at q = -q_max
        pb = np.tile(p_bid, (n_q, 1))
        pa = np.tile(p_ask, (n_q, 1))
        pb[-1] = 0.0
        pa[0] = 0.0
        gain_b = pb * (grid[None, :] + (u_up - u)[:, None])   # (n_q, n_grid)
        gain_a = pa * (grid[None, :] + (u_dn - u)[:, None])
        cross = (2.0 * u - u_up - u_dn)[:, None, None] * pb[:, :, None] * pa[:, None, :]
        j = gain_b[:, :, None] + gain_a[:, None, :] + cross + u[:, None, None]
        flat = j.reshape(n_q, -1)
        best = flat.argmax(axis=1)
        values[k] = flat[np.arange(n_q), best]
        bid_idx, ask_idx = np.unravel_index(best, (grid.size, grid.size))
        policy_bid[k] = grid[bid_idx]
        policy_ask[k] = grid[ask_idx]
        policy_bid[k, -1] = np.nan
        policy_ask[k, 0] = np.nan
    return DpSolution(params, grid, times, values, policy_bid, policy_ask)
