"""Closed-form optimal quoting for the constant-rate exponential-fill model.

With arrival rates lambda per side, exponential fill probability
exp(-kappa * depth), running inventory penalty phi and terminal penalty a,
the value of holding inventory q at time t is h(t, q) = ln(omega_q(t)) / kappa
where the omega vector solves a linear backward ODE:

    d/dt omega_q = phi * kappa * q^2 * omega_q
                   - exp(-1) * (lambda_ask * omega_{q-1} + lambda_bid * omega_{q+1})

with omega_q(T) = exp(-kappa * a * q^2) and neighbour terms dropped at the
inventory bounds.  Optimal half-spreads follow from first-order conditions:

    delta_ask(t, q) = 1/kappa + h(t, q) - h(t, q-1)      (posting suppressed at q = -q_max)
    delta_bid(t, q) = 1/kappa + h(t, q) - h(t, q+1)      (posting suppressed at q = +q_max)

The ODE is integrated backward with classical fourth-order Runge-Kutta on
a time grid ``refine`` times finer than the environment grid.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SimulationError


@dataclass(frozen=True)
class CjParams:
    lambda_bid: float
    lambda_ask: float
    fill_exponent: float
    running_aversion: float
    terminal_aversion: float
    max_inventory: int
    terminal_time: float

    def validate(self) -> list[str]:
        problems = []
        if not self.lambda_bid >= 0:
            problems.append("lambda_bid must be >= 0")
        if not self.lambda_ask >= 0:
            problems.append("lambda_ask must be >= 0")
        if not self.fill_exponent > 0:
            problems.append("fill_exponent must be > 0")
        if not self.running_aversion >= 0:
            problems.append("running_aversion must be >= 0")
        if not self.terminal_aversion >= 0:
            problems.append("terminal_aversion must be >= 0")
        if self.max_inventory < 1:
            problems.append("max_inventory must be >= 1")
        if not self.terminal_time > 0:
            problems.append("terminal_time must be > 0")
        return problems


def omega_rhs(params: CjParams, omega: np.ndarray) -> np.ndarray:
    """Time derivative of the omega vector; index j holds q = j - max_inventory."""
    q = np.arange(-params.max_inventory, params.max_inventory + 1, dtype=float)
    out = params.running_aversion * params.fill_exponent * q**2 * omega
    w = np.exp(-1.0)
    out[1:] -= w * params.lambda_ask * omega[:-1]
    out[:-1] -= w * params.lambda_bid * omega[1:]
    return out


@dataclass
class CjSolution:
    params: CjParams
    times: np.ndarray
    omega: np.ndarray

    @property
    def inventories(self) -> np.ndarray:
        return np.arange(-self.params.max_inventory, self.params.max_inventory + 1)

    def h(self) -> np.ndarray:
        return np.log(self.omega) / self.params.fill_exponent

    def half_spreads(self) -> tuple[np.ndarray, np.ndarray]:
        """(delta_bid, delta_ask) tables of shape (n_times, 2*q_max + 1).

        Suppressed sides (bid at +q_max, ask at -q_max) are NaN.
        """
        h = self.h()
        inv_k = 1.0 / self.params.fill_exponent
        bid = np.full_like(h, np.nan)
        ask = np.full_like(h, np.nan)
        bid[:, :-1] = inv_k + h[:, :-1] - h[:, 1:]
        ask[:, 1:] = inv_k + h[:, 1:] - h[:, :-1]
        return bid, ask

    def time_index(self, t: float | np.ndarray) -> np.ndarray:
        """Nearest grid index for time t."""
        n = len(self.times) - 1
        dt = self.params.terminal_time / n
        return np.clip(np.rint(np.asarray(t) / dt).astype(int), 0, n)


def cj_solve(params: CjParams, n_steps: int, refine: int = 10) -> CjSolution:
    """Integrate the omega ODE backward from T and tabulate on n_steps + 1 times."""
    problems = params.validate()
    if problems:
        raise SimulationError("invalid solver parameters: " + "; ".join(problems))
    if n_steps < 1 or refine < 1:
        raise SimulationError("n_steps and refine must be >= 1")
    q = np.arange(-params.max_inventory, params.max_inventory + 1, dtype=float)
    omega_terminal = np.exp(-params.fill_exponent * params.terminal_aversion * q**2)
    n_times = n_steps + 1
    table = np.empty((n_times, q.size))
    table[-1] = omega_terminal
    h = -params.terminal_time / (n_steps * refine)
    omega = omega_terminal.copy()
    for k in range(n_steps, 0, -1):
        for _ in range(refine):
            k1 = omega_rhs(params, omega)
            k2 = omega_rhs(params, omega + 0.5 * h * k1)
            k3 = omega_rhs(params, omega + 0.5 * h * k2)
            k4 = omega_rhs(params, omega + h * k3)
            omega = omega + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        table[k - 1] = omega
    if not np.isfinite(table).all() or (table <= 0).any():
        raise SimulationError(
            f"omega table is not positive finite for parameters {params}"
        )
    times = np.linspace(0.0, params.terminal_time, n_times)
    return CjSolution(params, times, table)


def as_quotes(
    inventory: np.ndarray,
    time_to_go: np.ndarray,
    risk_aversion: float,
    volatility: float,
    fill_exponent: float,
) -> tuple[np.ndarray, np.ndarray]:
    """Reservation-price half-spreads (delta_bid, delta_ask), floored at zero.

    The reservation price sits gamma * sigma^2 * (T - t) * q below the mid
    per unit of inventory and the total quoted spread is
    gamma * sigma^2 * (T - t) + (2 / gamma) * ln(1 + gamma / kappa).
    """
    shift = np.asarray(inventory, dtype=float) * risk_aversion * volatility**2 * time_to_go
    half_spread = 0.5 * (
        risk_aversion * volatility**2 * time_to_go
        + (2.0 / risk_aversion) * np.log(1.0 + risk_aversion / fill_exponent)
    )
    bid = np.maximum(half_spread + shift, 0.0)
    ask = np.maximum(half_spread - shift, 0.0)
    return bid, ask
