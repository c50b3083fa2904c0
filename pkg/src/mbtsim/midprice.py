"""Midprice models.

Diffusive parts use the exact Gaussian transition over one step (GBM in
log space, mean-reverting parts with the exact Ornstein-Uhlenbeck mean
and variance), so step size affects only the event discretization, not
the marginal law of the diffusion.  Jump variants move the price (or its
drift) by -jump_down per bid-side market order and +jump_up per ask-side
market order, applied after the diffusion update.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class BrownianMidprice:
    s0: float
    drift: float
    volatility: float

    def validate(self) -> list[str]:
        problems = []
        if not self.volatility >= 0:
            problems.append("midprice.volatility must be >= 0")
        return problems


@dataclass(frozen=True)
class GeometricBrownianMidprice:
    s0: float
    drift: float
    volatility: float

    def validate(self) -> list[str]:
        problems = []
        if not self.s0 > 0:
            problems.append("midprice.s0 must be > 0 for the geometric model")
        if not self.volatility >= 0:
            problems.append("midprice.volatility must be >= 0")
        return problems


@dataclass(frozen=True)
class JumpBrownianMidprice:
    """Driftless Brownian midprice kicked by market-order arrivals."""

    s0: float
    volatility: float
    jump_down: float
    jump_up: float

    def validate(self) -> list[str]:
        problems = []
        if not self.volatility >= 0:
            problems.append("midprice.volatility must be >= 0")
        if not self.jump_down >= 0:
            problems.append("midprice.jump_down must be >= 0")
        if not self.jump_up >= 0:
            problems.append("midprice.jump_up must be >= 0")
        return problems


@dataclass(frozen=True)
class OuMidprice:
    """Midprice reverting toward ``mean`` at rate ``reversion``."""

    s0: float
    reversion: float
    mean: float
    volatility: float

    def validate(self) -> list[str]:
        problems = []
        if not self.reversion > 0:
            problems.append("midprice.reversion must be > 0")
        if not self.volatility >= 0:
            problems.append("midprice.volatility must be >= 0")
        return problems


@dataclass(frozen=True)
class OuDriftMidprice:
    """Arithmetic midprice whose drift follows a mean-reverting process."""

    s0: float
    volatility: float
    drift0: float
    drift_reversion: float
    drift_mean: float
    drift_volatility: float

    def validate(self) -> list[str]:
        problems = []
        if not self.volatility >= 0:
            problems.append("midprice.volatility must be >= 0")
        if not self.drift_reversion > 0:
            problems.append("midprice.drift_reversion must be > 0")
        if not self.drift_volatility >= 0:
            problems.append("midprice.drift_volatility must be >= 0")
        return problems


@dataclass(frozen=True)
class OuJumpMidprice:
    """Mean-reverting midprice kicked directly by market-order arrivals."""

    s0: float
    reversion: float
    mean: float
    volatility: float
    jump_down: float
    jump_up: float

    def validate(self) -> list[str]:
        problems = OuMidprice(self.s0, self.reversion, self.mean, self.volatility).validate()
        if not self.jump_down >= 0:
            problems.append("midprice.jump_down must be >= 0")
        if not self.jump_up >= 0:
            problems.append("midprice.jump_up must be >= 0")
        return problems


@dataclass(frozen=True)
class OuJumpDriftMidprice:
    """As OuDriftMidprice, with market-order arrivals kicking the drift."""

    s0: float
    volatility: float
    drift0: float
    drift_reversion: float
    drift_mean: float
    drift_volatility: float
    jump_down: float
    jump_up: float

    def validate(self) -> list[str]:
        problems = OuDriftMidprice(
            self.s0, self.volatility, self.drift0, self.drift_reversion,
            self.drift_mean, self.drift_volatility,
        ).validate()
        if not self.jump_down >= 0:
            problems.append("midprice.jump_down must be >= 0")
        if not self.jump_up >= 0:
            problems.append("midprice.jump_up must be >= 0")
        return problems


MidpriceModel = (
    BrownianMidprice
    | GeometricBrownianMidprice
    | JumpBrownianMidprice
    | OuMidprice
    | OuDriftMidprice
    | OuJumpMidprice
    | OuJumpDriftMidprice
)

_DRIFT_STATE = (OuDriftMidprice, OuJumpDriftMidprice)


@dataclass
class MidpriceState:
    mid: np.ndarray
    drift: np.ndarray | None


def has_drift_state(model: MidpriceModel) -> bool:
    return isinstance(model, _DRIFT_STATE)


def n_normals(model: MidpriceModel) -> int:
    """Standard normals consumed per step (price shock, then drift shock)."""
    return 2 if has_drift_state(model) else 1


def init_state(model: MidpriceModel, n: int) -> MidpriceState:
    mid = np.full(n, float(model.s0))
    drift = np.full(n, float(model.drift0)) if has_drift_state(model) else None
    return MidpriceState(mid, drift)


def _ou_step(x: np.ndarray, mean: float, reversion: float, volatility: float,
             dt: float, z: np.ndarray) -> np.ndarray:
    # Exact transition: mean decays geometrically, variance from the OU law.
    decay = np.exp(-reversion * dt)
    sd = volatility * np.sqrt((1.0 - decay * decay) / (2.0 * reversion))
    return mean + (x - mean) * decay + sd * z


def update_state(
    model: MidpriceModel,
    state: MidpriceState,
    dt: float,
    normals: np.ndarray,
    arrivals: np.ndarray,
) -> MidpriceState:
    """Advance the midprice one step in place and return the state.

    normals has shape (N, n_normals(model)); arrivals has shape (N, 2)
    with columns (bid, ask) and feeds the jump variants.
    """
    z = normals[:, 0]
    sqdt = np.sqrt(dt)
    if isinstance(model, BrownianMidprice):
        state.mid = state.mid + model.drift * dt + model.volatility * sqdt * z
    elif isinstance(model, GeometricBrownianMidprice):
        growth = (model.drift - 0.5 * model.volatility**2) * dt
        state.mid = state.mid * np.exp(growth + model.volatility * sqdt * z)
    elif isinstance(model, JumpBrownianMidprice):
        state.mid = (
            state.mid + model.volatility * sqdt * z
            - model.jump_down * arrivals[:, 0] + model.jump_up * arrivals[:, 1]
        )
    elif isinstance(model, OuMidprice):
        state.mid = _ou_step(state.mid, model.mean, model.reversion,
                             model.volatility, dt, z)
    elif isinstance(model, OuJumpMidprice):
        state.mid = (
            _ou_step(state.mid, model.mean, model.reversion, model.volatility, dt, z)
            - model.jump_down * arrivals[:, 0] + model.jump_up * arrivals[:, 1]
        )
    elif isinstance(model, (OuDriftMidprice, OuJumpDriftMidprice)):
        # Price integrates the pre-update drift over the step.
        state.mid = state.mid + state.drift * dt + model.volatility * sqdt * z
        drift = _ou_step(state.drift, model.drift_mean, model.drift_reversion,
                         model.drift_volatility, dt, normals[:, 1])
        if isinstance(model, OuJumpDriftMidprice):
            drift = drift - model.jump_down * arrivals[:, 0] + model.jump_up * arrivals[:, 1]
        state.drift = drift
    else:
        raise TypeError(f"unknown midprice model {type(model).__name__}")
    return state
