"""Order-flow arrival models.

Each side of the book receives at most one liquidity-taker market order
per step, sampled as a Bernoulli with probability ``intensity * dt``
(clipped to [0, 1]).  That choice keeps the expected number of events per
unit time equal to the configured rate, so analytic rate-based formulas
hold exactly for the discretized simulator.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class PoissonArrival:
    """Constant-intensity arrivals, one rate per side."""

    lambda_bid: float
    lambda_ask: float

    def validate(self) -> list[str]:
        problems = []
        if not self.lambda_bid >= 0:
            problems.append("arrival.lambda_bid must be >= 0")
        if not self.lambda_ask >= 0:
            problems.append("arrival.lambda_ask must be >= 0")
        return problems


@dataclass(frozen=True)
class HawkesArrival:
    """Self-exciting arrivals with an exponential kernel.

    Each side's intensity decays toward ``baseline`` at rate ``reversion``
    and jumps by ``jump`` on that side's own events.  Stability requires
    jump < reversion; the stationary mean intensity is
    reversion * baseline / (reversion - jump).
    """

    baseline: float
    reversion: float
    jump: float
    initial_intensity_bid: float
    initial_intensity_ask: float

    def validate(self) -> list[str]:
        problems = []
        if not self.baseline >= 0:
            problems.append("arrival.baseline must be >= 0")
        if not self.reversion > 0:
            problems.append("arrival.reversion must be > 0")
        if not self.jump >= 0:
            problems.append("arrival.jump must be >= 0")
        if not self.jump < self.reversion:
            problems.append("arrival.jump must be < arrival.reversion for stability")
        if not self.initial_intensity_bid >= 0:
            problems.append("arrival.initial_intensity bid component must be >= 0")
        if not self.initial_intensity_ask >= 0:
            problems.append("arrival.initial_intensity ask component must be >= 0")
        return problems

    def stationary_mean(self) -> float:
        return self.reversion * self.baseline / (self.reversion - self.jump)


ArrivalModel = PoissonArrival | HawkesArrival


def arrival_probability(intensity: np.ndarray, dt: float) -> np.ndarray:
    """Per-step event probability for given intensities."""
    return np.clip(intensity * dt, 0.0, 1.0)


def sample_arrivals(intensity: np.ndarray, dt: float, u: np.ndarray) -> np.ndarray:
    """Bernoulli arrival indicators from uniforms u, shape (N, 2)."""
    return u < arrival_probability(intensity, dt)


def initial_intensities(model: ArrivalModel, n: int) -> np.ndarray:
    """Starting intensity array of shape (N, 2), columns (bid, ask)."""
    if isinstance(model, PoissonArrival):
        lam = (model.lambda_bid, model.lambda_ask)
    else:
        lam = (model.initial_intensity_bid, model.initial_intensity_ask)
    return np.tile(np.asarray(lam, dtype=float), (n, 1))


def update_intensities(
    model: ArrivalModel, intensity: np.ndarray, arrivals: np.ndarray, dt: float
) -> np.ndarray:
    """Advance intensities one step.

    Hawkes intensities decay exactly over the step and the jump lands at
    the step end; Poisson intensities are constant.
    """
    if isinstance(model, PoissonArrival):
        return intensity
    decay = np.exp(-model.reversion * dt)
    return model.baseline + (intensity - model.baseline) * decay + model.jump * arrivals
