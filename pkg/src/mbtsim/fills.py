"""Fill models: probability of a posted quote being lifted by an arrival.

All models are nonincreasing in depth and clamp to probability 1 for
negative depths (a quote through the mid always trades against an
arrival).  ``max_depth`` is the depth at which the fill probability
drops to 1%; environments clip quoted depths to [0, max_depth].
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

FILL_PROBABILITY_FLOOR = 0.01


@dataclass(frozen=True)
class ExponentialFill:
    """P(fill | arrival) = exp(-fill_exponent * depth)."""

    fill_exponent: float

    def validate(self) -> list[str]:
        if not self.fill_exponent > 0:
            return ["fill.fill_exponent must be > 0"]
        return []


@dataclass(frozen=True)
class TriangularFill:
    """Linear decay from 1 at depth 0 to 0 at max_fill_depth."""

    max_fill_depth: float

    def validate(self) -> list[str]:
        if not self.max_fill_depth > 0:
            return ["fill.max_fill_depth must be > 0"]
        return []


@dataclass(frozen=True)
class PowerFill:
    """P(fill | arrival) = 1 / (1 + (fill_multiplier * depth) ** fill_exponent)."""

    fill_exponent: float
    fill_multiplier: float

    def validate(self) -> list[str]:
        problems = []
        if not self.fill_exponent > 0:
            problems.append("fill.fill_exponent must be > 0")
        if not self.fill_multiplier > 0:
            problems.append("fill.fill_multiplier must be > 0")
        return problems


FillModel = ExponentialFill | TriangularFill | PowerFill


def fill_probability(model: FillModel, depth: np.ndarray) -> np.ndarray:
    """Probability of a fill given an arrival, elementwise over depths."""
    depth = np.asarray(depth, dtype=float)
    if isinstance(model, ExponentialFill):
        p = np.exp(-model.fill_exponent * np.maximum(depth, 0.0))
    elif isinstance(model, TriangularFill):
        p = np.clip(1.0 - depth / model.max_fill_depth, 0.0, 1.0)
    elif isinstance(model, PowerFill):
        scaled = model.fill_multiplier * np.maximum(depth, 0.0)
        p = 1.0 / (1.0 + scaled**model.fill_exponent)
    else:
        raise TypeError(f"unknown fill model {type(model).__name__}")
    return np.where(depth < 0.0, 1.0, p)


def max_depth(model: FillModel) -> float:
    """Depth at which the fill probability reaches FILL_PROBABILITY_FLOOR."""
    if isinstance(model, ExponentialFill):
        return float(np.log(1.0 / FILL_PROBABILITY_FLOOR) / model.fill_exponent)
    if isinstance(model, TriangularFill):
        return (1.0 - FILL_PROBABILITY_FLOOR) * model.max_fill_depth
    if isinstance(model, PowerFill):
        odds = 1.0 / FILL_PROBABILITY_FLOOR - 1.0
        return float(odds ** (1.0 / model.fill_exponent) / model.fill_multiplier)
    raise TypeError(f"unknown fill model {type(model).__name__}")


def sample_fills(
    model: FillModel, depth: np.ndarray, arrivals: np.ndarray, u: np.ndarray
) -> np.ndarray:
    """Fill indicators: an arrival on the side and a winning uniform."""
    return arrivals & (u < fill_probability(model, depth))
