"""Minimal Box space for the vectorized environment API."""
from __future__ import annotations

import numpy as np


class Box:
    """Axis-aligned box of float64 values with per-coordinate bounds."""

    def __init__(self, low, high, shape: tuple[int, ...] | None = None):
        if shape is None:
            shape = np.broadcast(np.asarray(low), np.asarray(high)).shape
        self.shape = tuple(int(s) for s in shape)
        self.dtype = np.dtype(np.float64)
        self.low = np.broadcast_to(np.asarray(low, dtype=float), self.shape).copy()
        self.high = np.broadcast_to(np.asarray(high, dtype=float), self.shape).copy()
        if not (self.low <= self.high).all():
            raise ValueError("low must be <= high everywhere")

    def contains(self, x) -> bool:
        arr = np.asarray(x)
        if arr.shape != self.shape or not np.issubdtype(arr.dtype, np.floating):
            return False
        return bool((arr >= self.low).all() and (arr <= self.high).all())

    def sample(self, rng: np.random.Generator) -> np.ndarray:
        low = np.where(np.isfinite(self.low), self.low, -1e6)
        high = np.where(np.isfinite(self.high), self.high, 1e6)
        return rng.uniform(low, high)

    def batched(self, n: int) -> "Box":
        shape = (int(n),) + self.shape
        return Box(np.broadcast_to(self.low, shape),
                   np.broadcast_to(self.high, shape), shape)

    def __eq__(self, other) -> bool:
        return (isinstance(other, Box) and self.shape == other.shape
                and np.array_equal(self.low, other.low)
                and np.array_equal(self.high, other.high))

    def __repr__(self) -> str:
        return f"Box(low={self.low.min()}, high={self.high.max()}, shape={self.shape})"
