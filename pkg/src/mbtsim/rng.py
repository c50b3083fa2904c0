"""Deterministic per-trajectory random streams.

Every trajectory slot owns an independent substream derived from
(master_seed, episode, slot).  A batch of N trajectories therefore draws
exactly the same numbers, slot by slot, as N width-1 simulations seeded
with the same substreams, which is what makes batched and looped rollouts
bit-identical.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class EpisodeNoise:
    """All randomness one episode consumes, drawn up front.

    uniforms: (N, n_steps, 4) in [0, 1); columns are bid arrival,
        ask arrival, bid fill, ask fill.
    normals: (N, n_steps, k) standard normals for the midprice model.
    initial_uniform: (N,) draw for random initial inventory, or None.
    """

    uniforms: np.ndarray
    normals: np.ndarray
    initial_uniform: np.ndarray | None


class RandomSource:
    """Per-trajectory random substreams for a batch of trajectories.

    ``offset`` shifts the slot indices so that a width-1 source with
    offset i replays slot i of a width-N source exactly.
    """

    N_UNIFORM_CHANNELS = 4

    def __init__(self, master_seed: int, num_trajectories: int, offset: int = 0):
        if num_trajectories < 1:
            raise ValueError("num_trajectories must be >= 1")
        if offset < 0:
            raise ValueError("offset must be >= 0")
        self.master_seed = int(master_seed)
        self.num_trajectories = int(num_trajectories)
        self.offset = int(offset)

    def _generator(self, episode: int, slot: int) -> np.random.Generator:
        seq = np.random.SeedSequence(self.master_seed, spawn_key=(episode, slot))
        return np.random.Generator(np.random.PCG64(seq))

    def episode_noise(
        self,
        episode: int,
        n_steps: int,
        n_normal: int,
        draw_initial: bool = False,
    ) -> EpisodeNoise:
        """Draw the full noise tensor for one episode.

        The per-slot draw order (initial uniform, then uniforms, then
        normals) is part of the determinism contract; changing it would
        silently break batch-vs-looped equivalence.
        """
        n = self.num_trajectories
        uniforms = np.empty((n, n_steps, self.N_UNIFORM_CHANNELS))
        normals = np.empty((n, n_steps, n_normal))
        initial = np.empty(n) if draw_initial else None
        for i in range(n):
            g = self._generator(episode, self.offset + i)
            if initial is not None:
                initial[i] = g.random()
            uniforms[i] = g.random((n_steps, self.N_UNIFORM_CHANNELS))
            normals[i] = g.standard_normal((n_steps, n_normal))
        return EpisodeNoise(uniforms, normals, initial)
