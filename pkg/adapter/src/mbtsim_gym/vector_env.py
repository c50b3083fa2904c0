"""Vectorized environment API over the flat function boundary.

VectorEnv follows the conventional vector protocol: ``reset()`` returns
(observations, infos) and ``step(actions)`` returns (observations,
rewards, terminations, infos).  All trajectories share one fixed horizon
and terminate together; on the terminal step the episode's final
observations move into ``infos["terminal_observations"]`` and the
returned observations already belong to the next episode (auto-reset).

Returned arrays are views of internal buffers, valid until the next
reset/step call; copy them to keep them.
"""
from __future__ import annotations

import os
from importlib import resources

import numpy as np

from mbtsim.config import build_environment_config, parse_config_text
from mbtsim.environment import ACTION_COLUMNS, TradingEnvironment

from . import ffi
from .spaces import Box


class VectorEnvError(RuntimeError):
    """Nonzero status from the environment boundary."""


def _raise_on(status: int) -> None:
    if status != ffi.MBT_OK:
        raise VectorEnvError(f"status {status}: {ffi.mbt_last_error()}")


def _action_space(config, max_depth: float) -> Box:
    columns = ACTION_COLUMNS[config.action_type]
    high = np.array([max_depth if name.startswith("delta_") else 1.0
                     for name in columns])
    return Box(np.zeros(len(columns)), high)


class VectorEnv:
    def __init__(self, config_text: str):
        dims = np.zeros(3, dtype=np.int64)
        handle = ffi.mbt_create(config_text, dims)
        if handle <= 0:
            raise VectorEnvError(f"status {handle}: {ffi.mbt_last_error()}")
        self._handle = handle
        self._closed = False
        self.num_envs = int(dims[0])
        obs_dim, action_dim = int(dims[1]), int(dims[2])

        probe = TradingEnvironment(
            build_environment_config(parse_config_text(config_text),
                                     num_trajectories=1)
        )
        self.single_observation_space = Box(-np.inf, np.inf, (obs_dim,))
        self.single_action_space = _action_space(probe.config, probe.max_depth)
        self.observation_space = self.single_observation_space.batched(self.num_envs)
        self.action_space = self.single_action_space.batched(self.num_envs)

        self._obs = np.zeros((self.num_envs, obs_dim))
        self._rewards = np.zeros(self.num_envs)
        self._dones = np.zeros(self.num_envs, dtype=np.uint8)
        self._terminations = np.zeros(self.num_envs, dtype=bool)
        self._actions = np.zeros((self.num_envs, action_dim))
        self._terminal_obs = np.zeros_like(self._obs)

    def _check_open(self) -> None:
        if self._closed:
            raise VectorEnvError("environment is closed")

    def reset(self) -> tuple[np.ndarray, dict]:
        self._check_open()
        _raise_on(ffi.mbt_reset(self._handle, self._obs))
        self._terminations[:] = False
        return self._obs, {}

    def step(self, actions) -> tuple[np.ndarray, np.ndarray, np.ndarray, dict]:
        self._check_open()
        staged = np.asarray(actions, dtype=float)
        if staged.shape != self._actions.shape:
            raise ValueError(
                f"actions must have shape {self._actions.shape}, got {staged.shape}"
            )
        np.copyto(self._actions, staged)
        _raise_on(ffi.mbt_step(self._handle, self._actions, self._obs,
                               self._rewards, self._dones))
        np.copyto(self._terminations, self._dones.astype(bool))
        infos: dict = {}
        if self._terminations.all():
            np.copyto(self._terminal_obs, self._obs)
            infos["terminal_observations"] = self._terminal_obs
            _raise_on(ffi.mbt_reset(self._handle, self._obs))
        return self._obs, self._rewards, self._terminations, infos

    def close(self) -> None:
        if not self._closed:
            self._closed = True
            _raise_on(ffi.mbt_destroy(self._handle))

    def __enter__(self) -> "VectorEnv":
        return self

    def __exit__(self, *exc_info) -> None:
        self.close()

    def __del__(self) -> None:
        try:
            self.close()
        except Exception:
            pass


def make_vec_env(config_path: str) -> VectorEnv:
    """Build a VectorEnv from a TOML file path or a packaged preset name."""
    if os.path.exists(config_path):
        with open(config_path, "r", encoding="utf-8") as f:
            return VectorEnv(f.read())
    stem = config_path.removesuffix(".toml")
    candidate = resources.files("mbtsim").joinpath("presets", f"{stem}.toml")
    if candidate.is_file():
        return VectorEnv(candidate.read_text(encoding="utf-8"))
    raise FileNotFoundError(f"no config file or preset named {config_path!r}")
