"""Conformance checks for the vectorized environment protocol."""
from __future__ import annotations

import numpy as np

from .spaces import Box


class CheckError(AssertionError):
    """A protocol violation found by check_vector_env."""


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise CheckError(message)


def _check_batch(env, arr, name: str, dtype_kind: str) -> None:
    _require(isinstance(arr, np.ndarray), f"{name} must be a numpy array")
    _require(arr.shape[0] == env.num_envs,
             f"{name} must have leading dimension num_envs={env.num_envs}, "
             f"got shape {arr.shape}")
    _require(arr.dtype.kind == dtype_kind,
             f"{name} must have dtype kind {dtype_kind!r}, got {arr.dtype}")


def _check_observations(env, obs) -> None:
    _check_batch(env, obs, "observations", "f")
    single = env.single_observation_space
    _require(obs.shape == (env.num_envs,) + single.shape,
             f"observations shape {obs.shape} does not match "
             f"(num_envs,) + {single.shape}")
    _require(np.isfinite(obs).all(), "observations must be finite")
    _require(all(single.contains(row) for row in obs),
             "observations must lie in the single observation space")


def check_vector_env(env, max_steps: int = 100_000, seed: int = 0) -> None:
    """Raise CheckError unless env follows the vector protocol.

    Covers spaces, reset/step signatures, array shapes and dtypes, the
    all-at-once termination contract with auto-reset, and rejection of
    mis-shaped action batches.
    """
    _require(isinstance(getattr(env, "num_envs", None), int) and env.num_envs >= 1,
             "env.num_envs must be a positive int")
    for name in ("observation_space", "action_space",
                 "single_observation_space", "single_action_space"):
        _require(isinstance(getattr(env, name, None), Box),
                 f"env.{name} must be a Box space")
    _require(env.observation_space.shape
             == (env.num_envs,) + env.single_observation_space.shape,
             "observation_space must batch single_observation_space")
    _require(env.action_space.shape
             == (env.num_envs,) + env.single_action_space.shape,
             "action_space must batch single_action_space")

    out = env.reset()
    _require(isinstance(out, tuple) and len(out) == 2,
             "reset() must return (observations, infos)")
    obs, infos = out
    _check_observations(env, obs)
    _require(isinstance(infos, dict), "reset() infos must be a dict")

    rng = np.random.Generator(np.random.PCG64(seed))
    terminated = False
    for step in range(max_steps):
        actions = env.action_space.sample(rng)
        out = env.step(actions)
        _require(isinstance(out, tuple) and len(out) == 4,
                 "step() must return (observations, rewards, terminations, infos)")
        obs, rewards, terminations, infos = out
        _check_observations(env, obs)
        _check_batch(env, rewards, "rewards", "f")
        _require(rewards.shape == (env.num_envs,),
                 f"rewards must have shape ({env.num_envs},)")
        _require(np.isfinite(rewards).all(), "rewards must be finite")
        _check_batch(env, terminations, "terminations", "b")
        _require(terminations.shape == (env.num_envs,),
                 f"terminations must have shape ({env.num_envs},)")
        _require(isinstance(infos, dict), "step() infos must be a dict")
        if terminations.any():
            _require(terminations.all(),
                     "trajectories share one horizon; terminations must agree")
            _require("terminal_observations" in infos,
                     "terminal step must expose infos['terminal_observations']")
            _check_observations(env, infos["terminal_observations"])
            terminated = True
            break
        _require("terminal_observations" not in infos,
                 "terminal_observations must only appear on the terminal step")
    _require(terminated, f"episode did not terminate within {max_steps} steps")

    obs, rewards, terminations, _ = env.step(env.action_space.sample(rng))
    _require(not terminations.any(),
             "auto-reset must start a fresh episode after the terminal step")

    bad = np.zeros((env.num_envs + 1,) + env.single_action_space.shape)
    try:
        env.step(bad)
    except Exception:
        pass
    else:
        raise CheckError("step() must reject mis-shaped action batches")
    env.reset()
