"""Flat function boundary over the trading environment.

C-style contract: integer handles, caller-allocated contiguous numpy
buffers, integer status codes, and a retrievable last-error message.
Calls never raise across this boundary and never hand back arrays they
allocated; results are copied into the caller's buffers.

A handle must be driven by one thread at a time; independent handles
are independent environments.
"""
from __future__ import annotations

import numpy as np

from mbtsim.config import build_environment_config, parse_config_text
from mbtsim.environment import TradingEnvironment
from mbtsim.errors import ConfigError, SimulationError

MBT_OK = 0
MBT_ERR_CONFIG = -1
MBT_ERR_STALE_HANDLE = -2
MBT_ERR_BUFFER = -3
MBT_ERR_PROTOCOL = -4
MBT_ERR_SIM = -5

_envs: dict[int, TradingEnvironment] = {}
_next_handle = 1
_last_error = ""


def mbt_last_error() -> str:
    """Message for the most recent failed boundary call."""
    return _last_error


def _fail(code: int, message: str) -> int:
    global _last_error
    _last_error = message
    return code


def _get_env(handle) -> TradingEnvironment | None:
    if not isinstance(handle, (int, np.integer)):
        return None
    return _envs.get(int(handle))


def _buffer_problem(name: str, buf, shape: tuple, dtype, writeable: bool) -> str | None:
    if not isinstance(buf, np.ndarray):
        return f"{name} must be a numpy array, got {type(buf).__name__}"
    if buf.dtype != np.dtype(dtype):
        return f"{name} must have dtype {np.dtype(dtype).name}, got {buf.dtype.name}"
    if buf.shape != shape:
        return f"{name} must have shape {shape}, got {buf.shape}"
    if not buf.flags.c_contiguous:
        return f"{name} must be C-contiguous"
    if writeable and not buf.flags.writeable:
        return f"{name} must be writeable"
    return None


def mbt_create(config_text: str, dims_out: np.ndarray) -> int:
    """Build an environment from TOML text; returns a handle (> 0) or a
    negative status code.

    On success writes [num_trajectories, observation_dim, action_dim]
    into ``dims_out`` (int64 buffer of shape (3,)) so the caller can size
    the reset/step buffers.
    """
    global _next_handle
    problem = _buffer_problem("dims_out", dims_out, (3,), np.int64, True)
    if problem:
        return _fail(MBT_ERR_BUFFER, problem)
    if not isinstance(config_text, str):
        return _fail(MBT_ERR_CONFIG, "config_text must be a TOML string")
    try:
        env = TradingEnvironment(build_environment_config(parse_config_text(config_text)))
    except ConfigError as e:
        return _fail(MBT_ERR_CONFIG, str(e))
    handle = _next_handle
    _next_handle += 1
    _envs[handle] = env
    dims_out[0] = env.config.num_trajectories
    dims_out[1] = env.observation_dim
    dims_out[2] = env.action_dim
    return handle


def mbt_reset(handle: int, obs_out: np.ndarray) -> int:
    """Start the next episode, writing initial observations into obs_out."""
    env = _get_env(handle)
    if env is None:
        return _fail(MBT_ERR_STALE_HANDLE, f"stale or unknown handle {handle!r}")
    shape = (env.config.num_trajectories, env.observation_dim)
    problem = _buffer_problem("obs_out", obs_out, shape, np.float64, True)
    if problem:
        return _fail(MBT_ERR_BUFFER, problem)
    try:
        np.copyto(obs_out, env.reset())
    except SimulationError as e:
        return _fail(MBT_ERR_SIM, str(e))
    return MBT_OK


def mbt_step(
    handle: int,
    actions_in: np.ndarray,
    obs_out: np.ndarray,
    rewards_out: np.ndarray,
    done_out: np.ndarray,
) -> int:
    """Advance one step for the whole batch.

    actions_in is (N, action_dim) float64; obs_out (N, obs_dim) float64;
    rewards_out (N,) float64; done_out (N,) uint8 (1 on the final step).
    """
    env = _get_env(handle)
    if env is None:
        return _fail(MBT_ERR_STALE_HANDLE, f"stale or unknown handle {handle!r}")
    n = env.config.num_trajectories
    for name, buf, shape, dtype, writeable in (
        ("actions_in", actions_in, (n, env.action_dim), np.float64, False),
        ("obs_out", obs_out, (n, env.observation_dim), np.float64, True),
        ("rewards_out", rewards_out, (n,), np.float64, True),
        ("done_out", done_out, (n,), np.uint8, True),
    ):
        problem = _buffer_problem(name, buf, shape, dtype, writeable)
        if problem:
            return _fail(MBT_ERR_BUFFER, problem)
    try:
        result = env.step(actions_in)
    except SimulationError as e:
        return _fail(MBT_ERR_SIM, str(e))
    except RuntimeError as e:
        return _fail(MBT_ERR_PROTOCOL, str(e))
    except ValueError as e:
        return _fail(MBT_ERR_BUFFER, str(e))
    np.copyto(obs_out, result.observations)
    np.copyto(rewards_out, result.rewards)
    np.copyto(done_out, result.done.astype(np.uint8))
    return MBT_OK


def mbt_destroy(handle: int) -> int:
    """Invalidate a handle; further calls with it fail explicitly."""
    if _get_env(handle) is None:
        return _fail(MBT_ERR_STALE_HANDLE, f"stale or unknown handle {handle!r}")
    del _envs[int(handle)]
    return MBT_OK
