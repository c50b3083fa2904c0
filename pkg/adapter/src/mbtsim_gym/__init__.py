"""Vectorized reinforcement-learning adapter for the mbtsim simulator.

Exposes a flat C-style boundary (create/reset/step/destroy plus an
error-message accessor) and a batched environment class following the
familiar reset/step vector-env convention, together with a protocol
checker and a small PPO trainer used for end-to-end smoke runs.
"""
from .ffi import (
    MBT_ERR_BUFFER,
    MBT_ERR_CONFIG,
    MBT_ERR_PROTOCOL,
    MBT_ERR_SIM,
    MBT_ERR_STALE_HANDLE,
    MBT_OK,
    mbt_create,
    mbt_destroy,
    mbt_last_error,
    mbt_reset,
    mbt_step,
)
from .spaces import Box
from .checker import CheckError, check_vector_env
from .vector_env import VectorEnv, VectorEnvError, make_vec_env
from .ppo import (
    PpoConfig,
    PpoResult,
    evaluate_policy,
    policy_action_fn,
    random_action_fn,
    train_ppo,
)

__all__ = [
    "MBT_OK",
    "MBT_ERR_CONFIG",
    "MBT_ERR_STALE_HANDLE",
    "MBT_ERR_BUFFER",
    "MBT_ERR_PROTOCOL",
    "MBT_ERR_SIM",
    "mbt_create",
    "mbt_reset",
    "mbt_step",
    "mbt_destroy",
    "mbt_last_error",
    "Box",
    "VectorEnv",
    "VectorEnvError",
    "make_vec_env",
    "CheckError",
    "check_vector_env",
    "PpoConfig",
    "PpoResult",
    "train_ppo",
    "evaluate_policy",
    "policy_action_fn",
    "random_action_fn",
]

__version__ = "0.1.0"
