"""Contract tests for the flat create/reset/step/destroy boundary."""
import numpy as np
import pytest

import mbtsim_gym as mg


def _create(config: str):
    dims = np.zeros(3, dtype=np.int64)
    handle = mg.mbt_create(config, dims)
    assert handle > 0, mg.mbt_last_error()
    return handle, dims


def _buffers(dims):
    n, obs_dim, action_dim = (int(d) for d in dims)
    return (
        np.full((n, action_dim), 0.5),
        np.zeros((n, obs_dim)),
        np.zeros(n),
        np.zeros(n, dtype=np.uint8),
    )


def test_create_fills_dims(small_config):
    handle, dims = _create(small_config)
    assert dims.tolist() == [8, 4, 2]
    assert mg.mbt_destroy(handle) == mg.MBT_OK


def test_create_rejects_unparseable_text():
    dims = np.zeros(3, dtype=np.int64)
    assert mg.mbt_create("this is :: not toml", dims) == mg.MBT_ERR_CONFIG
    assert mg.mbt_last_error()
    assert dims.tolist() == [0, 0, 0]


def test_create_rejects_invalid_schema():
    dims = np.zeros(3, dtype=np.int64)
    assert mg.mbt_create("[bogus]\nx = 1\n", dims) == mg.MBT_ERR_CONFIG
    assert "bogus" in mg.mbt_last_error() or "missing" in mg.mbt_last_error()


def test_create_validates_dims_buffer(small_config):
    assert mg.mbt_create(small_config, np.zeros(2, dtype=np.int64)) == mg.MBT_ERR_BUFFER
    assert mg.mbt_create(small_config, np.zeros(3)) == mg.MBT_ERR_BUFFER
    frozen = np.zeros(3, dtype=np.int64)
    frozen.setflags(write=False)
    assert mg.mbt_create(small_config, frozen) == mg.MBT_ERR_BUFFER
    assert mg.mbt_create(small_config, [0, 0, 0]) == mg.MBT_ERR_BUFFER


def test_unknown_handle_rejected(small_config):
    handle, dims = _create(small_config)
    actions, obs, rewards, done = _buffers(dims)
    for bogus in (handle + 12345, -1, 0):
        assert mg.mbt_reset(bogus, obs) == mg.MBT_ERR_STALE_HANDLE
        assert mg.mbt_step(bogus, actions, obs, rewards, done) == mg.MBT_ERR_STALE_HANDLE
        assert mg.mbt_destroy(bogus) == mg.MBT_ERR_STALE_HANDLE
        assert str(bogus) in mg.mbt_last_error()
    mg.mbt_destroy(handle)


def test_double_destroy_is_stale(small_config):
    handle, _ = _create(small_config)
    assert mg.mbt_destroy(handle) == mg.MBT_OK
    assert mg.mbt_destroy(handle) == mg.MBT_ERR_STALE_HANDLE


def test_destroyed_handle_not_reused(small_config):
    first, _ = _create(small_config)
    mg.mbt_destroy(first)
    second, _ = _create(small_config)
    assert second != first
    mg.mbt_destroy(second)


def test_handle_accepts_numpy_integer(small_config):
    handle, dims = _create(small_config)
    _, obs, _, _ = _buffers(dims)
    assert mg.mbt_reset(np.int64(handle), obs) == mg.MBT_OK
    assert mg.mbt_destroy(np.int64(handle)) == mg.MBT_OK


def test_step_before_reset_is_protocol_error(small_config):
    handle, dims = _create(small_config)
    actions, obs, rewards, done = _buffers(dims)
    assert mg.mbt_step(handle, actions, obs, rewards, done) == mg.MBT_ERR_PROTOCOL
    assert "reset" in mg.mbt_last_error()
    mg.mbt_destroy(handle)


def test_step_after_terminal_is_protocol_error(small_config):
    handle, dims = _create(small_config)
    actions, obs, rewards, done = _buffers(dims)
    assert mg.mbt_reset(handle, obs) == mg.MBT_OK
    for _ in range(20):
        assert mg.mbt_step(handle, actions, obs, rewards, done) == mg.MBT_OK
    assert done.all()
    assert mg.mbt_step(handle, actions, obs, rewards, done) == mg.MBT_ERR_PROTOCOL
    assert "complete" in mg.mbt_last_error()
    assert mg.mbt_reset(handle, obs) == mg.MBT_OK
    assert mg.mbt_step(handle, actions, obs, rewards, done) == mg.MBT_OK
    mg.mbt_destroy(handle)


def test_reset_validates_obs_buffer(small_config):
    handle, dims = _create(small_config)
    n, obs_dim = int(dims[0]), int(dims[1])
    assert mg.mbt_reset(handle, np.zeros((n, obs_dim + 1))) == mg.MBT_ERR_BUFFER
    assert "obs_out" in mg.mbt_last_error()
    assert mg.mbt_reset(handle, np.zeros((n, obs_dim), dtype=np.float32)) == mg.MBT_ERR_BUFFER
    frozen = np.zeros((n, obs_dim))
    frozen.setflags(write=False)
    assert mg.mbt_reset(handle, frozen) == mg.MBT_ERR_BUFFER
    mg.mbt_destroy(handle)


def test_step_validates_every_buffer(small_config):
    handle, dims = _create(small_config)
    actions, obs, rewards, done = _buffers(dims)
    n = int(dims[0])
    mg.mbt_reset(handle, obs)

    bad_actions = np.full((n, int(dims[2]) + 1), 0.5)
    assert mg.mbt_step(handle, bad_actions, obs, rewards, done) == mg.MBT_ERR_BUFFER
    assert "actions_in" in mg.mbt_last_error()

    strided = np.zeros((n, 2 * int(dims[1])))[:, ::2]
    assert mg.mbt_step(handle, actions, strided, rewards, done) == mg.MBT_ERR_BUFFER
    assert "obs_out" in mg.mbt_last_error()

    assert mg.mbt_step(handle, actions, obs, rewards.astype(np.float32), done) == mg.MBT_ERR_BUFFER
    assert "rewards_out" in mg.mbt_last_error()

    assert mg.mbt_step(handle, actions, obs, rewards, done.astype(np.int8)) == mg.MBT_ERR_BUFFER
    assert "done_out" in mg.mbt_last_error()

    frozen_rewards = np.zeros(n)
    frozen_rewards.setflags(write=False)
    assert mg.mbt_step(handle, actions, obs, frozen_rewards, done) == mg.MBT_ERR_BUFFER
    assert "rewards_out" in mg.mbt_last_error()

    assert mg.mbt_step(handle, actions.tolist(), obs, rewards, done) == mg.MBT_ERR_BUFFER

    assert mg.mbt_step(handle, actions, obs, rewards, done) == mg.MBT_OK
    mg.mbt_destroy(handle)


def test_step_accepts_readonly_actions(small_config):
    handle, dims = _create(small_config)
    actions, obs, rewards, done = _buffers(dims)
    actions.setflags(write=False)
    mg.mbt_reset(handle, obs)
    assert mg.mbt_step(handle, actions, obs, rewards, done) == mg.MBT_OK
    mg.mbt_destroy(handle)


def test_episode_outputs_are_sane(small_config):
    handle, dims = _create(small_config)
    actions, obs, rewards, done = _buffers(dims)
    mg.mbt_reset(handle, obs)
    assert np.isfinite(obs).all()
    for t in range(20):
        assert mg.mbt_step(handle, actions, obs, rewards, done) == mg.MBT_OK
        assert np.isfinite(obs).all()
        assert np.isfinite(rewards).all()
        expected = 1 if t == 19 else 0
        assert (done == expected).all()
    mg.mbt_destroy(handle)


def test_failed_buffer_check_does_not_advance_episode(small_config):
    handle, dims = _create(small_config)
    actions, obs, rewards, done = _buffers(dims)
    mg.mbt_reset(handle, obs)
    for _ in range(19):
        mg.mbt_step(handle, actions, obs, rewards, done)
    bad = np.zeros((int(dims[0]), int(dims[1]) + 3))
    assert mg.mbt_step(handle, actions, bad, rewards, done) == mg.MBT_ERR_BUFFER
    assert mg.mbt_step(handle, actions, obs, rewards, done) == mg.MBT_OK
    assert done.all()
    mg.mbt_destroy(handle)
