"""Arrival models: per-step probabilities, Hawkes dynamics, rate statistics."""
import numpy as np
import pytest

from mbtsim.arrivals import (
    HawkesArrival,
    PoissonArrival,
    arrival_probability,
    initial_intensities,
    sample_arrivals,
    update_intensities,
)


def test_probability_is_rate_times_dt_clipped():
    lam = np.array([0.0, 140.0, 300.0])
    p = arrival_probability(lam, dt=0.005)
    assert np.allclose(p, [0.0, 0.7, 1.0])
    assert arrival_probability(np.array([10.0]), dt=1.0) == pytest.approx(1.0)


def test_sampling_threshold_is_strict():
    intensity = np.array([[100.0, 100.0]])
    p = arrival_probability(intensity, dt=0.005)  # 0.5
    assert sample_arrivals(intensity, 0.005, np.array([[0.499, 0.5]])).tolist() == [
        [True, False]
    ]
    assert p[0, 0] == 0.5


def test_poisson_mean_count_matches_rate():
    model = PoissonArrival(lambda_bid=14.0, lambda_ask=9.0)
    n, n_steps, dt = 20_000, 50, 0.02
    rng = np.random.Generator(np.random.PCG64(123))
    intensity = initial_intensities(model, n)
    counts = np.zeros((n, 2))
    for _ in range(n_steps):
        events = sample_arrivals(intensity, dt, rng.random((n, 2)))
        counts += events
        intensity = update_intensities(model, intensity, events, dt)
    horizon = n_steps * dt
    for side, lam in enumerate((model.lambda_bid, model.lambda_ask)):
        mean = counts[:, side].mean()
        se = counts[:, side].std(ddof=1) / np.sqrt(n)
        assert abs(mean - lam * horizon) < 4 * se


def test_poisson_intensities_are_constant():
    model = PoissonArrival(5.0, 6.0)
    intensity = initial_intensities(model, 3)
    assert np.allclose(intensity, [5.0, 6.0])
    after = update_intensities(model, intensity, np.ones((3, 2), dtype=bool), 0.1)
    assert np.array_equal(after, intensity)


def test_hawkes_decay_is_exact():
    model = HawkesArrival(baseline=10.0, reversion=8.0, jump=2.0,
                          initial_intensity_bid=20.0, initial_intensity_ask=12.0)
    intensity = initial_intensities(model, 1)
    dt = 0.03
    none = np.zeros((1, 2), dtype=bool)
    after = update_intensities(model, intensity, none, dt)
    decay = np.exp(-8.0 * dt)
    assert after[0, 0] == pytest.approx(10.0 + (20.0 - 10.0) * decay, rel=1e-14)
    assert after[0, 1] == pytest.approx(10.0 + (12.0 - 10.0) * decay, rel=1e-14)


def test_hawkes_jump_is_per_side():
    model = HawkesArrival(10.0, 8.0, 2.0, 10.0, 10.0)
    intensity = initial_intensities(model, 1)
    events = np.array([[True, False]])
    after = update_intensities(model, intensity, events, 0.01)
    decay_only = update_intensities(model, intensity, np.zeros((1, 2), bool), 0.01)
    assert after[0, 0] == pytest.approx(decay_only[0, 0] + 2.0, rel=1e-14)
    assert after[0, 1] == pytest.approx(decay_only[0, 1], rel=1e-14)


def test_hawkes_stationary_mean_formula():
    model = HawkesArrival(10.0, 8.0, 2.0, 10.0, 10.0)
    assert model.stationary_mean() == pytest.approx(8.0 * 10.0 / 6.0, rel=1e-15)


def test_hawkes_intensity_reverts_toward_baseline():
    model = HawkesArrival(10.0, 8.0, 0.0, 30.0, 30.0)
    intensity = initial_intensities(model, 1)
    none = np.zeros((1, 2), dtype=bool)
    for _ in range(2000):
        intensity = update_intensities(model, intensity, none, 0.01)
    assert np.allclose(intensity, 10.0, atol=1e-6)


def test_validation_collects_problems():
    ok = HawkesArrival(10.0, 8.0, 2.0, 10.0, 10.0)
    assert ok.validate() == []
    bad = HawkesArrival(-1.0, 2.0, 3.0, -5.0, 1.0)
    problems = bad.validate()
    assert any("baseline" in p for p in problems)
    assert any("jump" in p and "reversion" in p for p in problems)
    assert any("initial_intensity" in p for p in problems)
    assert PoissonArrival(-1.0, 1.0).validate() == ["arrival.lambda_bid must be >= 0"]
