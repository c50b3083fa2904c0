"""Fill models: probabilities, depth caps, and sampling semantics."""
import numpy as np
import pytest

from mbtsim.fills import (
    FILL_PROBABILITY_FLOOR,
    ExponentialFill,
    PowerFill,
    TriangularFill,
    fill_probability,
    max_depth,
    sample_fills,
)

ALL_MODELS = [
    ExponentialFill(fill_exponent=1.5),
    TriangularFill(max_fill_depth=2.0),
    PowerFill(fill_exponent=2.0, fill_multiplier=1.0),
]


def test_exponential_probability_formula():
    model = ExponentialFill(1.5)
    d = np.array([0.0, 0.5, 2.0])
    assert np.allclose(fill_probability(model, d), np.exp(-1.5 * d), rtol=1e-15)


def test_triangular_probability_formula():
    model = TriangularFill(2.0)
    d = np.array([0.0, 0.5, 2.0, 3.0])
    assert np.allclose(fill_probability(model, d), [1.0, 0.75, 0.0, 0.0])


def test_power_probability_formula():
    model = PowerFill(2.0, 3.0)
    assert fill_probability(model, np.array([1.0]))[0] == pytest.approx(1.0 / 10.0)


@pytest.mark.parametrize("model", ALL_MODELS, ids=lambda m: type(m).__name__)
def test_negative_depth_always_fills(model):
    assert fill_probability(model, np.array([-0.3]))[0] == 1.0


@pytest.mark.parametrize("model", ALL_MODELS, ids=lambda m: type(m).__name__)
def test_probability_nonincreasing_in_depth(model):
    d = np.linspace(0.0, 2.0 * max_depth(model), 200)
    p = fill_probability(model, d)
    assert np.all(np.diff(p) <= 1e-15)
    assert np.all((p >= 0.0) & (p <= 1.0))


def test_max_depth_frozen_values():
    assert max_depth(ExponentialFill(1.0)) == pytest.approx(4.605170185988092, rel=1e-15)
    assert max_depth(ExponentialFill(1.5)) == pytest.approx(3.0701134573253945, rel=1e-15)
    assert max_depth(TriangularFill(2.0)) == pytest.approx(1.98, rel=1e-15)
    assert max_depth(PowerFill(2.0, 1.0)) == pytest.approx(9.9498743710662, rel=1e-12)


@pytest.mark.parametrize("model", ALL_MODELS, ids=lambda m: type(m).__name__)
def test_probability_at_max_depth_is_the_floor(model):
    p = fill_probability(model, np.array([max_depth(model)]))[0]
    assert p == pytest.approx(FILL_PROBABILITY_FLOOR, rel=1e-12)


def test_sampling_requires_arrival_and_winning_uniform():
    model = ExponentialFill(1.0)
    depth = np.full(4, np.log(2.0))  # probability exactly 0.5
    arrivals = np.array([True, True, False, True])
    u = np.array([0.4, 0.6, 0.1, 0.5])
    fills = sample_fills(model, depth, arrivals, u)
    # Strict inequality: u == p does not fill.
    assert fills.tolist() == [True, False, False, False]


def test_sampling_frequency_matches_probability():
    model = PowerFill(2.0, 1.0)
    depth = np.full(200_000, 1.0)
    p = fill_probability(model, depth[:1])[0]
    rng = np.random.Generator(np.random.PCG64(3))
    fills = sample_fills(model, depth, np.ones_like(depth, bool), rng.random(depth.shape))
    se = np.sqrt(p * (1 - p) / depth.size)
    assert abs(fills.mean() - p) < 4 * se


def test_validation():
    assert ExponentialFill(0.0).validate() == ["fill.fill_exponent must be > 0"]
    assert TriangularFill(-1.0).validate() == ["fill.max_fill_depth must be > 0"]
    assert PowerFill(0.0, 0.0).validate() == [
        "fill.fill_exponent must be > 0",
        "fill.fill_multiplier must be > 0",
    ]
