"""Closed-form quoting: ODE correctness, tabulated spreads, reservation quotes."""
import numpy as np
import pytest

from mbtsim.closed_form import CjParams, CjSolution, as_quotes, cj_solve
from mbtsim.errors import SimulationError

BENCH = CjParams(lambda_bid=140.0, lambda_ask=140.0, fill_exponent=1.5,
                 running_aversion=0.5, terminal_aversion=1.0,
                 max_inventory=10, terminal_time=1.0)


def test_terminal_condition():
    params = CjParams(2.0, 3.0, 1.5, 0.3, 0.2, 3, 1.0)
    solution = cj_solve(params, n_steps=50)
    q = solution.inventories.astype(float)
    assert np.allclose(solution.omega[-1], np.exp(-1.5 * 0.2 * q**2), rtol=1e-15)


def test_omega_table_satisfies_the_backward_ode():
    # Independent residual check: finite-difference the tabulated solution
    # and compare against the generator written out from scratch.
    params = CjParams(2.0, 3.0, 1.5, 0.3, 0.2, 3, 1.0)
    n_steps = 500
    solution = cj_solve(params, n_steps, refine=4)
    omega = solution.omega
    dt = params.terminal_time / n_steps
    q = np.arange(-3, 4, dtype=float)
    w = np.exp(-1.0)
    derivative = (-omega[4:] + 8 * omega[3:-1] - 8 * omega[1:-3] + omega[:-4]) / (12 * dt)
    rhs = params.running_aversion * params.fill_exponent * q**2 * omega[2:-2]
    rhs[:, 1:] -= w * params.lambda_ask * omega[2:-2, :-1]
    rhs[:, :-1] -= w * params.lambda_bid * omega[2:-2, 1:]
    np.testing.assert_allclose(derivative, rhs, rtol=1e-6, atol=1e-10)


def test_zero_terminal_aversion_quotes_at_inverse_exponent():
    params = CjParams(140.0, 140.0, 1.5, 0.5, 0.0, 5, 1.0)
    bid, ask = cj_solve(params, 20).half_spreads()
    assert np.allclose(bid[-1, :-1], 1.0 / 1.5, rtol=1e-14)
    assert np.allclose(ask[-1, 1:], 1.0 / 1.5, rtol=1e-14)


def test_symmetric_rates_give_mirrored_quotes():
    solution = cj_solve(BENCH, 40)
    bid, ask = solution.half_spreads()
    np.testing.assert_allclose(bid, ask[:, ::-1], rtol=1e-12, equal_nan=True)


def test_suppressed_sides_are_nan():
    bid, ask = cj_solve(BENCH, 10).half_spreads()
    assert np.isnan(bid[:, -1]).all()
    assert np.isnan(ask[:, 0]).all()
    assert np.isfinite(bid[:, :-1]).all()
    assert np.isfinite(ask[:, 1:]).all()


def test_quotes_skew_monotonically_with_inventory():
    # Longer books quote deeper bids and tighter asks.
    bid, ask = cj_solve(BENCH, 40).half_spreads()
    assert np.all(np.diff(bid[:, :-1], axis=1) > 0)
    assert np.all(np.diff(ask[:, 1:], axis=1) < 0)


def test_value_is_concave_in_inventory():
    h = cj_solve(BENCH, 40).h()
    second = h[:, 2:] - 2 * h[:, 1:-1] + h[:, :-2]
    assert np.all(second <= 1e-12)


def test_refinement_converges():
    mild = CjParams(2.0, 3.0, 1.5, 0.3, 0.2, 3, 1.0)
    coarse = cj_solve(mild, 20, refine=10)
    fine = cj_solve(mild, 20, refine=80)
    np.testing.assert_allclose(coarse.omega, fine.omega, rtol=1e-9)
    # High arrival rates inflate omega by a common factor that integration
    # error perturbs; the quoted spreads are what must stay put.
    bench_coarse = cj_solve(BENCH, 200, refine=10).half_spreads()
    bench_fine = cj_solve(BENCH, 200, refine=40).half_spreads()
    for side in (0, 1):
        err = np.nanmax(np.abs(bench_coarse[side] - bench_fine[side]))
        assert err < 5e-3


def test_time_index_rounds_to_nearest_and_clips():
    solution = cj_solve(CjParams(2.0, 2.0, 1.0, 0.0, 0.0, 2, 1.0), n_steps=4)
    assert solution.time_index(0.13) == 1
    assert solution.time_index(0.12) == 0
    assert solution.time_index(1.0) == 4
    assert solution.time_index(9.0) == 4
    assert solution.time_index(-1.0) == 0
    assert solution.time_index(np.array([0.0, 0.6])).tolist() == [0, 2]


def test_invalid_parameters_raise():
    with pytest.raises(SimulationError, match="fill_exponent"):
        cj_solve(CjParams(1.0, 1.0, 0.0, 0.0, 0.0, 2, 1.0), 10)
    with pytest.raises(SimulationError, match="n_steps"):
        cj_solve(BENCH, 0)
    with pytest.raises(SimulationError, match="positive finite"):
        # Terminal weights underflow to exactly zero at this aversion.
        cj_solve(CjParams(1.0, 1.0, 1.5, 0.0, 1000.0, 10, 1.0), 10, refine=1)


def test_reservation_quotes_frozen_values():
    bid, ask = as_quotes(np.array([0.0]), np.array([1.0]), 0.1, 2.0, 1.5)
    assert bid[0] == pytest.approx(0.8453852113757117, rel=1e-14)
    assert ask[0] == pytest.approx(0.8453852113757117, rel=1e-14)
    bid0, ask0 = as_quotes(np.array([0.0]), np.array([0.0]), 0.1, 2.0, 1.5)
    assert bid0[0] == pytest.approx(0.6453852113757117, rel=1e-14)
    assert ask0[0] == ask0[0] == bid0[0]


def test_reservation_quotes_skew_and_floor():
    q = np.array([-2.0, 0.0, 2.0])
    tau = np.ones(3)
    bid, ask = as_quotes(q, tau, 0.1, 2.0, 1.5)
    assert np.all(np.diff(bid) > 0)
    assert np.all(np.diff(ask) < 0)
    deep_bid, floored_ask = as_quotes(np.array([100.0]), np.array([1.0]), 0.1, 2.0, 1.5)
    assert floored_ask[0] == 0.0
    assert deep_bid[0] == pytest.approx(0.8453852113757117 + 40.0, rel=1e-12)
