import math

import numpy as np
import pytest
from scipy import stats

from fracbinom.exceptions import EventCapExceeded, ParameterError, PathError
from fracbinom.moments import theoretical_mean, theoretical_variance
from fracbinom.objects import ProcessParams, SamplePath
from fracbinom.rng import RngStream
from fracbinom.simulation import (
    empirical_covariance,
    path_value_at,
    sample_binomial_marginal,
    sample_fbp_marginal,
    sample_fbp_marginals,
    simulate_binomial_cross_section,
    simulate_binomial_path,
    simulate_fbp_cross_section,
    simulate_fbp_path,
    simulate_path_set,
    stationary_pmf,
    thinning_probabilities,
)


def assert_legal(path: SamplePath, capacity: int) -> None:
    times = np.asarray(path.times)
    populations = np.concatenate(([path.initial], path.populations))
    assert np.all(np.diff(times) > 0)
    assert np.all(times > 0)
    assert np.all(np.abs(np.diff(populations)) == 1)
    assert populations.min() >= 0 and populations.max() <= capacity
    if len(times):
        assert times[-1] <= path.horizon


@pytest.mark.parametrize(
    "params",
    [
        ProcessParams(0.015, 0.05, 0.8, 500, 300),
        ProcessParams(0.3, 0.5, 0.4, 50, 1),
        ProcessParams(2.0, 0.1, 0.95, 10, 10),
        ProcessParams(0.05, 0.015, 1.0, 20, 5),
    ],
)
def test_paths_are_legal(params):
    for path_id in range(20):
        assert_legal(simulate_fbp_path(params, 30.0, RngStream(3, path_id)), params.capacity)


def test_full_population_without_deaths_is_frozen():
    params = ProcessParams(lam=0.1, mu=0.0, nu=0.8, capacity=10, initial=10)
    path = simulate_fbp_path(params, 100.0, RngStream(0))
    assert len(path) == 0
    assert path.terminal == 10
    assert path_value_at(path, 100.0) == 10


def test_order_one_matches_classical_draw_for_draw():
    params = ProcessParams(0.015, 0.05, 1.0, 500, 300)
    fractional = simulate_fbp_path(params, 50.0, RngStream(9))
    classical = simulate_binomial_path(params, 50.0, RngStream(9))
    assert np.array_equal(fractional.times, classical.times)
    assert np.array_equal(fractional.populations, classical.populations)


def test_event_count_mode(figure_params):
    path = simulate_fbp_path(figure_params, None, RngStream(4), events=50)
    assert len(path) == 50
    assert path.horizon == path.times[-1]
    assert_legal(path, figure_params.capacity)


def test_event_cap(figure_params):
    with pytest.raises(EventCapExceeded) as info:
        simulate_fbp_path(figure_params, 1e6, RngStream(4), max_events=10)
    assert info.value.events == 10


@pytest.mark.parametrize("horizon", [0.0, -1.0, math.inf, None])
def test_horizon_must_be_positive(figure_params, horizon):
    with pytest.raises(ParameterError):
        simulate_fbp_path(figure_params, horizon, RngStream(0))


def test_path_set_is_reproducible(figure_params):
    first = simulate_path_set(figure_params, 3, 17, horizon=20.0)
    second = simulate_path_set(figure_params, 3, 17, horizon=20.0)
    for a, b in zip(first, second):
        assert np.array_equal(a.times, b.times)
        assert np.array_equal(a.populations, b.populations)
    assert not np.array_equal(first[0].times, first[1].times)


def test_path_set_needs_paths(figure_params):
    with pytest.raises(ParameterError):
        simulate_path_set(figure_params, 0, 1, horizon=10.0)


def test_path_value_is_right_continuous():
    path = SamplePath(initial=5, horizon=3.0, times=np.array([1.0, 2.0]), populations=np.array([6, 5]))
    assert path_value_at(path, 0.0) == 5
    assert path_value_at(path, np.nextafter(1.0, 0.0)) == 5
    assert path_value_at(path, 1.0) == 6
    assert path_value_at(path, 2.5) == 5
    assert path_value_at(path, 3.0) == 5


@pytest.mark.parametrize("t", [-0.5, 3.5])
def test_path_value_outside_horizon(t):
    path = SamplePath(initial=5, horizon=3.0, times=np.array([1.0]), populations=np.array([6]))
    with pytest.raises(PathError):
        path_value_at(path, t)


def test_stationary_pmf_two_states():
    params = ProcessParams(0.2, 0.6, 0.7, 1, 1)
    assert stationary_pmf(params) == pytest.approx([0.75, 0.25], abs=1e-15)


def test_stationary_pmf_symmetric():
    params = ProcessParams(0.4, 0.4, 0.7, 10, 3)
    expected = [math.comb(10, n) / 2 ** 10 for n in range(11)]
    assert stationary_pmf(params) == pytest.approx(expected, rel=1e-12)


def test_stationary_pmf_mode(figure_params):
    pmf = stationary_pmf(figure_params)
    assert abs(pmf.sum() - 1.0) < 1e-12
    assert int(np.argmax(pmf)) == 115


def test_thinning_at_time_zero(table_params):
    p1, p0 = thinning_probabilities(table_params, np.array([0.0]))
    assert p1[0] == pytest.approx(1.0) and p0[0] == 0.0


@pytest.mark.parametrize("method", ["path", "exact"])
def test_marginal_at_time_zero(table_params, method):
    assert sample_fbp_marginal(table_params, 0.0, RngStream(1), method) == table_params.initial


@pytest.mark.parametrize("method", ["path", "subordinated", "exact"])
def test_cross_section_at_time_zero(table_params, method):
    values = sample_fbp_marginals(table_params, 0.0, 10, RngStream(1), method)
    assert np.all(values == table_params.initial)


def test_unknown_method(table_params):
    with pytest.raises(ParameterError):
        sample_fbp_marginals(table_params, 1.0, 10, RngStream(1), "gillespie")


def test_binomial_marginal_in_range(table_params):
    stream = RngStream(2)
    values = [sample_binomial_marginal(table_params, 1.0, stream) for _ in range(100)]
    assert all(0 <= value <= table_params.capacity for value in values)


def test_cross_section_moments(table_params):
    size = 20000
    values = simulate_fbp_cross_section(table_params, 1.0, size, RngStream(31)).astype(float)
    mean_error = values.std(ddof=1) / math.sqrt(size)
    assert abs(values.mean() - theoretical_mean(table_params, 1.0)) <= 4 * mean_error
    centred = values - values.mean()
    var_error = math.sqrt((np.mean(centred ** 4) - np.var(values) ** 2) / size)
    assert abs(values.var(ddof=1) - theoretical_variance(table_params, 1.0)) <= 4 * var_error


@pytest.mark.parametrize("t", [1.0, 5.0, 20.0])
def test_order_one_cross_section_is_classical(t):
    params = ProcessParams(0.015, 0.05, 1.0, 500, 300)
    fractional = simulate_fbp_cross_section(params, t, 20000, RngStream(41))
    classical = simulate_binomial_cross_section(params, t, 20000, RngStream(42))
    assert stats.ks_2samp(fractional, classical).pvalue > 0.01


def stationary_pvalue(params: ProcessParams, values: np.ndarray) -> float:
    expected = stationary_pmf(params) * len(values)
    observed = np.bincount(values, minlength=params.capacity + 1)
    keep = expected >= 5
    f_obs = np.append(observed[keep], observed[~keep].sum())
    f_exp = np.append(expected[keep], expected[~keep].sum())
    return stats.chisquare(f_obs, f_exp).pvalue


def test_stationary_limit(table_params):
    size = 10 ** 5
    values = sample_fbp_marginals(table_params, 1e5, size, RngStream(51), "exact")
    assert abs(values.mean() - table_params.stationary_mean) < 0.5
    assert stationary_pvalue(table_params, values) > 0.01


@pytest.mark.slow
@pytest.mark.parametrize("nu, horizon", [(1.0, 2.0), (0.8, 10.0)])
def test_paths_reach_stationary_law(nu, horizon):
    # M = 7 next to N xi = 7.5 keeps the power-law transient small at the horizon
    params = ProcessParams(3.0, 5.0, nu, 20, 7)
    paths = simulate_path_set(params, 2000, 53, horizon=horizon)
    values = np.array([path.terminal for path in paths])
    assert abs(values.mean() - params.stationary_mean) < 0.25
    assert stationary_pvalue(params, values) > 1e-3


def test_fractional_sojourns_are_heavier(figure_params):
    classical = figure_params.with_(nu=1.0)
    frac_max = [simulate_fbp_path(figure_params, 50.0, RngStream(61, i)).sojourns().max() for i in range(200)]
    clas_max = [simulate_fbp_path(classical, 50.0, RngStream(62, i)).sojourns().max() for i in range(200)]
    assert np.median(frac_max) > np.median(clas_max)


def test_empirical_covariance():
    flat = SamplePath(initial=5, horizon=2.0, times=np.array([]), populations=np.array([], dtype=np.int64))
    step = SamplePath(initial=7, horizon=2.0, times=np.array([1.5]), populations=np.array([8]))
    assert empirical_covariance([flat, step], 1.0, 2.0) == pytest.approx(3.0)
    with pytest.raises(ParameterError):
        empirical_covariance([flat], 1.0, 2.0)


@pytest.mark.slow
@pytest.mark.parametrize("nu", [0.6, 0.8])
def test_subordination_agrees_with_paths(table_params, nu):
    params = table_params.with_(nu=nu)
    size = 10 ** 5
    paths = simulate_fbp_cross_section(params, 1.0, size, RngStream(71))
    subordinated = sample_fbp_marginals(params, 1.0, size, RngStream(72), "subordinated")
    exact = sample_fbp_marginals(params, 1.0, size, RngStream(73), "exact")
    assert stats.ks_2samp(paths, subordinated).pvalue > 0.01
    assert stats.ks_2samp(paths, exact).pvalue > 0.01


@pytest.mark.slow
def test_scalar_marginal_agrees_with_path_terminals(table_params):
    stream = RngStream(74)
    scalar = [sample_fbp_marginal(table_params, 1.0, stream) for _ in range(5000)]
    terminals = [simulate_fbp_path(table_params, 1.0, RngStream(75, i)).terminal for i in range(5000)]
    assert stats.ks_2samp(scalar, terminals).pvalue > 0.01


@pytest.mark.slow
@pytest.mark.parametrize("t", [0.5, 1.0, 5.0])
def test_moment_formulas_against_simulation(table_params, t):
    size = 10 ** 5
    values = simulate_fbp_cross_section(table_params, t, size, RngStream(81)).astype(float)
    mean_error = values.std(ddof=1) / math.sqrt(size)
    assert abs(values.mean() - theoretical_mean(table_params, t)) <= 3 * mean_error
    centred = values - values.mean()
    var_error = math.sqrt((np.mean(centred ** 4) - np.var(values) ** 2) / size)
    assert abs(values.var(ddof=1) - theoretical_variance(table_params, t)) <= 3 * var_error


@pytest.mark.slow
def test_figure_mean_at_fifty(figure_params):
    size = 10 ** 4
    values = simulate_fbp_cross_section(figure_params, 50.0, size, RngStream(91)).astype(float)
    error = values.std(ddof=1) / math.sqrt(size)
    assert abs(values.mean() - theoretical_mean(figure_params, 50.0)) <= 3 * error
