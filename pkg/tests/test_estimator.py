import math

import numpy as np
import pytest

from fracbinom import estimator
from fracbinom.estimator import (
    STUDY_TOLERANCE,
    aggregate_study,
    default_observation_time,
    parameter_stats,
    run_mc_study,
    run_replicate,
    sample_moments,
    solve_moment_equations,
)
from fracbinom.exceptions import ConvergenceError, ParameterError, StudyError
from fracbinom.moments import relaxation, theoretical_mean, theoretical_second_moment
from fracbinom.objects import MomentSummary, ProcessParams, ReplicateRecord
from fracbinom.runner import StudyRunner


def exact_summary(params: ProcessParams, T: float) -> MomentSummary:
    return MomentSummary(
        m1=theoretical_mean(params, T),
        m2=theoretical_second_moment(params, T),
        sample_size=500,
        observation_time=T,
    )


def test_sample_moments():
    summary = sample_moments([1, 2, 3], 1.5)
    assert summary.m1 == pytest.approx(2.0)
    assert summary.m2 == pytest.approx(14.0 / 3.0)
    assert summary.sample_size == 3
    assert summary.observation_time == 1.5


@pytest.mark.parametrize(
    "values, T, capacity",
    [([4], 1.0, None), ([1, -2], 1.0, None), ([1, 20], 1.0, 10), ([1, 2], 0.0, None)],
)
def test_sample_moments_validation(values, T, capacity):
    with pytest.raises(ParameterError):
        sample_moments(values, T, capacity)


def test_moment_summary_cauchy_schwarz():
    with pytest.raises(ParameterError):
        MomentSummary(m1=10.0, m2=50.0, sample_size=10, observation_time=1.0)


def test_default_observation_time(table_params):
    T = default_observation_time(table_params)
    assert relaxation(table_params, T) == pytest.approx(0.3, rel=1e-10)
    with pytest.raises(ParameterError):
        default_observation_time(table_params, level=1.5)


@pytest.mark.parametrize("lam, nu", [(0.3, 0.8), (0.5, 0.4), (0.6, 0.9), (0.9, 0.5)])
def test_exact_moments_round_trip(lam, nu):
    params = ProcessParams(lam=lam, mu=0.5, nu=nu, capacity=500, initial=30)
    T = default_observation_time(params)
    result = solve_moment_equations(exact_summary(params, T), (0.5, 30, 500))
    assert result.converged
    assert result.lambda_hat == pytest.approx(lam, abs=1e-6)
    assert result.nu_hat == pytest.approx(nu, abs=1e-6)


def test_classical_round_trip():
    params = ProcessParams(lam=0.3, mu=0.5, nu=1.0, capacity=500, initial=30)
    result = solve_moment_equations(exact_summary(params, 1.5), (0.5, 30, 500))
    assert result.converged
    assert result.lambda_hat == pytest.approx(0.3, abs=1e-6)
    assert result.nu_hat == pytest.approx(1.0, abs=1e-6)


def test_solver_is_deterministic(table_params):
    summary = exact_summary(table_params, 2.0)
    assert solve_moment_equations(summary, (0.5, 30, 500)) == solve_moment_equations(summary, (0.5, 30, 500))


def test_unreachable_moments_do_not_converge():
    # the mean never exceeds N lam_max / (lam_max + mu) < 490
    summary = MomentSummary(m1=490.0, m2=490.0 ** 2 + 10.0, sample_size=100, observation_time=1.0)
    result = solve_moment_equations(summary, (0.5, 30, 500))
    assert not result.converged
    assert result.residual_norm > 1e-8


def test_unevaluable_grid_reports_infinite_residual(table_params, monkeypatch):
    monkeypatch.setattr(estimator._MomentObjective, "__call__", lambda self, x: math.inf)
    with pytest.raises(ConvergenceError) as info:
        solve_moment_equations(exact_summary(table_params, 1.0), (0.5, 30, 500))
    assert info.value.residual == math.inf

    record = run_replicate(table_params, 200, 1.0, 7, 2, "exact")
    assert not record.converged
    assert record.residual == math.inf
    assert math.isnan(record.lambda_hat) and math.isnan(record.nu_hat)


@pytest.mark.parametrize(
    "known, bounds, tolerance",
    [((0.5, 30, 500), (1.0, 0.5), 1e-8), ((0.0, 30, 500), (1e-3, 5.0), 1e-8), ((0.5, 30, 500), (1e-3, 5.0), 0.0)],
)
def test_solver_validation(table_params, known, bounds, tolerance):
    with pytest.raises(ParameterError):
        solve_moment_equations(exact_summary(table_params, 1.0), known, bounds, tolerance)


def test_replicate_is_reproducible(table_params):
    first = run_replicate(table_params, 2000, 1.5, 7, 3, "exact")
    second = run_replicate(table_params, 2000, 1.5, 7, 3, "exact")
    assert first == second
    assert first.replicate == 3


def test_parameter_stats():
    stats = parameter_stats([1.0, 2.0, 3.0], 2.0)
    assert stats.mean == pytest.approx(2.0)
    assert stats.mad == pytest.approx(2.0 / 3.0)
    assert stats.mse == pytest.approx(2.0 / 3.0)
    assert stats.bias_pct == pytest.approx(0.0)
    assert stats.cv == pytest.approx(50.0)


def test_mse_dominates_variance():
    estimates = np.array([0.29, 0.31, 0.33, 0.35])
    stats = parameter_stats(estimates, 0.3)
    assert stats.mse - np.var(estimates) == pytest.approx((estimates.mean() - 0.3) ** 2, abs=1e-12)
    assert stats.bias_pct == pytest.approx(abs(estimates.mean() - 0.3) / 0.3 * 100)


def _records(failures: int, total: int):
    return [
        ReplicateRecord(index, 0.3 + 0.01 * index, 0.8, 1e-4, index >= failures)
        for index in reversed(range(total))
    ]


def test_aggregate_orders_replicates(table_params):
    report = aggregate_study(table_params, 500, 10, 1.0, 0, _records(2, 10))
    assert [record.replicate for record in report.replicates] == list(range(10))
    assert report.failures == 2
    assert report.lambda_stats.mean == pytest.approx(np.mean([0.3 + 0.01 * i for i in range(2, 10)]))


@pytest.mark.parametrize("failures", [3, 10])
def test_aggregate_rejects_failed_studies(table_params, failures):
    with pytest.raises(StudyError) as info:
        aggregate_study(table_params, 500, 10, 1.0, 0, _records(failures, 10))
    assert info.value.failures == failures
    assert info.value.replicates == 10


def test_small_study_is_reproducible(table_params):
    first = run_mc_study(table_params, 5000, 3, 1.5, 11, method="exact")
    second = run_mc_study(table_params, 5000, 3, 1.5, 11, method="exact")
    assert first.to_dict() == second.to_dict()
    assert first.replicates == second.replicates
    assert set(first.to_dict()) == {"true_params", "J", "K", "T", "seed", "lambda", "nu", "failures"}
    assert set(first.to_dict()["lambda"]) == {"mean", "mad", "mse", "bias_pct", "cv"}


def test_study_validation(table_params):
    with pytest.raises(ParameterError):
        run_mc_study(table_params, 1, 3, 1.0, 0)
    with pytest.raises(ParameterError):
        run_mc_study(table_params, 100, 0, 1.0, 0)


@pytest.mark.slow
def test_study_is_independent_of_workers(table_params):
    single = run_mc_study(table_params, 2000, 8, 1.5, 5, method="exact", threads=1)
    pooled = run_mc_study(table_params, 2000, 8, 1.5, 5, method="exact", threads=4)
    assert single.to_dict() == pooled.to_dict()
    assert single.replicates == pooled.replicates


@pytest.mark.slow
def test_table_study_bias(table_params):
    T = default_observation_time(table_params)
    report = run_mc_study(table_params, 500, 100, T, 2024, tolerance=STUDY_TOLERANCE, threads=4)
    assert report.lambda_stats.bias_pct <= 5.0
    assert report.nu_stats.bias_pct <= 15.0


@pytest.mark.slow
def test_small_order_is_harder_to_estimate(table_params):
    biases = []
    for nu in (0.2, 0.9):
        params = table_params.with_(nu=nu)
        T = default_observation_time(params)
        report = run_mc_study(params, 500, 100, T, 77, method="exact", threads=4)
        biases.append(report.nu_stats.bias_pct)
    assert biases[0] > biases[1]



@pytest.mark.slow
def test_bias_shrinks_with_sample_size(table_params):
    T = default_observation_time(table_params)
    errors = {}
    for J in (500, 5000):
        reports = [run_mc_study(table_params, J, 40, T, seed, method="exact", threads=4) for seed in range(1, 6)]
        errors[J] = (
            np.median([abs(report.lambda_stats.mean - table_params.lam) for report in reports]),
            np.median([abs(report.nu_stats.mean - table_params.nu) for report in reports]),
        )
    assert errors[5000][0] <= errors[500][0]
    assert errors[5000][1] <= errors[500][1]


def test_study_closes_the_runner_it_creates(table_params, monkeypatch):
    closed = []

    class RecordingRunner(StudyRunner):
        def close(self) -> None:
            super().close()
            closed.append(self.loop.is_closed())

    monkeypatch.setattr(estimator, "StudyRunner", RecordingRunner)
    run_mc_study(table_params, 5000, 1, 1.5, 11, method="exact")
    assert closed == [True]
