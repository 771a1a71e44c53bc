"""
Method-of-moments recovery of ``(lam, nu)`` from a cross-section observed at a
fixed time, and the Monte Carlo harness that measures its dispersion.
"""
import logging
import math
import typing as t

import numpy as np
from scipy import optimize

from .exceptions import ConvergenceError, FracbinomError, ParameterError, StudyError
from .moments import factorial_second_moment, theoretical_mean
from .objects import (
    EstimateResult,
    McStudyReport,
    MlConfig,
    MomentSummary,
    ParameterStats,
    ProcessParams,
    ReplicateRecord,
)
from .rng import RngStream
from .runner import StudyRunner
from .simulation import sample_fbp_marginals
from .special import DEFAULT_ML_CONFIG, mittag_leffler

_LOG = logging.getLogger("fracbinom.estimator")

NU_FLOOR = 0.05
GRID_SIZE = 16
STARTS = 3
SOLVE_TOLERANCE = 1e-8
STUDY_TOLERANCE = 1e-2
DEFAULT_BOUNDS = (1e-3, 5.0)
FAILURE_SHARE = 0.2
RELAXATION_TARGET = 0.3


def sample_moments(values: t.Sequence[int], T: float, capacity: t.Optional[int] = None) -> MomentSummary:
    """
    First and second sample moments ``m1 = mean(X)``, ``m2 = mean(X ** 2)``.

    Parameters
    ---------
    values: :class:`list`
        population counts observed at ``T``
    T: :class:`float`
        observation time
    capacity: :class:`int`
        when given, every count must lie in ``[0, capacity]``
    """
    data = np.asarray(values, dtype=float)
    if data.ndim != 1 or data.size < 2:
        raise ParameterError(f"need at least two observations, got {data.size}", "values")
    if not np.all(np.isfinite(data)) or np.any(data < 0):
        raise ParameterError("observations must be non-negative counts", "values")
    if capacity is not None and np.any(data > capacity):
        raise ParameterError(f"observations exceed the capacity {capacity}", "values")
    if not (T > 0 and math.isfinite(T)):
        raise ParameterError(f"observation time must be positive, got {T}", "T")
    return MomentSummary(
        m1=float(np.mean(data)),
        m2=float(np.mean(data ** 2)),
        sample_size=int(data.size),
        observation_time=float(T),
    )


def default_observation_time(params: ProcessParams, level: float = RELAXATION_TARGET, cfg: MlConfig = DEFAULT_ML_CONFIG) -> float:
    """
    The ``T`` with ``E_nu(-(lam + mu) T ** nu) = level``: a mid-transient time
    at which both moment equations still carry information about ``nu``.
    """
    if not 0 < level < 1:
        raise ParameterError(f"level must lie in (0, 1), got {level}", "level")

    def gap(x: float) -> float:
        return mittag_leffler(params.nu, -x, cfg) - level

    upper = 1.0
    while gap(upper) > 0:
        upper *= 2.0
    x = optimize.brentq(gap, 0.0, upper, xtol=1e-14, rtol=1e-13)
    return (x / params.total_rate) ** (1.0 / params.nu)


class _MomentObjective:
    # scaled moment residuals as a function of (lam, nu)
    def __init__(self, summary: MomentSummary, known: t.Tuple[float, int, int], cfg: MlConfig) -> None:
        self.summary = summary
        self.mu, self.initial, self.capacity = known
        self.cfg = cfg
        self.evaluations = 0

    def residuals(self, x: np.ndarray) -> np.ndarray:
        self.evaluations += 1
        lam, nu = float(x[0]), float(x[1])
        summary = self.summary
        try:
            params = ProcessParams(lam, self.mu, nu, self.capacity, self.initial)
            m1 = theoretical_mean(params, summary.observation_time, self.cfg)
            m2 = factorial_second_moment(params, summary.observation_time, self.cfg)
        except FracbinomError as exc:
            _LOG.debug(f"moment evaluation failed at lam={lam}, nu={nu}: {exc.message}")
            return np.array([math.inf, math.inf])
        return np.array([
            (m1 - summary.m1) / max(1.0, summary.m1),
            (m2 - summary.m2) / max(1.0, summary.m2),
        ])

    def __call__(self, x: np.ndarray) -> float:
        value = float(np.sum(self.residuals(x) ** 2))
        return value if math.isfinite(value) else math.inf


def solve_moment_equations(
    summary: MomentSummary,
    known: t.Tuple[float, int, int],
    bounds: t.Tuple[float, float] = DEFAULT_BOUNDS,
    tolerance: float = SOLVE_TOLERANCE,
    cfg: MlConfig = DEFAULT_ML_CONFIG,
) -> EstimateResult:
    """
    Solve ``mu1'(lam, nu) = m1``, ``mu2'(lam, nu) = m2`` for ``(lam, nu)``.

    The scaled residuals ``(mu1' - m1) / max(1, m1)`` and
    ``(mu2' - m2) / max(1, m2)`` are minimised over
    ``[lam_min, lam_max] x [0.05, 1]``: a 16 x 16 grid scan, Nelder-Mead from
    the three best cells, then a bounded least-squares polish.

    Parameters
    ---------
    summary: :class:`MomentSummary`
        the sample moments and observation time
    known: :class:`tuple`
        ``(mu, M, N)``, held fixed
    bounds: :class:`tuple`
        ``(lam_min, lam_max)``
    tolerance: :class:`float`
        largest scaled residual norm accepted as converged

    Raises
    ------
    :exc:`.ConvergenceError`
        if the moments cannot be evaluated anywhere on the grid.
    """
    lam_min, lam_max = bounds
    if not 0 < lam_min < lam_max:
        raise ParameterError(f"bounds must satisfy 0 < lam_min < lam_max, got {bounds}", "lambda_min")
    if not tolerance > 0:
        raise ParameterError(f"tolerance must be positive, got {tolerance}", "tolerance")
    mu, initial, capacity = known
    if not mu > 0:
        raise ParameterError(f"mu must be positive, got {mu}", "mu")
    objective = _MomentObjective(summary, (float(mu), int(initial), int(capacity)), cfg)
    box = [(lam_min, lam_max), (NU_FLOOR, 1.0)]

    lams = np.geomspace(lam_min, lam_max, GRID_SIZE)
    nus = np.linspace(NU_FLOOR, 1.0, GRID_SIZE)
    cells = [(lam, nu) for lam in lams for nu in nus]
    scores = np.array([objective(np.array(cell)) for cell in cells])
    if not np.any(np.isfinite(scores)):
        raise ConvergenceError("moment equations could not be evaluated on the search grid", math.inf)

    iterations = 0
    best_x, best_f = np.array(cells[int(np.argmin(scores))]), float(np.min(scores))
    for index in np.argsort(scores, kind="stable")[:STARTS]:
        result = optimize.minimize(
            objective,
            np.array(cells[index]),
            method="Nelder-Mead",
            bounds=box,
            options=dict(xatol=1e-12, fatol=1e-30, maxiter=2000),
        )
        iterations += int(result.nit)
        if result.fun < best_f:
            best_x, best_f = np.clip(result.x, *np.array(box).T), float(result.fun)

    if math.isfinite(best_f):
        polish = optimize.least_squares(
            objective.residuals,
            best_x,
            bounds=tuple(np.array(box).T),
            method="trf",
            jac="3-point",
            xtol=1e-15,
            ftol=1e-15,
            gtol=1e-15,
        )
        iterations += int(polish.nfev)
        polished_f = float(np.sum(polish.fun ** 2))
        if math.isfinite(polished_f) and polished_f <= best_f:
            best_x, best_f = polish.x, polished_f

    residual = math.sqrt(best_f)
    converged = residual <= tolerance
    _LOG.debug(
        f"solve: lam={best_x[0]:.8g}, nu={best_x[1]:.8g}, residual={residual:.3e}, "
        f"evaluations={objective.evaluations}, converged={converged}"
    )
    return EstimateResult(
        lambda_hat=float(best_x[0]),
        nu_hat=float(best_x[1]),
        residual_norm=residual,
        iterations=iterations,
        converged=converged,
    )


def run_replicate(
    true_params: ProcessParams,
    J: int,
    T: float,
    seed: int,
    index: int,
    method: str = "path",
    tolerance: float = STUDY_TOLERANCE,
    bounds: t.Tuple[float, float] = DEFAULT_BOUNDS,
    cfg: MlConfig = DEFAULT_ML_CONFIG,
) -> ReplicateRecord:
    """
    One study replicate: ``J`` marginals at ``T`` from ``RngStream(seed, index)``,
    their sample moments and the moment-equation solve.
    """
    stream = RngStream(seed, index)
    values = sample_fbp_marginals(true_params, T, J, stream, method)
    summary = sample_moments(values, T, true_params.capacity)
    known = (true_params.mu, true_params.initial, true_params.capacity)
    try:
        estimate = solve_moment_equations(summary, known, bounds, tolerance, cfg)
    except ConvergenceError as exc:
        _LOG.warning(f"replicate {index}: {exc.message}")
        return ReplicateRecord(index, math.nan, math.nan, exc.residual, False)
    if not estimate.converged:
        _LOG.warning(f"replicate {index} did not converge (residual {estimate.residual_norm:.3e})")
    return ReplicateRecord(index, estimate.lambda_hat, estimate.nu_hat, estimate.residual_norm, estimate.converged)


def parameter_stats(estimates: t.Sequence[float], truth: float) -> ParameterStats:
    """
    Mean, MAD about the mean, MSE about the truth, percent bias
    ``|mean - truth| / truth * 100`` and CV ``sd / mean * 100``.
    """
    values = np.asarray(estimates, dtype=float)
    if values.size == 0:
        raise ParameterError("no estimates to summarise", "estimates")
    mean = float(np.mean(values))
    spread = float(np.std(values, ddof=1)) if values.size > 1 else 0.0
    return ParameterStats(
        mean=mean,
        mad=float(np.mean(np.abs(values - mean))),
        mse=float(np.mean((values - truth) ** 2)),
        bias_pct=abs(mean - truth) / truth * 100.0,
        cv=spread / mean * 100.0,
    )


def aggregate_study(
    true_params: ProcessParams, J: int, K: int, T: float, seed: int, records: t.Sequence[ReplicateRecord]
) -> McStudyReport:
    """
    Fold replicate records, in replicate order, into a :class:`McStudyReport`.

    Raises
    ------
    :exc:`.StudyError`
        if more than 20% of the replicates failed to converge.
    """
    ordered = sorted(records, key=lambda record: record.replicate)
    good = [record for record in ordered if record.converged]
    failures = len(ordered) - len(good)
    if not good or failures > FAILURE_SHARE * len(ordered):
        raise StudyError(f"{failures} of {len(ordered)} replicates failed to converge", failures, len(ordered))
    return McStudyReport(
        true_params=true_params,
        J=J,
        K=K,
        T=T,
        seed=seed,
        lambda_stats=parameter_stats([record.lambda_hat for record in good], true_params.lam),
        nu_stats=parameter_stats([record.nu_hat for record in good], true_params.nu),
        failures=failures,
        replicates=list(ordered),
    )


def run_mc_study(
    true_params: ProcessParams,
    J: int,
    K: int,
    T: float,
    seed: int,
    *,
    method: str = "path",
    tolerance: float = STUDY_TOLERANCE,
    bounds: t.Tuple[float, float] = DEFAULT_BOUNDS,
    threads: int = 1,
    runner: t.Optional[StudyRunner] = None,
    cfg: MlConfig = DEFAULT_ML_CONFIG,
) -> McStudyReport:
    """
    Monte Carlo study of the moment estimator.

    Replicate ``i`` draws from ``RngStream(seed, i)`` and the aggregation runs
    in replicate order, so the report is identical for any ``threads``.

    Parameters
    ---------
    true_params: :class:`ProcessParams`
        the simulated process
    J: :class:`int`
        marginals per replicate
    K: :class:`int`
        replicates
    T: :class:`float`
        observation time
    seed: :class:`int`
        master seed
    runner: :class:`StudyRunner`
        an existing runner (for example one with progress listeners)
    """
    if int(J) != J or J < 2:
        raise ParameterError(f"J must be an integer >= 2, got {J}", "J")
    if int(K) != K or K < 1:
        raise ParameterError(f"K must be a positive integer, got {K}", "K")
    if not (T > 0 and math.isfinite(T)):
        raise ParameterError(f"T must be positive, got {T}", "T")
    own_runner = runner is None
    runner = runner or StudyRunner(threads)
    _LOG.info(f"study: J={J}, K={K}, T={T}, seed={seed}, method={method}")
    jobs = [(true_params, int(J), float(T), int(seed), index, method, tolerance, bounds, cfg) for index in range(int(K))]
    try:
        records = runner.run(run_replicate, jobs)
        report = aggregate_study(true_params, int(J), int(K), float(T), int(seed), records)
        _LOG.info(f"study finished with {report.failures} failures")
        runner.finish(report)
    finally:
        if own_runner:
            runner.close()
    return report
