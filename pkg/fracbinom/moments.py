"""
Closed-form first and second order quantities of the fractional binomial process.

All of them are polynomials in the relaxation factors
``E_nu(-k (lam + mu) t ** nu)`` for ``k = 1, 2``; the large-time forms
replace those factors by their leading inverse-power term ``r / t ** nu`` with
``r = 1 / (Gamma(1 - nu) (lam + mu))``.
"""
import logging
import math
import typing as t

import numpy as np
from scipy import stats

from .exceptions import FitError, FormulaError, ParameterError
from .objects import DependenceFit, MlConfig, MomentPoint, ProcessParams
from .special import DEFAULT_ML_CONFIG, leading_coefficient, mittag_leffler

_LOG = logging.getLogger("fracbinom.moments")

NEGATIVE_VARIANCE_SLACK = 1e-9
DEPENDENCE_MODES = ("fbp", "fbn")


def _check_time(name: str, value: float) -> None:
    if not (value >= 0 and math.isfinite(value)):
        raise ParameterError(f"{name} must be non-negative and finite, got {value}", name)


def _check_order(s: float, t: float) -> None:
    _check_time("s", s)
    _check_time("t", t)
    if s > t:
        raise ParameterError(f"s must not exceed t, got s={s}, t={t}", "s")


def relaxation(params: ProcessParams, t: float, factor: float = 1.0, cfg: MlConfig = DEFAULT_ML_CONFIG) -> float:
    """
    ``E_nu(-factor (lam + mu) t ** nu)``.
    """
    if t == 0:
        return 1.0
    return mittag_leffler(params.nu, -factor * params.total_rate * t ** params.nu, cfg)


def variance_coefficients(params: ProcessParams) -> t.Tuple[float, float]:
    """
    Coefficients ``(A, B)`` of ``E_nu(-2 (lam + mu) t ** nu)`` and
    ``E_nu(-(lam + mu) t ** nu)`` in the variance.
    """
    xi, n, m = params.xi, params.capacity, params.initial
    a = xi ** 2 * n * (n - 1) - 2 * xi * m * (n - 1) + m * (m - 1)
    b = 2 * xi ** 2 * n - xi * (n + 2 * m) + m
    return a, b


def decay_constant(params: ProcessParams) -> float:
    """
    ``r = a0(nu) / (pi (lam + mu))``, the scale of the ``t ** -nu`` tails.
    """
    return leading_coefficient(params.nu) / (math.pi * params.total_rate)


def theoretical_mean(params: ProcessParams, t: float, cfg: MlConfig = DEFAULT_ML_CONFIG) -> float:
    """
    ``(M - N xi) E_nu(-(lam + mu) t ** nu) + N xi``.
    """
    _check_time("t", t)
    offset = params.initial - params.stationary_mean
    return offset * relaxation(params, t, cfg=cfg) + params.stationary_mean


def theoretical_variance(params: ProcessParams, t: float, cfg: MlConfig = DEFAULT_ML_CONFIG) -> float:
    """
    Variance of ``N(t)``:

    ``A E2 + B E1 - (M - N xi) ** 2 E1 ** 2 + N xi (1 - xi)``

    with ``Ek = E_nu(-k (lam + mu) t ** nu)`` and ``(A, B)`` from
    :func:`variance_coefficients`.

    Raises
    ------
    :exc:`.FormulaError`
        if the value is negative beyond roundoff (``-1e-9 N ** 2``).
    """
    _check_time("t", t)
    a, b = variance_coefficients(params)
    e1 = relaxation(params, t, cfg=cfg)
    e2 = relaxation(params, t, 2.0, cfg)
    offset = params.initial - params.stationary_mean
    value = a * e2 + b * e1 - offset ** 2 * e1 ** 2 + params.stationary_variance
    if value < 0:
        if value < -NEGATIVE_VARIANCE_SLACK * params.capacity ** 2:
            raise FormulaError(f"variance {value} at t={t} is negative beyond roundoff")
        _LOG.warning(f"clamping variance {value} at t={t} to zero")
        value = 0.0
    return value


def theoretical_second_moment(params: ProcessParams, t: float, cfg: MlConfig = DEFAULT_ML_CONFIG) -> float:
    """
    ``E[N(t) ** 2]`` as variance plus squared mean.
    """
    return theoretical_variance(params, t, cfg) + theoretical_mean(params, t, cfg) ** 2


def factorial_second_moment(params: ProcessParams, t: float, cfg: MlConfig = DEFAULT_ML_CONFIG) -> float:
    """
    ``E[N(t) ** 2]`` computed directly as ``E[N (N - 1)] + E[N]``.

    Given the random clock, the ``M`` initially occupied slots are occupied
    with probability ``p1 = xi + (1 - xi) theta`` and the ``N - M`` empty ones
    with ``p0 = xi (1 - theta)``, ``theta = exp(-(lam + mu) clock)``. Averaging
    over the inverse-stable clock turns ``theta`` into ``E1`` and ``theta ** 2``
    into ``E2``.
    """
    _check_time("t", t)
    xi, n, m = params.xi, params.capacity, params.initial
    e1 = relaxation(params, t, cfg=cfg)
    e2 = relaxation(params, t, 2.0, cfg)
    # (constant, theta, theta**2) coefficients
    p1_sq = (xi ** 2, 2 * xi * (1 - xi), (1 - xi) ** 2)
    p1_p0 = (xi ** 2, xi * (1 - 2 * xi), -xi * (1 - xi))
    p0_sq = (xi ** 2, -2 * xi ** 2, xi ** 2)
    weights = (m * (m - 1), 2 * m * (n - m), (n - m) * (n - m - 1))
    coefficients = [
        sum(weight * poly[k] for weight, poly in zip(weights, (p1_sq, p1_p0, p0_sq)))
        for k in range(3)
    ]
    factorial = coefficients[0] + coefficients[1] * e1 + coefficients[2] * e2
    return factorial + theoretical_mean(params, t, cfg)


def moment_point(params: ProcessParams, t: float, cfg: MlConfig = DEFAULT_ML_CONFIG) -> MomentPoint:
    mean = theoretical_mean(params, t, cfg)
    variance = theoretical_variance(params, t, cfg)
    return MomentPoint(t=float(t), mean=mean, variance=variance, second_moment=variance + mean ** 2)


def moment_table(params: ProcessParams, ts: t.Iterable[float], cfg: MlConfig = DEFAULT_ML_CONFIG) -> t.List[MomentPoint]:
    return [moment_point(params, time, cfg) for time in ts]


def stationary_product_moment(params: ProcessParams, s: float, t: float, cfg: MlConfig = DEFAULT_ML_CONFIG) -> float:
    """
    ``(N xi) ** 2 + N xi (1 - xi) E_nu(-(lam + mu) (t - s) ** nu)``.
    """
    _check_order(s, t)
    return params.stationary_mean ** 2 + params.stationary_variance * relaxation(params, t - s, cfg=cfg)


def covariance(params: ProcessParams, s: float, t: float, cfg: MlConfig = DEFAULT_ML_CONFIG) -> float:
    """
    Autocovariance of ``N(s)`` and ``N(t)`` for ``s <= t``:

    ``N xi (1 - xi) E(t - s) - (M - N xi) ** 2 E(s) E(t) - (M - N xi) N xi [E(s) + E(t)]``

    where ``E(u) = E_nu(-(lam + mu) u ** nu)``. At fixed ``s`` it tends to
    :func:`covariance_limit`, not to zero.
    """
    _check_order(s, t)
    offset = params.initial - params.stationary_mean
    at_s = relaxation(params, s, cfg=cfg)
    at_t = relaxation(params, t, cfg=cfg)
    return (
        params.stationary_variance * relaxation(params, t - s, cfg=cfg)
        - offset ** 2 * at_s * at_t
        - offset * params.stationary_mean * (at_s + at_t)
    )


def covariance_limit(params: ProcessParams, s: float, cfg: MlConfig = DEFAULT_ML_CONFIG) -> float:
    """
    ``lim_{t -> inf} covariance(s, t) = -(M - N xi) N xi E(s)``.
    """
    _check_time("s", s)
    offset = params.initial - params.stationary_mean
    return -offset * params.stationary_mean * relaxation(params, s, cfg=cfg)


def correlation(params: ProcessParams, s: float, t: float, cfg: MlConfig = DEFAULT_ML_CONFIG) -> float:
    """
    ``covariance(s, t) / sqrt(Var(s) Var(t))``.

    Raises
    ------
    :exc:`.ParameterError`
        if ``s`` or ``t`` is zero (the population is deterministic at time zero).
    :exc:`.FormulaError`
        if either variance evaluates to zero.
    """
    _check_order(s, t)
    if s == 0:
        raise ParameterError("correlation is undefined at time zero", "s")
    var_s = theoretical_variance(params, s, cfg)
    var_t = theoretical_variance(params, t, cfg)
    if var_s == 0 or var_t == 0:
        raise FormulaError(f"zero variance at s={s} or t={t}")
    return covariance(params, s, t, cfg) / math.sqrt(var_s * var_t)


def asymptotic_variance(params: ProcessParams, t: float) -> float:
    """
    Large-``t`` form ``r / t ** nu (A / 2 + B)`` of the variance with the
    stationary term ``N xi (1 - xi)`` removed; compare it against
    ``theoretical_variance(t) - N xi (1 - xi)``.
    """
    if not t > 0:
        raise ParameterError(f"t must be positive, got {t}", "t")
    a, b = variance_coefficients(params)
    return decay_constant(params) / t ** params.nu * (a / 2 + b)


def asymptotic_covariance(params: ProcessParams, s: float, t: float, cfg: MlConfig = DEFAULT_ML_CONFIG) -> float:
    """
    Large-``t`` form at fixed ``s``:

    ``r / t ** nu [N xi (1 - xi) - (M - N xi) ** 2 E(s) - (M - N xi) N xi]``

    It describes ``covariance(s, t) - covariance_limit(s)``.
    """
    if not 0 < s <= t:
        raise ParameterError(f"need 0 < s <= t, got s={s}, t={t}", "s")
    offset = params.initial - params.stationary_mean
    bracket = (
        params.stationary_variance
        - offset ** 2 * relaxation(params, s, cfg=cfg)
        - offset * params.stationary_mean
    )
    return decay_constant(params) / t ** params.nu * bracket


def asymptotic_correlation(params: ProcessParams, s: float, t: float, cfg: MlConfig = DEFAULT_ML_CONFIG) -> float:
    """
    ``|asymptotic_covariance(s, t)| / sqrt(Var(s) |asymptotic_variance(t)|)``,
    which decays like ``t ** (-nu / 2)``.
    """
    var_s = theoretical_variance(params, s, cfg)
    if var_s == 0:
        raise FormulaError(f"zero variance at s={s}")
    return abs(asymptotic_covariance(params, s, t, cfg)) / math.sqrt(var_s * abs(asymptotic_variance(params, t)))


def _check_delta(delta: float) -> None:
    if not (delta >= 0 and math.isfinite(delta)):
        raise ParameterError(f"delta must be non-negative and finite, got {delta}", "delta")


def _check_increment(s: float, t: float, delta: float) -> None:
    _check_time("s", s)
    _check_delta(delta)
    if s + delta > t:
        raise ParameterError(f"need s + delta <= t, got s={s}, delta={delta}, t={t}", "t")


def fbn_covariance(
    params: ProcessParams, s: float, t: float, delta: float, cfg: MlConfig = DEFAULT_ML_CONFIG
) -> float:
    """
    Covariance of the increments ``Z(u) = N(u + delta) - N(u)`` at ``s`` and ``t``:

    ``cov(s + delta, t + delta) + cov(s, t) - cov(s + delta, t) - cov(s, t + delta)``

    The four covariances are combined in factored form, in which the
    ``(M - N xi) N xi`` terms cancel identically:

    ``N xi (1 - xi) [2 E(t - s) - E(t - s - delta) - E(t - s + delta)]
    - (M - N xi) ** 2 [E(s + delta) - E(s)] [E(t + delta) - E(t)]``
    """
    _check_increment(s, t, delta)
    if delta == 0:
        return 0.0
    lag = t - s
    offset = params.initial - params.stationary_mean
    stationary = (
        2.0 * relaxation(params, lag, cfg=cfg)
        - relaxation(params, lag - delta, cfg=cfg)
        - relaxation(params, lag + delta, cfg=cfg)
    )
    step_s = relaxation(params, s + delta, cfg=cfg) - relaxation(params, s, cfg=cfg)
    step_t = relaxation(params, t + delta, cfg=cfg) - relaxation(params, t, cfg=cfg)
    return params.stationary_variance * stationary - offset ** 2 * step_s * step_t


def fbn_variance(params: ProcessParams, t: float, delta: float, cfg: MlConfig = DEFAULT_ML_CONFIG) -> float:
    """
    ``Var(t + delta) + Var(t) - 2 covariance(t, t + delta)``.
    """
    _check_delta(delta)
    _check_time("t", t)
    return (
        theoretical_variance(params, t + delta, cfg)
        + theoretical_variance(params, t, cfg)
        - 2.0 * covariance(params, t, t + delta, cfg)
    )


def asymptotic_fbn_variance(params: ProcessParams, t: float) -> float:
    """
    Large-``t`` form ``2 r / t ** nu [A / 2 + B + 2 (M - N xi) N xi]`` of
    :func:`fbn_variance` with its constant part removed. Negative whenever
    the initial population sits far enough below ``N xi``.
    """
    if not t > 0:
        raise ParameterError(f"t must be positive, got {t}", "t")
    a, b = variance_coefficients(params)
    offset = params.initial - params.stationary_mean
    bracket = a / 2 + b + 2 * offset * params.stationary_mean
    return 2.0 * decay_constant(params) / t ** params.nu * bracket


def asymptotic_fbn_covariance(params: ProcessParams, s: float, t: float, delta: float, cfg: MlConfig = DEFAULT_ML_CONFIG) -> float:
    """
    ``-nu r delta (M - N xi) ** 2 [E(s) - E(s + delta)] / t ** (1 + nu)``.
    """
    _check_increment(s, t, delta)
    offset = params.initial - params.stationary_mean
    drop = relaxation(params, s, cfg=cfg) - relaxation(params, s + delta, cfg=cfg)
    return -params.nu * decay_constant(params) * delta * offset ** 2 * drop / t ** (1 + params.nu)


def fbn_correlation_magnitude(
    params: ProcessParams, s: float, t: float, delta: float, cfg: MlConfig = DEFAULT_ML_CONFIG
) -> float:
    """
    ``|fbn_covariance(s, t)| / sqrt(|fbn_variance(s)| |asymptotic_fbn_variance(t)|)``,
    which decays like ``t ** -(1 + nu / 2)``.
    """
    var_s = abs(fbn_variance(params, s, delta, cfg))
    var_t = abs(asymptotic_fbn_variance(params, t))
    if var_s == 0 or var_t == 0:
        raise FormulaError(f"zero increment variance at s={s} or t={t}")
    return abs(fbn_covariance(params, s, t, delta, cfg)) / math.sqrt(var_s * var_t)


def classify_dependence(exponent: float) -> str:
    """
    ``"LRD"`` for a decay exponent in ``(0, 1)``, ``"SRD"`` in ``(1, 2)``,
    ``"unclassified"`` otherwise.
    """
    if 0 < exponent < 1:
        return "LRD"
    if 1 < exponent < 2:
        return "SRD"
    return "unclassified"


def fit_decay_exponent(points: t.Sequence[t.Tuple[float, float]]) -> DependenceFit:
    """
    Least-squares fit of ``log|corr|`` against ``log t``; the exponent is the
    negated slope.

    Parameters
    ---------
    points: :class:`list`
        ``(t, correlation magnitude)`` pairs

    Raises
    ------
    :exc:`.FitError`
        for fewer than three points, non-positive values or a single ``t``.
    """
    if len(points) < 3:
        raise FitError(f"need at least three points, got {len(points)}")
    data = np.asarray(points, dtype=float)
    times, values = data[:, 0], data[:, 1]
    if not (np.all(times > 0) and np.all(values > 0)):
        raise FitError("times and correlation magnitudes must be positive")
    if np.unique(times).size < 2:
        raise FitError("all points share one time")
    fit = stats.linregress(np.log(times), np.log(values))
    exponent = -float(fit.slope)
    return DependenceFit(
        exponent=exponent,
        intercept=float(fit.intercept),
        r_squared=min(1.0, float(fit.rvalue) ** 2),
        classification=classify_dependence(exponent),
    )


def decay_points(
    params: ProcessParams,
    s: float,
    ts: t.Sequence[float],
    mode: str = "fbp",
    delta: float = 1.0,
    cfg: MlConfig = DEFAULT_ML_CONFIG,
) -> t.List[t.Tuple[float, float]]:
    """
    ``(t, magnitude)`` pairs of :func:`asymptotic_correlation` (``mode="fbp"``)
    or :func:`fbn_correlation_magnitude` (``mode="fbn"``) over ``ts``.
    Every ``t`` must satisfy ``t >= 10 s``.
    """
    if mode not in DEPENDENCE_MODES:
        raise ParameterError(f"mode must be fbp or fbn, got {mode!r}", "mode")
    if not s > 0:
        raise ParameterError(f"s must be positive, got {s}", "s")
    short = [time for time in ts if time < 10 * s]
    if short:
        raise ParameterError(f"grid points {short} are below 10 s", "t_grid")
    if mode == "fbp":
        return [(float(time), asymptotic_correlation(params, s, time, cfg)) for time in ts]
    return [(float(time), fbn_correlation_magnitude(params, s, time, delta, cfg)) for time in ts]


def dependence_fit(
    params: ProcessParams,
    s: float,
    ts: t.Sequence[float],
    mode: str = "fbp",
    delta: float = 1.0,
    cfg: MlConfig = DEFAULT_ML_CONFIG,
) -> DependenceFit:
    fit = fit_decay_exponent(decay_points(params, s, ts, mode, delta, cfg))
    _LOG.info(f"{mode} decay exponent {fit.exponent:.4f} ({fit.classification}), r^2={fit.r_squared:.6f}")
    return fit


def covariance_row(params: ProcessParams, s: float, t: float, cfg: MlConfig = DEFAULT_ML_CONFIG) -> t.Dict[str, float]:
    """
    One row of the covariance grid export; ratio columns are ``nan`` where
    undefined (``s = 0`` or the classical order).
    """
    row = {"s": float(s), "t": float(t), "covariance": covariance(params, s, t, cfg)}
    row["correlation"] = correlation(params, s, t, cfg) if s > 0 else math.nan
    row["covariance_limit"] = covariance_limit(params, s, cfg)
    row["asymptotic_covariance"] = (
        asymptotic_covariance(params, s, t, cfg) if s > 0 and params.nu < 1 else math.nan
    )
    return row
