"""
Gillespie-type simulation of the classical and fractional binomial process.

The embedded jump chain is the same for both: in state ``n`` the total rate is
``r_n = lam (N - n) + mu n`` and the next jump is a birth with probability
``lam (N - n) / r_n``. Only the holding times differ (exponential for the
classical process, Mittag-Leffler for the fractional one).
"""
import logging
import math
import typing as t

import numpy as np
from scipy import stats

from .exceptions import EventCapExceeded, ParameterError, PathError
from .objects import ProcessParams, SamplePath
from .rng import (
    RngStream,
    ml_sojourn_from,
    ml_sojourns,
    one_sided_stables,
    sample_one_sided_stable,
    stable_from_uniforms,
)

_LOG = logging.getLogger("fracbinom.simulation")

EVENT_CAP = 10_000_000
MARGINAL_METHODS = ("path", "exact")
CROSS_SECTION_METHODS = ("path", "subordinated", "exact")
_BLOCK = 4096


class _UniformBuffer:
    # block reads from a stream; keeps the per-event cost off numpy call overhead
    def __init__(self, stream: RngStream) -> None:
        self._stream = stream
        self._block = np.empty(0)
        self._pos = 0

    def next(self) -> float:
        if self._pos >= len(self._block):
            self._block = self._stream.uniforms(_BLOCK)
            self._pos = 0
        value = self._block[self._pos]
        self._pos += 1
        return float(value)


def _sojourn(buffer: _UniformBuffer, nu: float, rate: float) -> float:
    xi = -math.log(buffer.next()) / rate
    if nu == 1.0:
        return xi
    v = float(stable_from_uniforms(buffer.next(), buffer.next(), nu))
    return float(ml_sojourn_from(xi, v, nu))


def _check_horizon(horizon: t.Optional[float], events: t.Optional[int]) -> None:
    if events is not None:
        if int(events) != events or events < 1:
            raise ParameterError(f"events must be a positive integer, got {events}", "events")
        return
    if horizon is None or not (horizon > 0 and math.isfinite(horizon)):
        raise ParameterError(f"horizon must be positive and finite, got {horizon}", "horizon")


def _simulate_path(
    params: ProcessParams,
    nu: float,
    horizon: t.Optional[float],
    stream: RngStream,
    events: t.Optional[int],
    max_events: int,
) -> SamplePath:
    _check_horizon(horizon, events)
    buffer = _UniformBuffer(stream)
    capacity, lam = params.capacity, params.lam
    end = math.inf if horizon is None else float(horizon)
    n = params.initial
    clock = 0.0
    times: t.List[float] = []
    populations: t.List[int] = []
    while events is None or len(times) < events:
        rate = params.event_rate(n)
        if rate <= 0:
            # frozen state
            break
        next_clock = clock + _sojourn(buffer, nu, rate)
        if next_clock <= clock:
            # sub-ulp holding time
            next_clock = float(np.nextafter(clock, math.inf))
        if next_clock > end:
            break
        if len(times) >= max_events:
            _LOG.warning(f"path truncated after {len(times)} events at t={clock}")
            raise EventCapExceeded(f"path exceeded {max_events} events", len(times), clock)
        clock = next_clock
        n += 1 if buffer.next() * rate < lam * (capacity - n) else -1
        times.append(clock)
        populations.append(n)
    return SamplePath(
        initial=params.initial,
        horizon=clock if horizon is None else end,
        times=np.asarray(times, dtype=float),
        populations=np.asarray(populations, dtype=np.int64),
    )


def simulate_binomial_path(
    params: ProcessParams,
    horizon: t.Optional[float],
    stream: RngStream,
    *,
    events: t.Optional[int] = None,
    max_events: int = EVENT_CAP,
) -> SamplePath:
    """
    Simulate the classical binomial process with exponential holding times.

    Parameters
    ---------
    params: :class:`ProcessParams`
        the process parameters; ``params.nu`` is ignored
    horizon: :class:`float`
        simulate on ``[0, horizon]``; may be ``None`` when ``events`` is given
    stream: :class:`RngStream`
        the path's random stream
    events: :class:`int`
        stop after this many jumps instead of at a horizon (if both are given,
        whichever comes first)
    max_events: :class:`int`
        truncation cap in horizon mode

    Raises
    ------
    :exc:`.EventCapExceeded`
        if more than ``max_events`` jumps happen before the horizon.
    """
    return _simulate_path(params, 1.0, horizon, stream, events, max_events)


def simulate_fbp_path(
    params: ProcessParams,
    horizon: t.Optional[float],
    stream: RngStream,
    *,
    events: t.Optional[int] = None,
    max_events: int = EVENT_CAP,
) -> SamplePath:
    """
    Simulate the fractional binomial process: the classical jump chain with
    Mittag-Leffler holding times ``xi ** (1/nu) * V``.

    With ``params.nu == 1`` the draws are the ones :func:`simulate_binomial_path`
    makes, so both return the same path for the same stream.
    """
    return _simulate_path(params, params.nu, horizon, stream, events, max_events)


def simulate_path_set(
    params: ProcessParams,
    count: int,
    seed: int,
    *,
    horizon: t.Optional[float] = None,
    events: t.Optional[int] = None,
) -> t.List[SamplePath]:
    """
    ``count`` independent FBP paths, path ``i`` drawn from ``RngStream(seed, i)``.
    """
    if int(count) != count or count < 1:
        raise ParameterError(f"path count must be a positive integer, got {count}", "paths")
    return [
        simulate_fbp_path(params, horizon, RngStream(seed, path_id), events=events)
        for path_id in range(count)
    ]


def _cross_section(
    params: ProcessParams,
    nu: float,
    horizons: np.ndarray,
    stream: RngStream,
    max_events: int,
) -> np.ndarray:
    capacity, lam, mu = params.capacity, params.lam, params.mu
    size = horizons.size
    populations = np.full(size, params.initial, dtype=np.int64)
    clocks = np.zeros(size)
    jumps = np.zeros(size, dtype=np.int64)
    active = horizons > 0
    while active.any():
        idx = np.flatnonzero(active)
        rates = lam * (capacity - populations[idx]) + mu * populations[idx]
        live = rates > 0
        active[idx[~live]] = False
        idx, rates = idx[live], rates[live]
        if not idx.size:
            break
        next_clocks = clocks[idx] + ml_sojourns(stream, nu, rates)
        finished = next_clocks > horizons[idx]
        active[idx[finished]] = False
        idx, rates, next_clocks = idx[~finished], rates[~finished], next_clocks[~finished]
        if not idx.size:
            break
        births = stream.uniforms(idx.size) * rates < lam * (capacity - populations[idx])
        populations[idx] += np.where(births, 1, -1)
        clocks[idx] = next_clocks
        jumps[idx] += 1
        if jumps[idx].max() > max_events:
            worst = int(idx[np.argmax(jumps[idx])])
            raise EventCapExceeded(
                f"cross-section path {worst} exceeded {max_events} events", int(jumps[worst]), float(clocks[worst])
            )
    return populations


def simulate_fbp_cross_section(
    params: ProcessParams, t: float, size: int, stream: RngStream, *, max_events: int = EVENT_CAP
) -> np.ndarray:
    """
    Populations at time ``t`` of ``size`` independent FBP paths, simulated
    side by side with the same jump chain and holding-time law as
    :func:`simulate_fbp_path`.
    """
    _check_time(t)
    return _cross_section(params, params.nu, np.full(int(size), float(t)), stream, max_events)


def simulate_binomial_cross_section(
    params: ProcessParams, t: float, size: int, stream: RngStream, *, max_events: int = EVENT_CAP
) -> np.ndarray:
    """
    Classical counterpart of :func:`simulate_fbp_cross_section`.
    """
    _check_time(t)
    return _cross_section(params, 1.0, np.full(int(size), float(t)), stream, max_events)


def _check_time(t: float) -> None:
    if not (t >= 0 and math.isfinite(t)):
        raise ParameterError(f"time must be non-negative and finite, got {t}", "t")


def _check_method(method: str, allowed: t.Tuple[str, ...]) -> None:
    if method not in allowed:
        raise ParameterError(f"method must be one of {', '.join(allowed)}, got {method!r}", "method")


def thinning_probabilities(params: ProcessParams, tau: np.ndarray) -> t.Tuple[np.ndarray, np.ndarray]:
    """
    Per-individual occupation probabilities of the classical process at time
    ``tau``: ``p1`` for slots occupied at time zero, ``p0`` for empty ones.
    """
    theta = np.exp(-params.total_rate * np.asarray(tau, dtype=float))
    xi = params.xi
    return xi + (1.0 - xi) * theta, xi * (1.0 - theta)


def sample_binomial_marginal(params: ProcessParams, t: float, stream: RngStream) -> int:
    """
    Exact draw of the classical population at time ``t``:
    ``Binomial(M, p1) + Binomial(N - M, p0)``.
    """
    _check_time(t)
    p1, p0 = thinning_probabilities(params, np.array([t]))
    occupied = stream.binomial(params.initial, p1)
    empty = stream.binomial(params.capacity - params.initial, p0)
    return int(occupied[0] + empty[0])


def _inverse_stable_clock(nu: float, t: float, stables: np.ndarray) -> np.ndarray:
    # E(t) = (t / V) ** nu in distribution
    return np.exp(nu * (math.log(t) - np.log(stables)))


def sample_fbp_marginal(params: ProcessParams, t: float, stream: RngStream, method: str = "path") -> int:
    """
    Draw ``N(E(t))``: the classical process run to the inverse-stable time
    ``tau = (t / V) ** nu``.

    Parameters
    ---------
    method: :class:`str`
        ``"path"`` runs :func:`simulate_binomial_path` to ``tau`` and returns the
        terminal state; ``"exact"`` samples the classical marginal at ``tau``
        with :func:`sample_binomial_marginal`
    """
    _check_time(t)
    _check_method(method, MARGINAL_METHODS)
    if t == 0:
        return params.initial
    tau = float(t) if params.nu == 1.0 else float(t / sample_one_sided_stable(stream, params.nu)) ** params.nu
    if method == "exact":
        return sample_binomial_marginal(params, tau, stream)
    return simulate_binomial_path(params, tau, stream).terminal


def sample_fbp_marginals(
    params: ProcessParams, t: float, size: int, stream: RngStream, method: str = "path"
) -> np.ndarray:
    """
    Vectorised cross-section at time ``t``.

    ``method`` is ``"path"`` (:func:`simulate_fbp_cross_section`),
    ``"subordinated"`` (classical paths run to the inverse-stable clock) or
    ``"exact"`` (inverse-stable clock plus the binomial thinning marginal).
    """
    _check_time(t)
    _check_method(method, CROSS_SECTION_METHODS)
    size = int(size)
    if size < 1:
        raise ParameterError(f"sample size must be positive, got {size}", "J")
    if method == "path":
        return simulate_fbp_cross_section(params, t, size, stream)
    if t == 0:
        return np.full(size, params.initial, dtype=np.int64)
    if params.nu == 1.0:
        clocks = np.full(size, float(t))
    else:
        clocks = _inverse_stable_clock(params.nu, t, one_sided_stables(stream, params.nu, size))
    if method == "subordinated":
        return _cross_section(params, 1.0, clocks, stream, EVENT_CAP)
    p1, p0 = thinning_probabilities(params, clocks)
    return stream.binomial(params.initial, p1) + stream.binomial(params.capacity - params.initial, p0)


def path_value_at(path: SamplePath, t: float) -> int:
    """
    Right-continuous evaluation: the population entered at the last jump at or
    before ``t``, or the initial population before the first jump.

    Raises
    ------
    :exc:`.PathError`
        if ``t`` lies outside ``[0, horizon]``.
    """
    if not 0 <= t <= path.horizon:
        raise PathError(f"time {t} outside [0, {path.horizon}]", t)
    position = int(np.searchsorted(path.times, t, side="right"))
    return path.initial if position == 0 else int(path.populations[position - 1])


def stationary_pmf(params: ProcessParams) -> np.ndarray:
    """
    Stationary law ``Binomial(N, xi)`` over ``0..N``.
    """
    return stats.binom.pmf(np.arange(params.capacity + 1), params.capacity, params.xi)


def empirical_covariance(paths: t.Sequence[SamplePath], s: float, t: float) -> float:
    """
    Sample covariance of the path values at ``s`` and ``t`` across ``paths``.
    """
    if len(paths) < 2:
        raise ParameterError("empirical covariance needs at least two paths", "paths")
    if s > t:
        raise ParameterError(f"s must not exceed t, got s={s}, t={t}", "s")
    at_s = np.array([path_value_at(path, s) for path in paths], dtype=float)
    at_t = np.array([path_value_at(path, t) for path in paths], dtype=float)
    return float(np.cov(at_s, at_t)[0, 1])

