import logging
import math
import typing as t

import numpy as np

from .exceptions import ParameterError
from .objects import SojournSample

_LOG = logging.getLogger("fracbinom.rng")

ArrayLike = t.Union[float, np.ndarray]


class RngStream:
    """
    A reproducible random stream owned by one path or replicate.

    The generator is a PCG64 seeded from ``SeedSequence(master_seed, spawn_key=(stream_id,))``
    so that the draws of a stream depend only on ``(master_seed, stream_id)``.

    Parameters
    ---------
    master_seed: :class:`int`
        the run seed
    stream_id: :class:`int`
        the stream index, one per path or replicate
    """
    def __init__(self, master_seed: int, stream_id: int = 0) -> None:
        if master_seed < 0 or stream_id < 0:
            raise ParameterError("seeds and stream ids must be non-negative", "seed")
        self._master_seed = int(master_seed)
        self._stream_id = int(stream_id)
        sequence = np.random.SeedSequence(self._master_seed, spawn_key=(self._stream_id,))
        self._generator = np.random.Generator(np.random.PCG64(sequence))
        self._counter = 0

    @property
    def master_seed(self) -> int:
        """
        The run seed.
        """
        return self._master_seed

    @property
    def stream_id(self) -> int:
        """
        The stream index.
        """
        return self._stream_id

    @property
    def counter(self) -> int:
        """
        Number of variates drawn so far.
        """
        return self._counter

    def uniforms(self, size: int) -> np.ndarray:
        """
        Draw ``size`` uniforms on the open interval ``(0, 1)``.
        """
        values = self._generator.random(size)
        zeros = values == 0.0
        while zeros.any():
            values[zeros] = self._generator.random(int(zeros.sum()))
            zeros = values == 0.0
        self._counter += size
        return values

    def binomial(self, n: np.ndarray, p: np.ndarray) -> np.ndarray:
        draws = self._generator.binomial(n, p)
        self._counter += int(np.size(draws))
        return draws

    def __repr__(self) -> str:
        return f"RngStream(master_seed={self._master_seed}, stream_id={self._stream_id}, counter={self._counter})"


def _check_rate(rate: ArrayLike) -> None:
    if not np.all(np.asarray(rate) > 0):
        raise ParameterError(f"rate must be positive, got {rate}", "rate")


def _check_stable_order(nu: float) -> None:
    if not 0 < nu < 1:
        raise ParameterError(f"stable order must lie in (0, 1), got {nu}", "nu")


def exponential_from_uniform(u: ArrayLike, rate: ArrayLike) -> ArrayLike:
    """
    Inverse-CDF exponential ``-ln(u) / rate``.
    """
    return -np.log(u) / rate


def stable_from_uniforms(u: ArrayLike, w: ArrayLike, nu: float) -> ArrayLike:
    """
    Kanter's representation of a one-sided stable variate with Laplace
    transform ``exp(-s ** nu)``:

    ``sin(nu pi u) sin((1-nu) pi u) ** (1/nu - 1) / (sin(pi u) ** (1/nu) |ln w| ** (1/nu - 1))``

    Evaluated in logs; ``u`` and ``w`` are independent uniforms on ``(0, 1)``.
    """
    tail = (1.0 - nu) / nu
    log_value = (
        np.log(np.sin(nu * math.pi * u))
        + tail * np.log(np.sin((1.0 - nu) * math.pi * u))
        - np.log(np.sin(math.pi * u)) / nu
        - tail * np.log(-np.log(w))
    )
    return np.exp(log_value)


def ml_sojourn_from(xi: ArrayLike, v: ArrayLike, nu: float) -> ArrayLike:
    """
    ``xi ** (1/nu) * v``: a Mittag-Leffler holding time from an exponential
    ``xi`` and an independent one-sided stable ``v``.
    """
    return np.exp(np.log(xi) / nu + np.log(v))


def sample_uniform(stream: RngStream) -> float:
    """
    One uniform on ``(0, 1)``.
    """
    return float(stream.uniforms(1)[0])


def sample_exponential(stream: RngStream, rate: float) -> float:
    """
    Exponential holding time with the given rate.

    Raises
    ------
    :exc:`.ParameterError`
        if ``rate <= 0``.
    """
    _check_rate(rate)
    return float(exponential_from_uniform(sample_uniform(stream), rate))


def sample_one_sided_stable(stream: RngStream, nu: float) -> float:
    """
    One-sided ``nu``-stable variate ``V`` with ``E[exp(-s V)] = exp(-s ** nu)``.

    Parameters
    ---------
    stream: :class:`RngStream`
        the random stream
    nu: :class:`float`
        stability index in ``(0, 1)``; ``nu = 1`` is the degenerate ``V = 1``
        and is handled by the callers
    """
    _check_stable_order(nu)
    u, w = stream.uniforms(2)
    return float(stable_from_uniforms(u, w, nu))


def one_sided_stables(stream: RngStream, nu: float, size: int) -> np.ndarray:
    _check_stable_order(nu)
    draws = stream.uniforms(2 * size)
    return stable_from_uniforms(draws[:size], draws[size:], nu)


def sample_ml_sojourn(stream: RngStream, nu: float, rate: float) -> SojournSample:
    """
    Holding time ``S`` with survival ``P(S >= t) = E_nu(-rate t ** nu)``.

    For ``nu = 1`` this is exactly :func:`sample_exponential`.
    """
    if not 0 < nu <= 1:
        raise ParameterError(f"nu must lie in (0, 1], got {nu}", "nu")
    _check_rate(rate)
    if nu == 1.0:
        return SojournSample(sample_exponential(stream, rate))
    xi = sample_exponential(stream, rate)
    v = sample_one_sided_stable(stream, nu)
    return SojournSample(float(ml_sojourn_from(xi, v, nu)))


def ml_sojourns(stream: RngStream, nu: float, rates: np.ndarray) -> np.ndarray:
    """
    Vectorised :func:`sample_ml_sojourn`, one holding time per entry of ``rates``.
    """
    rates = np.asarray(rates, dtype=float)
    _check_rate(rates)
    size = rates.size
    xi = exponential_from_uniform(stream.uniforms(size), rates)
    if nu == 1.0:
        return xi
    return ml_sojourn_from(xi, one_sided_stables(stream, nu, size), nu)
