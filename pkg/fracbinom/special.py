"""
Mittag-Leffler function ``E_nu(z) = sum_r z**r / Gamma(nu r + 1)`` on the real line.

Negative arguments go through one of three evaluators:

* the Taylor series, in double precision while ``|z| ** (1/nu)`` is small
  enough that cancellation costs at most two digits, otherwise in mpmath with
  the working precision raised by the number of digits the alternating sum
  cancels;
* the inverse-power asymptotic series, truncated at its smallest term, beyond
  :meth:`MlConfig.crossover`; orders within ``NEAR_ONE_GAP`` of one keep the
  mpmath series there while it stays short;
* the completely monotone integral representation, integrated with
  :func:`scipy.integrate.quad` on panels split around its peak at ``w = x``,
  where the series would need too many terms or the asymptotic truncation
  bound is too loose. A quadrature whose error estimate is too large falls
  back to the mpmath series.
"""
import functools
import logging
import math
import typing as t
import warnings

import mpmath
from scipy import integrate, special

from .exceptions import MittagLefflerError, ParameterError
from .objects import MlConfig

_LOG = logging.getLogger("fracbinom.special")

DEFAULT_ML_CONFIG = MlConfig()

# |z| ** (1/nu) up to which plain double-precision summation loses < 2 digits
FLOAT_SERIES_LIMIT = 2.0 * math.log(10.0)
# beyond this many terms before the peak the series is replaced by quadrature
SERIES_PEAK_BUDGET = 1000.0
# exp(-745) underflows
_EXP_CUTOFF = 745.0
OVERFLOW_EXPONENT = 700.0
# relative quadrature error estimate accepted before switching to the series
QUAD_TOLERANCE = 1e-9
# orders with 1 - nu below this use the series wherever its length allows
NEAR_ONE_GAP = 1e-3


def _validate_order(nu: float, *, allow_one: bool = True) -> None:
    if not math.isfinite(nu):
        raise ParameterError(f"order must be finite, got {nu}", "nu")
    upper_ok = nu <= 1 if allow_one else nu < 1
    if not (nu > 0 and upper_ok):
        bounds = "(0, 1]" if allow_one else "(0, 1)"
        raise ParameterError(f"order must lie in {bounds}, got {nu}", "nu")


def leading_coefficient(nu: float) -> float:
    """
    The leading asymptotic coefficient ``a0(nu) = pi / Gamma(1 - nu)``.

    With this normalisation ``a0(nu) / (pi x)`` is the standard leading term
    ``1 / (Gamma(1 - nu) x)`` of ``E_nu(-x)``.
    """
    _validate_order(nu, allow_one=False)
    return math.pi * float(special.rgamma(1.0 - nu))


def ml_leading_asymptotic(nu: float, x: float) -> float:
    """
    Leading term ``a0(nu) / (pi x)`` of the large-``x`` expansion of ``E_nu(-x)``.

    Parameters
    ----------
    nu: :class:`float`
        order in ``(0, 1)``
    x: :class:`float`
        positive argument

    Raises
    ------
    :exc:`.ParameterError`
        if ``x <= 0`` or ``nu`` is outside ``(0, 1)``.
    """
    _validate_order(nu, allow_one=False)
    if not (math.isfinite(x) and x > 0):
        raise ParameterError(f"x must be positive and finite, got {x}", "x")
    return leading_coefficient(nu) / (math.pi * x)


def ml_asymptotic_expansion(nu: float, x: float, cfg: MlConfig = DEFAULT_ML_CONFIG) -> t.Tuple[float, float]:
    """
    Sum the inverse-power expansion
    ``E_nu(-x) ~ sum_k (-1)**(k+1) x**-k / Gamma(1 - nu k)`` up to its smallest term.

    Returns
    -------
    :class:`tuple`
        ``(value, bound)`` where ``bound`` is an absolute truncation-error bound:
        the first omitted term magnitude ``Gamma(nu k) / (pi x**k)`` divided by
        ``sin(nu pi)`` when ``nu >= 1/2``.
    """
    _validate_order(nu, allow_one=False)
    if not (math.isfinite(x) and x > 0):
        raise ParameterError(f"x must be positive and finite, got {x}", "x")
    spread = math.sin(nu * math.pi) if nu >= 0.5 else 1.0
    log_x = math.log(x)
    total = 0.0
    previous = math.inf
    bound = math.inf
    for k in range(1, cfg.max_terms + 1):
        magnitude = math.exp(math.lgamma(nu * k) - k * log_x) / math.pi
        if total != 0.0 and magnitude / spread <= cfg.series_tolerance * abs(total):
            bound = magnitude / spread
            break
        if magnitude > previous:
            # divergent tail starts here; optimal truncation
            bound = magnitude / spread
            break
        sign = 1.0 if k % 2 else -1.0
        total += sign * magnitude * math.sin(k * nu * math.pi)
        previous = magnitude
    else:
        bound = previous / spread
    return total, bound


def _float_series(nu: float, z: float, cfg: MlConfig) -> float:
    if z == 0.0:
        return 1.0
    log_abs = math.log(abs(z))
    negative = z < 0
    peak = abs(z) ** (1.0 / nu) / nu
    total = 0.0
    for r in range(cfg.max_terms):
        magnitude = math.exp(r * log_abs - math.lgamma(nu * r + 1.0))
        total += -magnitude if (negative and r % 2) else magnitude
        if r > peak and magnitude <= cfg.series_tolerance * abs(total):
            return total
    raise MittagLefflerError(
        f"series for E_{nu}({z}) did not converge within {cfg.max_terms} terms", cfg.max_terms
    )


def _mp_series(nu: float, z: float, cfg: MlConfig) -> float:
    lost_digits = abs(z) ** (1.0 / nu) / math.log(10.0)
    peak = abs(z) ** (1.0 / nu) / nu
    with mpmath.workdps(int(25 + lost_digits)):
        argument = mpmath.mpf(z)
        total = mpmath.mpf(0)
        power = mpmath.mpf(1)
        mp_nu = mpmath.mpf(nu)
        tolerance = mpmath.mpf(cfg.series_tolerance) / 100
        for r in range(cfg.max_terms):
            term = power * mpmath.rgamma(mp_nu * r + 1)
            total += term
            if r > peak and abs(term) <= tolerance * abs(total):
                return float(total)
            power *= argument
    raise MittagLefflerError(
        f"series for E_{nu}({z}) did not converge within {cfg.max_terms} terms", cfg.max_terms
    )


def ml_series(nu: float, z: float, cfg: MlConfig = DEFAULT_ML_CONFIG) -> float:
    """
    Taylor series of ``E_nu(z)`` with precision chosen from the cancellation size.

    Raises
    ------
    :exc:`.MittagLefflerError`
        if the series does not converge within ``cfg.max_terms`` terms.
    """
    _validate_order(nu)
    if z >= 0 or abs(z) ** (1.0 / nu) <= FLOAT_SERIES_LIMIT:
        return _float_series(nu, z, cfg)
    return _mp_series(nu, z, cfg)


def _peak_breaks(x: float, width: float, upper: float) -> t.List[float]:
    # decade ladder around the Lorentzian peak at w = x so that no quad
    # panel is wider than ten peak widths near it
    offsets = []
    step = width
    while step < x:
        offsets.append(step)
        step *= 10.0
    left = [x - offset for offset in reversed(offsets)]
    right = [x + offset for offset in offsets if x + offset < upper]
    return [0.0, *left, x, *right, upper]


def ml_integral(nu: float, x: float, cfg: MlConfig = DEFAULT_ML_CONFIG) -> float:
    """
    ``E_nu(-x)`` from the completely monotone representation

    ``E_nu(-x) = sin(nu pi) / (pi nu) * int_0^inf exp(-w**(1/nu)) x / (w**2 + 2 w x cos(nu pi) + x**2) dw``

    valid for ``0 < nu < 1`` and ``x > 0``.

    For orders close to one the integrand is a peak of relative width
    ``~ pi (1 - nu)`` at ``w = x``; the range is split on a ladder around it.
    If the quadrature error estimate still exceeds ``QUAD_TOLERANCE`` of the
    value, the mpmath series is used instead.

    Raises
    ------
    :exc:`.MittagLefflerError`
        if the quadrature is inaccurate and the series would need more than
        ``cfg.max_terms`` terms.
    """
    _validate_order(nu, allow_one=False)
    if x == 0:
        return 1.0
    # sin(nu pi) and cos(nu pi / 2) through 1 - nu, exact near nu -> 1
    rest = 1.0 - nu
    gap = 2.0 * math.sin(0.5 * rest * math.pi) ** 2
    inv = 1.0 / nu

    def integrand(w: float) -> float:
        return math.exp(-w ** inv) * x / ((w - x) ** 2 + 2.0 * w * x * gap)

    upper = _EXP_CUTOFF ** nu
    if x < upper:
        breaks = _peak_breaks(x, x * math.sqrt(2.0 * gap), upper)
    else:
        breaks = [0.0, upper]
    total = error = 0.0
    with warnings.catch_warnings():
        # accuracy is judged from the returned error estimates
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        for start, stop in zip(breaks, breaks[1:]):
            part, part_error = integrate.quad(integrand, start, stop, epsabs=0.0, epsrel=1e-13, limit=400)
            total += part
            error += part_error
    if not error <= QUAD_TOLERANCE * abs(total):
        if inv * math.log(x) - math.log(nu) > math.log(cfg.max_terms):
            raise MittagLefflerError(
                f"quadrature for E_{nu}(-{x}) has error {error:.1e} on {total:.3e} "
                f"and the series would need more than {cfg.max_terms} terms",
                cfg.max_terms,
            )
        _LOG.warning(f"E_{nu}(-{x}): quadrature error {error:.3e} on {total:.3e}, using the mpmath series")
        return _mp_series(nu, -x, cfg)
    return math.sin(rest * math.pi) / (math.pi * nu) * total


@functools.lru_cache(maxsize=65536)
def _mittag_leffler(nu: float, z: float, cfg: MlConfig) -> float:
    if z == 0.0:
        return 1.0
    if nu == 1.0:
        return math.exp(z)
    if z > 0:
        if math.log(z) / nu > math.log(OVERFLOW_EXPONENT):
            raise MittagLefflerError(f"E_{nu}({z}) overflows")
        return _float_series(nu, z, cfg)
    x = -z
    # log of |z| ** (1/nu) / nu, the index of the largest series term
    log_peak = math.log(x) / nu - math.log(nu)
    if x <= cfg.crossover(nu):
        if x ** (1.0 / nu) <= FLOAT_SERIES_LIMIT:
            return _float_series(nu, z, cfg)
        if log_peak <= math.log(SERIES_PEAK_BUDGET):
            return _mp_series(nu, z, cfg)
        _LOG.debug(f"E_{nu}({z}): series too long, using quadrature")
        return ml_integral(nu, x, cfg)
    if 1.0 - nu < NEAR_ONE_GAP and log_peak <= math.log(SERIES_PEAK_BUDGET):
        # orders next to one
        return _mp_series(nu, z, cfg)
    value, bound = ml_asymptotic_expansion(nu, x, cfg)
    if value > 0 and bound <= cfg.fallback_tolerance * value:
        return value
    _LOG.debug(f"E_{nu}({z}): asymptotic bound {bound:.3e} too loose, using quadrature")
    return ml_integral(nu, x, cfg)


def mittag_leffler(nu: float, z: float, cfg: MlConfig = DEFAULT_ML_CONFIG) -> float:
    """
    Evaluate the one-parameter Mittag-Leffler function ``E_nu(z)``.

    Parameters
    ----------
    nu: :class:`float`
        order in ``(0, 1]``
    z: :class:`float`
        real argument; negative arguments are the ones the process formulas use
    cfg: :class:`MlConfig`
        numerical policy

    Raises
    ------
    :exc:`.ParameterError`
        for non-finite input or an order outside ``(0, 1]``.
    :exc:`.MittagLefflerError`
        if the series does not converge within ``cfg.max_terms`` terms or
        the value would overflow.
    """
    if not math.isfinite(z):
        raise ParameterError(f"argument must be finite, got {z}", "z")
    _validate_order(nu)
    return _mittag_leffler(float(nu), float(z), cfg)
