from dataclasses import dataclass, field, fields, asdict
from inspect import signature
import math
import typing as t

import numpy as np

from .exceptions import ParameterError, ConfigError


class BaseObject:
    @classmethod
    def from_kwargs(cls, **kwargs):
        """
        Build the object from a mapping of field names, such as a parsed
        config file.

        Raises
        ------
        :exc:`.ConfigError`
            for keys that name no field.
        """
        known = set(signature(cls).parameters)
        for key in kwargs:
            if key not in known:
                raise ConfigError(f"unknown {cls.__name__} key {key!r}", key)
        return cls(**kwargs)

    def to_dict(self) -> t.Dict[str, t.Any]:
        return asdict(self)


@dataclass(frozen=True)
class MlConfig(BaseObject):
    """
    Numerical policy for the Mittag-Leffler function.

    Parameters
    ----------
    series_tolerance: :class:`float`
        relative tolerance of the Taylor series and of the asymptotic series
    asymptotic_crossover: :class:`float` | ``None``
        threshold on ``|z|`` beyond which negative arguments use the asymptotic
        expansion; ``None`` picks ``min(5 * (1 + 1/nu), 200 ** nu)``
    max_terms: :class:`int`
        cap on the number of terms summed in either regime
    fallback_tolerance: :class:`float`
        largest relative truncation bound accepted from the asymptotic series
        before switching to quadrature
    """
    series_tolerance: float = 1e-12
    asymptotic_crossover: t.Optional[float] = None
    max_terms: int = 20000
    fallback_tolerance: float = 1e-7

    def __post_init__(self) -> None:
        if not self.series_tolerance > 0:
            raise ParameterError("series_tolerance must be positive", "series_tolerance")
        if self.max_terms < 1:
            raise ParameterError("max_terms must be at least 1", "max_terms")
        if self.asymptotic_crossover is not None and not self.asymptotic_crossover > 0:
            raise ParameterError("asymptotic_crossover must be positive", "asymptotic_crossover")
        if not self.fallback_tolerance > 0:
            raise ParameterError("fallback_tolerance must be positive", "fallback_tolerance")

    def crossover(self, nu: float) -> float:
        """
        Crossover on ``|z|`` for order ``nu``.
        """
        if self.asymptotic_crossover is not None:
            return self.asymptotic_crossover
        return min(5.0 * (1.0 + 1.0 / nu), 200.0 ** nu)


@dataclass(frozen=True)
class SojournSample(BaseObject):
    """
    A holding time in one state.
    """
    duration: float

    def __post_init__(self) -> None:
        if not (self.duration > 0 and math.isfinite(self.duration)):
            raise ParameterError(f"sojourn must be positive and finite, got {self.duration}", "duration")


@dataclass(frozen=True)
class ProcessParams(BaseObject):
    """
    Parameters of the (fractional) binomial process.

    Parameters
    ----------
    lam: :class:`float`
        birth rate per free capacity slot
    mu: :class:`float`
        death rate per individual
    nu: :class:`float`
        fractional order in ``(0, 1]``; ``1`` is the classical process
    capacity: :class:`int`
        the maximum population ``N``
    initial: :class:`int`
        the initial population ``M``, ``1 <= M <= N``

    Zero rates are accepted on one side so that the frozen-path edge
    cases can be simulated; ``lam + mu`` must stay positive.
    """
    lam: float
    mu: float
    nu: float
    capacity: int
    initial: int

    def __post_init__(self) -> None:
        for name in ("lam", "mu", "nu"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ParameterError(f"{name} must be finite, got {value}", name)
        if self.lam < 0 or self.mu < 0:
            raise ParameterError("rates must be non-negative", "lam" if self.lam < 0 else "mu")
        if self.lam + self.mu <= 0:
            raise ParameterError("lam + mu must be positive", "lam")
        if not 0 < self.nu <= 1:
            raise ParameterError(f"nu must lie in (0, 1], got {self.nu}", "nu")
        if int(self.capacity) != self.capacity or self.capacity < 1:
            raise ParameterError(f"capacity must be a positive integer, got {self.capacity}", "capacity")
        if int(self.initial) != self.initial or not 1 <= self.initial <= self.capacity:
            raise ParameterError(f"initial must satisfy 1 <= M <= N, got {self.initial}", "initial")
        object.__setattr__(self, "capacity", int(self.capacity))
        object.__setattr__(self, "initial", int(self.initial))

    @property
    def total_rate(self) -> float:
        """
        ``lam + mu``.
        """
        return self.lam + self.mu

    @property
    def xi(self) -> float:
        """
        Stationary occupation probability ``lam / (lam + mu)``.
        """
        return self.lam / (self.lam + self.mu)

    @property
    def stationary_mean(self) -> float:
        return self.capacity * self.xi

    @property
    def stationary_variance(self) -> float:
        return self.capacity * self.xi * (1.0 - self.xi)

    def event_rate(self, n: int) -> float:
        """
        Total jump rate ``lam (N - n) + mu n`` in state ``n``.
        """
        return self.lam * (self.capacity - n) + self.mu * n

    def with_(self, **changes: t.Any) -> "ProcessParams":
        values = {f.name: getattr(self, f.name) for f in fields(self)}
        values.update(changes)
        return ProcessParams(**values)


@dataclass
class SamplePath(BaseObject):
    """
    A right-continuous step function produced by a simulator.

    ``times[k]`` is the epoch of the ``k``-th jump and ``populations[k]`` the
    state entered there; the implicit first point is ``(0, initial)``.
    """
    initial: int
    horizon: float
    times: np.ndarray
    populations: np.ndarray

    @property
    def terminal(self) -> int:
        """
        Population at the horizon.
        """
        return int(self.populations[-1]) if len(self.populations) else self.initial

    def sojourns(self) -> np.ndarray:
        """
        Completed holding times (the censored last one is excluded).
        """
        return np.diff(np.concatenate(([0.0], np.asarray(self.times, dtype=float))))

    def __len__(self) -> int:
        return len(self.times)


@dataclass(frozen=True)
class MomentPoint(BaseObject):
    t: float
    mean: float
    variance: float
    second_moment: float


@dataclass(frozen=True)
class DependenceFit(BaseObject):
    """
    Least-squares power-law fit ``|corr| ~ exp(intercept) * t ** -exponent``.
    """
    exponent: float
    intercept: float
    r_squared: float
    classification: str = "unclassified"


@dataclass(frozen=True)
class MomentSummary(BaseObject):
    """
    Sample moments of a cross-section observed at ``observation_time``.
    """
    m1: float
    m2: float
    sample_size: int
    observation_time: float

    def __post_init__(self) -> None:
        if self.sample_size < 2:
            raise ParameterError("a moment summary needs at least two observations", "sample_size")
        if self.m2 < self.m1 ** 2 - 1e-9 * max(1.0, self.m2):
            raise ParameterError("m2 must be at least m1 ** 2", "m2")


@dataclass(frozen=True)
class EstimateResult(BaseObject):
    lambda_hat: float
    nu_hat: float
    residual_norm: float
    iterations: int
    converged: bool


@dataclass(frozen=True)
class ReplicateRecord(BaseObject):
    """
    One row of the per-replicate study log.
    """
    replicate: int
    lambda_hat: float
    nu_hat: float
    residual: float
    converged: bool


@dataclass(frozen=True)
class ParameterStats(BaseObject):
    """
    Dispersion of one parameter's estimates across converged replicates.
    """
    mean: float
    mad: float
    mse: float
    bias_pct: float
    cv: float


@dataclass
class McStudyReport(BaseObject):
    true_params: ProcessParams
    J: int
    K: int
    T: float
    seed: int
    lambda_stats: ParameterStats
    nu_stats: ParameterStats
    failures: int
    replicates: t.List[ReplicateRecord] = field(default_factory=list)

    def to_dict(self) -> t.Dict[str, t.Any]:
        return {
            "true_params": self.true_params.to_dict(),
            "J": self.J,
            "K": self.K,
            "T": self.T,
            "seed": self.seed,
            "lambda": self.lambda_stats.to_dict(),
            "nu": self.nu_stats.to_dict(),
            "failures": self.failures,
        }


@dataclass
class RunConfig(BaseObject):
    """
    Fully-resolved command configuration; keys mirror the CLI flag names.
    """
    command: str
    lam: t.Optional[float] = None
    mu: t.Optional[float] = None
    nu: t.Optional[float] = None
    N: t.Optional[int] = None
    M: t.Optional[int] = None
    horizon: t.Optional[float] = None
    events: t.Optional[int] = None
    paths: int = 5
    t_grid: t.Optional[str] = None
    s: t.Optional[float] = None
    delta: float = 1.0
    J: int = 500
    K: int = 100
    T: t.Optional[float] = None
    seed: int = 0
    threads: int = 1
    out: t.Optional[str] = None
    format: str = "csv"
    method: str = "path"
    tolerance: t.Optional[float] = None
    input: t.Optional[str] = None
    mode: str = "fbp"
    lambda_min: float = 1e-3
    lambda_max: float = 5.0
    figure: t.Optional[str] = None

    def process_params(self) -> ProcessParams:
        missing = [name for name in ("lam", "mu", "nu", "N", "M") if getattr(self, name) is None]
        if missing:
            raise ConfigError(f"missing process parameters: {', '.join(missing)}", missing[0])
        return ProcessParams(lam=self.lam, mu=self.mu, nu=self.nu, capacity=self.N, initial=self.M)
