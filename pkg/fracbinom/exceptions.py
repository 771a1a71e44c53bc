import typing as t


class FracbinomError(Exception):
    """
    Base error for the package.

    Parameters
    ----------
    message: :class:`str`
        the error message
    """
    def __init__(self, message: str) -> None:
        super().__init__(message)
        self._message = message

    @property
    def message(self) -> str:
        """
        A error message.
        """
        return self._message


class ParameterError(FracbinomError):
    """
    A error for invalid model or operation parameters.

    Parameters
    ----------
    message: :class:`str`
        the error message
    name: :class:`str`
        the offending parameter name
    """
    def __init__(self, message: str, name: t.Optional[str] = None) -> None:
        super().__init__(message)
        self._name = name

    @property
    def name(self) -> t.Optional[str]:
        """
        The parameter name.
        """
        return self._name


class MittagLefflerError(FracbinomError):
    """
    A error for Mittag-Leffler evaluation failures.

    Parameters
    ----------
    message: :class:`str`
        the error message
    terms: :class:`int`
        number of series terms summed before giving up
    """
    def __init__(self, message: str, terms: t.Optional[int] = None) -> None:
        super().__init__(message)
        self._terms = terms

    @property
    def terms(self) -> t.Optional[int]:
        """
        Terms summed.
        """
        return self._terms


class PathError(FracbinomError):
    """
    A error for sample path evaluation.

    Parameters
    ----------
    message: :class:`str`
        the error message
    time: :class:`float`
        the requested time
    """
    def __init__(self, message: str, time: t.Optional[float] = None) -> None:
        super().__init__(message)
        self._time = time

    @property
    def time(self) -> t.Optional[float]:
        """
        The requested time.
        """
        return self._time


class EventCapExceeded(PathError):
    """
    A error raised when a simulated path hits the event cap.

    Parameters
    ----------
    message: :class:`str`
        the error message
    events: :class:`int`
        number of events simulated
    time: :class:`float`
        simulation clock when the cap was hit
    """
    def __init__(self, message: str, events: int, time: t.Optional[float] = None) -> None:
        super().__init__(message, time)
        self._events = events

    @property
    def events(self) -> int:
        """
        Events simulated before truncation.
        """
        return self._events


class FormulaError(FracbinomError):
    """
    A error for closed-form evaluations that leave their valid range,
    e.g. a variance more negative than roundoff allows.
    """


class FitError(FracbinomError):
    """
    A error for degenerate dependence-exponent fits.
    """


class ConvergenceError(FracbinomError):
    """
    A error for a moment-equation solve that did not converge.

    Parameters
    ----------
    message: :class:`str`
        the error message
    residual: :class:`float`
        the best residual norm found
    """
    def __init__(self, message: str, residual: t.Optional[float] = None) -> None:
        super().__init__(message)
        self._residual = residual

    @property
    def residual(self) -> t.Optional[float]:
        """
        Best residual norm.
        """
        return self._residual


class StudyError(FracbinomError):
    """
    A error for a Monte Carlo study with too many failed replicates.

    Parameters
    ----------
    message: :class:`str`
        the error message
    failures: :class:`int`
        non-converged replicates
    replicates: :class:`int`
        replicates attempted
    """
    def __init__(self, message: str, failures: int, replicates: int) -> None:
        super().__init__(message)
        self._failures = failures
        self._replicates = replicates

    @property
    def failures(self) -> int:
        """
        Non-converged replicates.
        """
        return self._failures

    @property
    def replicates(self) -> int:
        """
        Replicates attempted.
        """
        return self._replicates


class ConfigError(FracbinomError):
    """
    A error for run configuration problems.

    Parameters
    ----------
    message: :class:`str`
        the error message
    key: :class:`str`
        the offending config key
    """
    def __init__(self, message: str, key: t.Optional[str] = None) -> None:
        super().__init__(message)
        self._key = key

    @property
    def key(self) -> t.Optional[str]:
        """
        The config key.
        """
        return self._key


class SampleFileError(FracbinomError):
    """
    A error for unreadable or malformed sample files.

    Parameters
    ----------
    message: :class:`str`
        the error message
    path: :class:`str`
        the file path
    line: :class:`int`
        1-based line number of the malformed record, if known
    """
    def __init__(self, message: str, path: str, line: t.Optional[int] = None) -> None:
        super().__init__(message)
        self._path = path
        self._line = line

    @property
    def path(self) -> str:
        """
        The file path.
        """
        return self._path

    @property
    def line(self) -> t.Optional[int]:
        """
        The line number.
        """
        return self._line

    def __str__(self) -> str:
        where = f"{self._path}:{self._line}" if self._line is not None else self._path
        return f"{where}: {self._message}"
