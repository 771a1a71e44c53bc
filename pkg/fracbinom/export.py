import csv
import io
import json
import logging
import math
import sys
import typing as t

from . import schemas
from .exceptions import SampleFileError
from .objects import MomentPoint, ReplicateRecord, RunConfig, SamplePath
from .utils import format_float

_LOG = logging.getLogger("fracbinom.export")


def _cell(value: t.Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format_float(value)
    return str(value)


class ResultWriter:
    """
    The class writes command results to a file or to stdout.

    Parameters
    ---------
    out: :class:`str`
        output path; ``None`` writes to stdout
    config: :class:`RunConfig`
        the resolved run configuration, written to ``<out>.config.json``
        beside every output file
    """
    def __init__(self, out: t.Optional[str] = None, config: t.Optional[RunConfig] = None) -> None:
        self.out = out
        self.config = config

    def _emit(self, text: str, target: t.Optional[str]) -> None:
        if target is None:
            sys.stdout.write(text)
            return
        with open(target, "w", newline="", encoding="utf-8") as handle:
            handle.write(text)
        _LOG.info(f"wrote {target}")

    def write_config(self, target: str) -> None:
        if self.config is None:
            return
        self._emit(json.dumps(self.config.to_dict(), indent=2, sort_keys=True) + "\n", target + schemas.CONFIG_SUFFIX)

    def write(self, columns: t.Sequence[str], rows: t.Iterable[t.Sequence[t.Any]], target: t.Optional[str] = None) -> None:
        """
        Write a CSV table with one header line.

        Parameters
        ---------
        columns: :class:`tuple`
            the header, one of the :mod:`schemas` column sets
        rows: :class:`list`
            the records
        target: :class:`str`
            overrides :attr:`out`
        """
        target = target or self.out
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_cell(value) for value in row])
        self._emit(buffer.getvalue(), target)
        if target is not None:
            self.write_config(target)

    def write_json(self, data: t.Dict[str, t.Any], target: t.Optional[str] = None) -> None:
        """
        Write a JSON document with sorted keys; ``nan`` and ``inf`` become ``null``.
        """
        target = target or self.out
        self._emit(json.dumps(_finite(data), indent=2, sort_keys=True) + "\n", target)
        if target is not None:
            self.write_config(target)

    def paths(self, paths: t.Sequence[SamplePath]) -> None:
        """
        ``path_id,time,population`` rows, starting with ``(0, M)`` for every path.
        """
        def rows():
            for path_id, path in enumerate(paths):
                yield path_id, 0.0, path.initial
                for time, population in zip(path.times, path.populations):
                    yield path_id, float(time), int(population)
        self.write(schemas.PATH_COLUMNS, rows())

    def moments(self, points: t.Sequence[MomentPoint]) -> None:
        self.write(schemas.MOMENT_COLUMNS, ((p.t, p.mean, p.variance, p.second_moment) for p in points))

    def covariances(self, rows: t.Sequence[t.Dict[str, float]], target: t.Optional[str] = None) -> None:
        self.write(schemas.COVARIANCE_COLUMNS, ([row[name] for name in schemas.COVARIANCE_COLUMNS] for row in rows), target)

    def replicates(self, records: t.Sequence[ReplicateRecord], target: t.Optional[str] = None) -> None:
        self.write(
            schemas.REPLICATE_COLUMNS,
            ((r.replicate, r.lambda_hat, r.nu_hat, r.residual, r.converged) for r in records),
            target,
        )


def _finite(value: t.Any) -> t.Any:
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, dict):
        return {key: _finite(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_finite(item) for item in value]
    return value


def read_sample_file(path: str) -> t.List[int]:
    """
    Read population counts: an optional ``population`` header, then one
    non-negative integer per line (blank lines are skipped).

    Raises
    ------
    :exc:`.SampleFileError`
        if the file cannot be read or a line is not a count.
    """
    try:
        with open(path, newline="", encoding="utf-8") as handle:
            lines = handle.read().splitlines()
    except OSError as exc:
        raise SampleFileError(f"cannot read sample file: {exc.strerror}", path) from exc
    values: t.List[int] = []
    for number, line in enumerate(lines, start=1):
        text = line.strip()
        if not text or (number == 1 and text == schemas.SAMPLE_COLUMNS[0]):
            continue
        try:
            value = int(text)
        except ValueError:
            raise SampleFileError(f"expected a population count, got {text!r}", path, number) from None
        if value < 0:
            raise SampleFileError(f"population count must be non-negative, got {value}", path, number)
        values.append(value)
    if len(values) < 2:
        raise SampleFileError(f"need at least two counts, found {len(values)}", path)
    return values
