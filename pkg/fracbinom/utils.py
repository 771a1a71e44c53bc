import asyncio
import math
import typing as t

import numpy as np

from .exceptions import ParameterError


def get_event_loop() -> asyncio.AbstractEventLoop:
    try:
        loop = asyncio.get_running_loop()
    except RuntimeError:
        loop = asyncio.new_event_loop()
        asyncio.set_event_loop(loop)
    return loop


def format_float(value: float) -> str:
    """
    Serialise a float with 17 significant digits so that reruns compare byte for byte.
    """
    return "%.17g" % value


def parse_t_grid(grid: str) -> t.List[float]:
    """
    Parse a time grid.

    Accepted forms are a comma separated list (``"0,1,5"``),
    ``"log:start:stop:count"`` for ``count`` log-spaced points and
    ``"lin:start:stop:count"`` for linearly spaced ones.

    Parameters
    ----------
    grid: :class:`str`
        the grid description

    Raises
    ------
    :exc:`.ParameterError`
        for malformed specifications, negative or non-finite times.
    """
    grid = str(grid).strip()
    try:
        if grid.startswith(("log:", "lin:")):
            kind, start, stop, count = grid.split(":")
            start, stop, count = float(start), float(stop), int(count)
            if count < 1:
                raise ParameterError(f"grid needs at least one point: {grid!r}", "t_grid")
            if kind == "log":
                if start <= 0 or stop <= 0:
                    raise ParameterError(f"log grid bounds must be positive: {grid!r}", "t_grid")
                points = np.geomspace(start, stop, count)
            else:
                points = np.linspace(start, stop, count)
            values = [float(value) for value in points]
        else:
            values = [float(part) for part in grid.split(",") if part.strip()]
    except ValueError as exc:
        raise ParameterError(f"malformed time grid {grid!r}: {exc}", "t_grid") from exc
    if not values:
        raise ParameterError("empty time grid", "t_grid")
    if any(value < 0 or not math.isfinite(value) for value in values):
        raise ParameterError(f"grid times must be non-negative and finite: {grid!r}", "t_grid")
    return values
