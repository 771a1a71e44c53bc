import asyncio
import typing as t
from collections import deque
import logging
from .events import Event

_LOG = logging.getLogger("fracbinom.emitter")


class Emitter:
    """
    The class is a manager for study progress events.

    Parameters
    ---------
    loop: :class:`AbstractEventLoop`
        a loop event from asyncio
    """
    def __init__(self, loop: asyncio.AbstractEventLoop) -> None:
        self._loop = loop
        self.listeners = deque()

    def add_listener(self, event: t.Union[str, t.Type[Event]], func: t.Callable) -> None:
        """
        Add listener for listeners list.

        Parameters
        ---------
        event: :class:`str` | :class:`Event`
            event name or class for event
        func: :class:`function`
            the coroutine function to call back
        """
        _LOG.debug(f"add listener {event}")
        event = event if isinstance(event, str) else event.__name__
        self.listeners.append({"event": event, "func": func})

    def remove_listener(self, event: t.Union[str, t.Type[Event]], func: t.Callable) -> None:
        """
        Remove listener from listeners list.

        Parameters
        ---------
        event: :class:`str` | :class:`Event`
            event name or class for event
        func: :class:`function`
            the function registered for the event
        """
        _LOG.debug(f"remove listener {event}")
        event = event if isinstance(event, str) else event.__name__
        for listener in [i for i in self.listeners if i["event"] == event and i["func"] == func]:
            self.listeners.remove(listener)

    def emit(self, event: t.Union[str, t.Type[Event]], data: t.Any) -> t.List[asyncio.Task]:
        """
        Schedule every listener of ``event`` with ``data``.

        Parameters
        ---------
        event: :class:`str` | :class:`Event`
            event name or class for event
        data: :class:`Any`
            the payload passed to the callbacks

        Returns
        -------
        :class:`list`
            the scheduled tasks
        """
        event_name = event if isinstance(event, str) else event.__name__
        listeners = [i for i in self.listeners if i["event"] == event_name]
        tasks = []
        for listener in listeners:
            _LOG.debug(f"dispatch {event_name} for {len(listeners)} listeners")
            if asyncio.iscoroutinefunction(listener["func"]):
                tasks.append(self._loop.create_task(listener["func"](data)))
            else:
                _LOG.error("Events only async function")
        return tasks
