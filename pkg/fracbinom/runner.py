import asyncio
import logging
import typing as t
from concurrent.futures import ProcessPoolExecutor

from .emitter import Emitter
from .events import Event, ReplicateFinishedEvent, StudyFinishedEvent
from .exceptions import ParameterError
from .objects import McStudyReport, ReplicateRecord
from .utils import get_event_loop

_LOG = logging.getLogger("fracbinom.runner")


class StudyRunner:
    """
    Runs independent replicate jobs, in-process or on a process pool, and
    reports them in replicate order.

    Results never depend on ``threads``: every job carries its own seed and
    stream index, and results are collected by index.

    Parameters
    ---------
    threads: :class:`int`
        worker processes; ``1`` runs the jobs in the calling process
    loop: :class:`asyncio.AbstractEventLoop`
        The event loop for the runner. Without one the runner creates its own,
        which :meth:`close` closes.
    """
    def __init__(self, threads: int = 1, *, loop: t.Optional[asyncio.AbstractEventLoop] = None) -> None:
        if int(threads) != threads or threads < 1:
            raise ParameterError(f"threads must be a positive integer, got {threads}", "threads")
        self.threads = int(threads)
        self._owns_loop = loop is None
        self.loop = loop or get_event_loop()
        self.event_manager = Emitter(self.loop)

    def listen(self, event: t.Union[str, t.Type[Event]]) -> t.Callable[..., t.Awaitable]:
        """
        The register function for listener handler

        Parameters
        ---------
        event: :class:`Any` | :class:`str`
            event name or class for event
        """
        def deco(func: t.Callable[..., t.Awaitable]) -> t.Callable[..., t.Awaitable]:
            self.event_manager.add_listener(event, func)
            return func
        return deco

    async def _dispatch(self, event: Event) -> None:
        tasks = self.event_manager.emit(type(event), event)
        if tasks:
            await asyncio.gather(*tasks)

    async def _run(self, func: t.Callable[..., ReplicateRecord], jobs: t.Sequence[tuple]) -> t.List[ReplicateRecord]:
        total = len(jobs)
        records: t.List[ReplicateRecord] = []
        if self.threads == 1:
            for job in jobs:
                records.append(func(*job))
                await self._dispatch(ReplicateFinishedEvent(records[-1], len(records), total))
            return records
        with ProcessPoolExecutor(max_workers=self.threads) as pool:
            futures = [self.loop.run_in_executor(pool, func, *job) for job in jobs]
            for future in futures:
                records.append(await future)
                await self._dispatch(ReplicateFinishedEvent(records[-1], len(records), total))
        return records

    def run(self, func: t.Callable[..., ReplicateRecord], jobs: t.Sequence[tuple]) -> t.List[ReplicateRecord]:
        """
        Run ``func(*job)`` for every job and return the results in job order.

        Parameters
        ---------
        func: :class:`function`
            a module-level (picklable) replicate function
        jobs: :class:`list`
            argument tuples, one per replicate
        """
        _LOG.info(f"running {len(jobs)} replicates on {self.threads} worker(s)")
        return self.loop.run_until_complete(self._run(func, jobs))

    def finish(self, report: McStudyReport) -> None:
        """
        Announce the aggregated report to :class:`StudyFinishedEvent` listeners.
        """
        self.loop.run_until_complete(self._dispatch(StudyFinishedEvent(report)))

    def close(self) -> None:
        """
        Close the event loop if this runner created it.
        """
        if self._owns_loop and not self.loop.is_closed():
            _LOG.debug("closing runner event loop")
            self.loop.close()
