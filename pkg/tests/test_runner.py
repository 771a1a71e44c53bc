import asyncio
import logging

import pytest

from fracbinom.emitter import Emitter
from fracbinom.events import ReplicateFinishedEvent, StudyFinishedEvent
from fracbinom.exceptions import ParameterError
from fracbinom.objects import ReplicateRecord
from fracbinom.runner import StudyRunner


def fixed_record(index: int) -> ReplicateRecord:
    return ReplicateRecord(index, 0.3, 0.8, 0.0, True)


@pytest.fixture
def loop():
    loop = asyncio.new_event_loop()
    yield loop
    loop.close()


def test_runner_keeps_job_order(loop):
    runner = StudyRunner(loop=loop)
    records = runner.run(fixed_record, [(index,) for index in range(5)])
    assert [record.replicate for record in records] == list(range(5))


def test_runner_reports_progress(loop):
    runner = StudyRunner(loop=loop)
    seen = []

    @runner.listen(ReplicateFinishedEvent)
    async def progress(event: ReplicateFinishedEvent) -> None:
        seen.append((event.record.replicate, event.completed, event.total))

    runner.run(fixed_record, [(index,) for index in range(3)])
    assert seen == [(0, 1, 3), (1, 2, 3), (2, 3, 3)]


def test_runner_announces_report(loop):
    runner = StudyRunner(loop=loop)
    reports = []

    @runner.listen("StudyFinishedEvent")
    async def finished(event: StudyFinishedEvent) -> None:
        reports.append(event.report)

    runner.finish("report")
    assert reports == ["report"]


@pytest.mark.parametrize("threads", [0, 1.5, -2])
def test_runner_threads_validation(loop, threads):
    with pytest.raises(ParameterError):
        StudyRunner(threads, loop=loop)


def test_emitter_add_and_remove(loop):
    emitter = Emitter(loop)

    async def listener(data):
        return data

    emitter.add_listener(ReplicateFinishedEvent, listener)
    tasks = emitter.emit(ReplicateFinishedEvent, 1)
    assert len(tasks) == 1
    assert loop.run_until_complete(tasks[0]) == 1
    emitter.remove_listener("ReplicateFinishedEvent", listener)
    assert emitter.emit(ReplicateFinishedEvent, 1) == []


def test_emitter_ignores_plain_functions(loop, caplog):
    emitter = Emitter(loop)
    emitter.add_listener("StudyFinishedEvent", lambda data: data)
    with caplog.at_level(logging.ERROR, logger="fracbinom.emitter"):
        assert emitter.emit("StudyFinishedEvent", None) == []
    assert "async" in caplog.text


@pytest.mark.slow
def test_pool_keeps_job_order(loop):
    runner = StudyRunner(2, loop=loop)
    records = runner.run(fixed_record, [(index,) for index in range(6)])
    assert [record.replicate for record in records] == list(range(6))


def test_runner_closes_its_own_loop():
    runner = StudyRunner()
    runner.run(fixed_record, [(0,)])
    runner.close()
    assert runner.loop.is_closed()
    runner.close()


def test_runner_leaves_given_loop_open(loop):
    runner = StudyRunner(loop=loop)
    runner.close()
    assert not loop.is_closed()
