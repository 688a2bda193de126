from __future__ import annotations

import io
import logging
import threading

import pytest
from rich.console import Console

from qsrelax._logging import configure_logging, level_for
from qsrelax.event_router import EventRouter
from qsrelax.events import Event, JobAdvanced, JobFinished, JobStarted, RunFinished, RunStarted
from qsrelax.renderers import RichRenderer


class EventCollector:
    def __init__(self) -> None:
        super().__init__()
        self.events: list[Event] = []

    def handle(self, event: Event) -> None:
        self.events.append(event)


class Exploding:
    def handle(self, event: Event) -> None:
        raise RuntimeError("boom")


class TestEventRouter:
    def test_fan_out(self) -> None:
        router = EventRouter()
        first, second = EventCollector(), EventCollector()
        router.subscribe(first)
        router.subscribe(second)
        event = RunStarted(command="oracle-compare", total_jobs=3)
        router.emit(event)
        assert first.events == [event]
        assert second.events == [event]

    def test_unsubscribe(self) -> None:
        router = EventRouter()
        collector = EventCollector()
        router.subscribe(collector)
        router.unsubscribe(collector)
        router.unsubscribe(collector)
        router.emit(RunFinished(command="sweep", status="ok"))
        assert collector.events == []
        assert router.consumers == []

    def test_failing_consumer_does_not_block_others(
        self, caplog: pytest.LogCaptureFixture
    ) -> None:
        router = EventRouter()
        collector = EventCollector()
        router.subscribe(Exploding())
        router.subscribe(collector)
        with caplog.at_level(logging.WARNING, logger="qsrelax.event_router"):
            router.emit(JobStarted(job="g=0.1", total=5))
        assert len(collector.events) == 1
        assert "Exploding" in caplog.text

    def test_concurrent_emitters(self) -> None:
        router = EventRouter()
        collector = EventCollector()
        router.subscribe(collector)

        def work(job: str) -> None:
            for k in range(200):
                router.emit(JobAdvanced(job=job, completed=k))

        threads = [threading.Thread(target=work, args=(f"g={i}",)) for i in range(4)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        assert len(collector.events) == 800


class TestRichRenderer:
    def test_renders_jobs_and_status(self) -> None:
        buf = io.StringIO()
        renderer = RichRenderer(console=Console(file=buf, force_terminal=False, width=100))
        for event in (
            RunStarted(command="oracle-compare", total_jobs=1),
            JobStarted(job="g=0.1", total=4),
            JobAdvanced(job="g=0.1", completed=2),
            JobAdvanced(job="unknown", completed=1),
            JobFinished(job="g=0.1", seconds=0.5, summary="E=1.0e-03"),
            RunFinished(command="oracle-compare", status="inconclusive"),
        ):
            renderer.handle(event)
        assert renderer.live is None
        assert renderer.finished == [("g=0.1", 0.5, "E=1.0e-03")]
        task = renderer.progress.tasks[renderer.tasks["g=0.1"]]
        assert task.completed == 4
        assert "oracle-compare: inconclusive" in buf.getvalue()

    def test_close_without_run_finished(self) -> None:
        buf = io.StringIO()
        renderer = RichRenderer(console=Console(file=buf, force_terminal=False, width=100))
        renderer.handle(RunStarted(command="sweep", total_jobs=2))
        renderer.handle(JobStarted(job="[0] n_modes=50 g=0.1", total=4))
        assert renderer.live is not None
        renderer.close()
        renderer.close()
        assert renderer.live is None


class TestLogging:
    @pytest.mark.parametrize(
        ("verbosity", "level"),
        [(0, logging.WARNING), (1, logging.INFO), (2, logging.DEBUG), (5, logging.DEBUG)],
    )
    def test_levels(self, verbosity: int, level: int) -> None:
        assert level_for(verbosity) == level

    def test_single_handler(self) -> None:
        buf = io.StringIO()
        _ = configure_logging(1, console=Console(file=buf))
        logger = configure_logging(1, console=Console(file=buf))
        named = [h for h in logger.handlers if h.get_name() == "qsrelax-rich"]
        assert len(named) == 1
        logging.getLogger("qsrelax.core").info("resolved window 39.27")
        assert "resolved window" in buf.getvalue()
        _ = configure_logging(0)
