"""Rich progress display for oracle runs and sweeps."""

from __future__ import annotations

import sys

from rich.console import Console
from rich.live import Live
from rich.progress import BarColumn, Progress, SpinnerColumn, TaskID, TextColumn, TimeElapsedColumn

from ..events import Event, JobAdvanced, JobFinished, JobStarted, RunFinished, RunStarted


class RichRenderer:
    """One progress bar per job, drawn on stderr.

    Stdout stays reserved for machine-readable summaries.
    """

    def __init__(self, *, console: Console | None = None) -> None:
        super().__init__()
        self.console = console or Console(file=sys.stderr)
        self.progress = Progress(
            SpinnerColumn(),
            TextColumn("[bold]{task.description}"),
            BarColumn(),
            TextColumn("{task.completed}/{task.total}"),
            TimeElapsedColumn(),
            console=self.console,
        )
        self.tasks: dict[str, TaskID] = {}
        self.finished: list[tuple[str, float, str]] = []
        self.live: Live | None = None

    def _ensure_started(self) -> None:
        if self.live is None:
            self.live = Live(self.progress, console=self.console, refresh_per_second=10)
            self.live.start()

    def close(self) -> None:
        """Stop the live display; safe to call more than once."""
        if self.live is not None:
            self.live.stop()
            self.live = None

    def handle(self, event: Event) -> None:
        if isinstance(event, RunStarted):
            self._ensure_started()
            self.console.log(f"{event.command}: {event.total_jobs} job(s)")
        elif isinstance(event, JobStarted):
            self._ensure_started()
            self.tasks[event.job] = self.progress.add_task(event.job, total=event.total)
        elif isinstance(event, JobAdvanced):
            task = self.tasks.get(event.job)
            if task is not None:
                self.progress.update(task, completed=event.completed)
        elif isinstance(event, JobFinished):
            task = self.tasks.get(event.job)
            if task is not None:
                total = self.progress.tasks[task].total
                self.progress.update(task, completed=total)
            self.finished.append((event.job, event.seconds, event.summary))
        elif isinstance(event, RunFinished):
            self.close()
            style = "green" if event.status == "ok" else "yellow"
            self.console.print(f"[{style}]{event.command}: {event.status}[/{style}]")
