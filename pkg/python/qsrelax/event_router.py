"""Fan-out of progress events to any number of consumers."""

from __future__ import annotations

import logging
import threading
from typing import Protocol

from .events import Event

logger = logging.getLogger(__name__)


class EventConsumer(Protocol):
    """Anything with a ``handle(event)`` method."""

    def handle(self, event: Event) -> None: ...


class EventRouter:
    """Routes events from worker threads to subscribed consumers.

    Emission is serialised by a lock, so consumers see one event at a time
    even when several oracle jobs report progress concurrently.

    Example:
        router = EventRouter()
        router.subscribe(RichRenderer())
        error_curve(..., emit=router.emit)
    """

    def __init__(self) -> None:
        super().__init__()
        self._consumers: list[EventConsumer] = []
        self._lock = threading.Lock()
        self._emit_lock = threading.Lock()

    def subscribe(self, consumer: EventConsumer) -> None:
        with self._lock:
            self._consumers.append(consumer)

    def unsubscribe(self, consumer: EventConsumer) -> None:
        with self._lock:
            if consumer in self._consumers:
                self._consumers.remove(consumer)

    @property
    def consumers(self) -> list[EventConsumer]:
        with self._lock:
            return list(self._consumers)

    def emit(self, event: Event) -> None:
        """Deliver ``event`` to every consumer; a failing consumer does not stop the others."""
        consumers = self.consumers
        with self._emit_lock:
            for consumer in consumers:
                try:
                    consumer.handle(event)
                except Exception as exc:
                    logger.warning(
                        "error in event consumer %s: %s", consumer.__class__.__name__, exc
                    )
