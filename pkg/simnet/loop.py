from __future__ import annotations

import heapq
import itertools
import logging
from typing import Any, List, Tuple

from core.types import NodeId
from simnet.models import EventKind, SimEvent


class EventLoop:
    """Single-threaded virtual-time scheduler.

    Events run in timestamp order, ties in insertion order. A processed event is
    dispatched to ``target.on_<kind>`` when the target defines such a handler.
    """

    def __init__(self, target: Any) -> None:
        self.target: Any = target
        self.now: float = 0.0
        self.history: List[SimEvent] = []
        self._queue: List[Tuple[float, int, SimEvent]] = []
        self._seq = itertools.count()
        self.logger: logging.Logger = logging.getLogger('simnet.loop')

    def __len__(self) -> int:
        return len(self._queue)

    def schedule(self, delay: float, kind: EventKind, actor: NodeId, detail: str = '', payload: Any = None) -> SimEvent:
        event = SimEvent(self.now + delay, next(self._seq), kind, actor, detail, payload)
        heapq.heappush(self._queue, (event.timestamp, event.seq, event))
        return event

    def emit(self, kind: EventKind, actor: NodeId, detail: str = '') -> SimEvent:
        event = SimEvent(self.now, next(self._seq), kind, actor, detail)
        self.history.append(event)
        return event

    def dispatch(self, event: SimEvent) -> None:
        self.logger.debug(f"DISPATCH {event.kind.value} @ {event.timestamp:.6f}: {event.actor} {event.detail}")
        if handler := getattr(self.target, f'on_{event.kind.value}', None):
            handler(event)

    def run(self) -> None:
        while self._queue:
            timestamp, _, event = heapq.heappop(self._queue)
            self.now = timestamp
            self.history.append(event)
            self.dispatch(event)
