"""Minimal deterministic discrete-event simulation kernel.

A single clock drives a priority queue of events ordered lexicographically
by (time, seq).  The seq counter is assigned at scheduling time, so two
events with equal timestamps are processed in the order they were
scheduled.  Handlers are registered per event kind and invoked
synchronously from the event loop.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, Optional


class EventKind(Enum):
    BATCH_ARRIVAL = "BatchArrival"
    TASK_ARRIVAL = "TaskArrival"
    TASK_COMPLETION = "TaskCompletion"
    HOUR_BOUNDARY = "HourBoundary"
    SIMULATION_END = "SimulationEnd"


class SchedulingInPast(Exception):
    """An event was scheduled earlier than the current clock."""


@dataclass(order=True, frozen=True)
class SimEvent:
    time: float
    seq: int
    kind: EventKind = field(compare=False)
    payload: Any = field(compare=False, default=None)


class EventQueue:
    """Priority queue of SimEvent, popped in (time, seq) order."""

    def __init__(self) -> None:
        self._heap: list[SimEvent] = []

    def push(self, event: SimEvent) -> None:
        heapq.heappush(self._heap, event)

    def pop(self) -> SimEvent:
        return heapq.heappop(self._heap)

    def peek(self) -> SimEvent:
        return self._heap[0]

    def __len__(self) -> int:
        return len(self._heap)


class Simulator:
    """Event loop: schedule events, register handlers, run to a bound.

    trace, if given, is called with every processed event (used for the
    optional event-trace dump).
    """

    def __init__(self, trace: Optional[Callable[[SimEvent], None]] = None) -> None:
        self.queue = EventQueue()
        self.now: float = 0.0
        self._next_seq = 0
        self._handlers: dict[EventKind, Callable[[SimEvent], None]] = {}
        self._trace = trace

    def register(self, kind: EventKind, handler: Callable[[SimEvent], None]) -> None:
        self._handlers[kind] = handler

    def schedule(self, time: float, kind: EventKind, payload: Any = None) -> SimEvent:
        if time < self.now:
            raise SchedulingInPast(f"cannot schedule at t={time} when clock={self.now}")
        event = SimEvent(time, self._next_seq, kind, payload)
        self._next_seq += 1
        self.queue.push(event)
        return event

    def step(self) -> Optional[SimEvent]:
        """Process a single event; returns it, or None if the queue is empty."""
        if not len(self.queue):
            return None
        event = self.queue.pop()
        self.now = event.time
        if self._trace is not None:
            self._trace(event)
        handler = self._handlers.get(event.kind)
        if handler is None:
            raise KeyError(f"no handler registered for {event.kind}")
        handler(event)
        return event

    def run(self, until: Optional[float] = None) -> int:
        """Process all events with time <= until (all events if until is None).

        Returns the number of events processed.  If no event was processed
        and a bound was given, the clock advances to the bound.
        """
        processed = 0
        while len(self.queue):
            if until is not None and self.queue.peek().time > until:
                break
            self.step()
            processed += 1
        if processed == 0 and until is not None and until > self.now:
            self.now = until
        return processed
