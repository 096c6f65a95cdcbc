"""Event queue ordering and simulator loop behavior."""

import pytest
from hypothesis import given, strategies as st

from simlb.kernel import (EventKind, EventQueue, SchedulingInPast, SimEvent,
                          Simulator)


def test_pop_orders_by_time():
    sim = Simulator()
    seen = []
    sim.register(EventKind.TASK_ARRIVAL, lambda e: seen.append(e.time))
    sim.schedule(5.0, EventKind.TASK_ARRIVAL)
    sim.schedule(3.0, EventKind.TASK_ARRIVAL)
    sim.run()
    assert seen == [3.0, 5.0]


def test_equal_times_pop_in_scheduling_order():
    sim = Simulator()
    seen = []
    sim.register(EventKind.TASK_ARRIVAL, lambda e: seen.append(e.payload))
    sim.schedule(7.0, EventKind.TASK_ARRIVAL, "A")
    sim.schedule(7.0, EventKind.TASK_ARRIVAL, "B")
    sim.run()
    assert seen == ["A", "B"]


def test_seq_strictly_increases():
    sim = Simulator()
    events = [sim.schedule(float(i), EventKind.HOUR_BOUNDARY) for i in range(10)]
    seqs = [e.seq for e in events]
    assert seqs == sorted(seqs) and len(set(seqs)) == len(seqs)


def test_scheduling_in_past_rejected():
    sim = Simulator()
    sim.register(EventKind.TASK_ARRIVAL, lambda e: None)
    sim.schedule(10.0, EventKind.TASK_ARRIVAL)
    sim.run()
    assert sim.now == 10.0
    with pytest.raises(SchedulingInPast):
        sim.schedule(9.0, EventKind.TASK_ARRIVAL)


def test_scheduling_at_now_allowed():
    sim = Simulator()
    sim.register(EventKind.TASK_ARRIVAL, lambda e: None)
    sim.schedule(10.0, EventKind.TASK_ARRIVAL)
    sim.run()
    sim.schedule(10.0, EventKind.TASK_ARRIVAL)  # no exception


def test_step_on_empty_queue_returns_none():
    sim = Simulator()
    assert sim.step() is None


def test_run_until_leaves_later_events_queued():
    sim = Simulator()
    seen = []
    sim.register(EventKind.TASK_ARRIVAL, lambda e: seen.append(e.time))
    for t in (1.0, 2.0, 3.0):
        sim.schedule(t, EventKind.TASK_ARRIVAL)
    processed = sim.run(until=2.0)
    assert processed == 2
    assert seen == [1.0, 2.0]
    assert len(sim.queue) == 1


def test_run_until_advances_clock_when_nothing_processed():
    sim = Simulator()
    assert sim.run(until=42.0) == 0
    assert sim.now == 42.0


def test_missing_handler_raises():
    sim = Simulator()
    sim.schedule(1.0, EventKind.SIMULATION_END)
    with pytest.raises(KeyError):
        sim.run()


def test_handler_can_schedule_followup_events():
    sim = Simulator()
    seen = []

    def arrival(event):
        seen.append(("arrival", event.time))
        sim.schedule(event.time + 1.5, EventKind.TASK_COMPLETION)

    sim.register(EventKind.TASK_ARRIVAL, arrival)
    sim.register(EventKind.TASK_COMPLETION,
                 lambda e: seen.append(("done", e.time)))
    sim.schedule(1.0, EventKind.TASK_ARRIVAL)
    sim.run()
    assert seen == [("arrival", 1.0), ("done", 2.5)]


def test_trace_callback_sees_every_processed_event():
    traced = []
    sim = Simulator(trace=traced.append)
    sim.register(EventKind.TASK_ARRIVAL, lambda e: None)
    sim.schedule(1.0, EventKind.TASK_ARRIVAL)
    sim.schedule(2.0, EventKind.TASK_ARRIVAL)
    sim.run()
    assert [e.time for e in traced] == [1.0, 2.0]


@given(st.lists(st.floats(min_value=0, max_value=1e6,
                          allow_nan=False), min_size=1, max_size=50))
def test_event_queue_pops_sorted(times):
    q = EventQueue()
    for i, t in enumerate(times):
        q.push(SimEvent(t, i, EventKind.TASK_ARRIVAL))
    popped = [q.pop() for _ in range(len(times))]
    keys = [(e.time, e.seq) for e in popped]
    assert keys == sorted(keys)
