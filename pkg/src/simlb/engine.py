"""End-to-end simulation of one (configuration, balancer) run.

Builds the data centers and VM fleet, feeds a pre-generated task stream
through the event loop, applies the selected balancing policy, and
returns completed-task records.

Selection is vectorized over the fleet (numpy) and queue reassessment
uses the wait queue's earliest-feasible index.  Both fast paths are
behaviorally equivalent to the pure operations in balancers.py; the test
suite checks the equivalence on randomized states.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import balancers, cloud, workload
from .balancers import (DEFAULT_FLOOR_FRACTION, DEFAULT_TASK_THRESHOLD,
                        NormalizationBounds, WaitQueue, demand_fraction)
from .cloud import CostRates, VmState, total_capacity
from .kernel import EventKind, SimEvent, Simulator
from .workload import HOUR_SEC, Task


class SimulationError(Exception):
    """A simulation invariant was violated at runtime."""


@dataclass
class RunResult:
    records: list[Task]  # completed tasks, in completion order
    unfinished: int
    events_processed: int


class CloudSimulation:
    """One simulation instance: fully owns its fleet, queue, and clock.

    execution_model picks how co-resident tasks turn reserved MIPS into
    progress: 'shared' (default) splits the VM's full MIPS among active
    tasks in proportion to their reserved demand, so a VM never idles
    reserved-but-unused capacity; 'reserved' runs each task at exactly
    its reserved MIPS for its whole lifetime.
    """

    def __init__(self, dc_count: int, vms_per_dc: int, balancer: str = "sbdlb",
                 threshold: int = DEFAULT_TASK_THRESHOLD,
                 floor_fraction: float = DEFAULT_FLOOR_FRACTION,
                 categories=workload.DEFAULT_CATEGORIES,
                 queue_mode: str = "scan",
                 execution_model: str = "shared",
                 cost_rates: CostRates = CostRates(),
                 hourly: bool = False,
                 until: Optional[float] = None,
                 trace: Optional[Callable[[SimEvent], None]] = None) -> None:
        if balancer not in ("sbdlb", "throttled"):
            raise ValueError(f"unknown balancer {balancer!r}")
        if queue_mode not in ("scan", "head-only"):
            raise ValueError(f"unknown queue mode {queue_mode!r}")
        if execution_model not in ("shared", "reserved"):
            raise ValueError(f"unknown execution model {execution_model!r}")
        if dc_count <= 0 or vms_per_dc <= 0:
            raise ValueError("dc_count and vms_per_dc must be > 0")
        self.dc_count = dc_count
        self.vms_per_dc = vms_per_dc
        self.balancer = balancer
        self.threshold = threshold
        self.queue_mode = queue_mode
        self.execution_model = execution_model
        self.cost_rates = cost_rates
        self.hourly = hourly
        self.until = until
        self.trace = trace
        mi_min, mi_max = workload.global_mi_bounds(categories)
        self.bounds = NormalizationBounds(mi_min, mi_max, floor_fraction)

        n = dc_count * vms_per_dc
        if vms_per_dc % 2 == 0:
            # ids interleave across DCs in low/high pairs, so the ascending
            # id order (and the throttled table) spans every data center
            self.specs = cloud.alternating_tier_specs(n)
            self.dc_of = (np.arange(n) // 2) % dc_count
        else:
            self.specs = cloud.alternating_tier_specs(vms_per_dc) * dc_count
            self.dc_of = np.arange(n) // vms_per_dc
        caps = [total_capacity(s).as_tuple() for s in self.specs]
        self.cap = np.array(caps, dtype=np.float64)
        self.cap_mips = self.cap[:, 0].copy()
        self.avail = self.cap.copy()
        self.active = np.zeros(n, dtype=np.int64)
        # feasibility slack absorbs float drift from repeated alloc/release
        self.eps = 1e-9 * self.cap
        self.n_vms = n

        # hosts exist per the placement model; build once to assert fit
        for d in range(dc_count):
            cloud.provision_hosts([self.specs[i] for i in range(n)
                                   if self.dc_of[i] == d])

        self.in_flight: dict[int, tuple[int, np.ndarray]] = {}
        self.queue = WaitQueue()
        self._avail_heap: list[int] = []  # throttled: available vm ids
        self.tasks: list[Task] = []
        self.records: list[Task] = []
        self.task_alpha: np.ndarray = np.empty(0)
        self.sim = Simulator(trace=self.trace)

        # processor-sharing bookkeeping (sbdlb + shared execution model)
        self._ps = balancer == "sbdlb" and execution_model == "shared"
        self.vm_tasks: list[dict[int, None]] = [dict() for _ in range(n)]
        self.remaining: np.ndarray = np.empty(0)
        self.rate: np.ndarray = np.empty(0)
        self.version: np.ndarray = np.empty(0)
        self.vm_last = np.zeros(n)

    # -- policy fast paths -------------------------------------------------

    def _select_sbdlb(self, alpha: float) -> int:
        """Index of the highest-score feasible VM, or -1 to enqueue."""
        demand = alpha * self.cap
        ok = (self.active < self.threshold) & \
             (demand <= self.avail + self.eps).all(axis=1)
        if not ok.any():
            return -1
        scores = np.where(ok, self.avail.sum(axis=1), -np.inf)
        return int(np.argmax(scores))  # argmax ties resolve to lowest id

    def _assign(self, task: Task, vm: int, demand: np.ndarray, mips: float) -> None:
        if self.active[vm] >= self._max_active():
            raise SimulationError(
                f"vm {vm} would exceed its task limit at t={self.sim.now}")
        self.avail[vm] -= demand
        self.active[vm] += 1
        self.in_flight[task.task_id] = (vm, demand)
        task.start = self.sim.now
        task.vm_id = vm
        task.dc_id = int(self.dc_of[vm])
        if self._ps:
            self._vm_advance(vm)
            self.vm_tasks[vm][task.task_id] = None
            self.remaining[task.task_id] = task.length_mi
            self._vm_reschedule(vm)
        else:
            finish = self.sim.now + task.length_mi / mips
            self.sim.schedule(finish, EventKind.TASK_COMPLETION,
                              (task.task_id, 0))

    # -- processor sharing -------------------------------------------------

    def _vm_advance(self, vm: int) -> None:
        """Progress co-resident tasks up to the current clock."""
        dt = self.sim.now - self.vm_last[vm]
        if dt > 0:
            for tid in self.vm_tasks[vm]:
                self.remaining[tid] -= self.rate[tid] * dt
        self.vm_last[vm] = self.sim.now

    def _vm_reschedule(self, vm: int) -> None:
        """Recompute shared rates and refresh completion events.

        Each task's share of the VM's full MIPS is proportional to its
        reserved demand; stale completion events are skipped by version.
        """
        tids = self.vm_tasks[vm]
        if not tids:
            return
        total_alpha = sum(float(self.task_alpha[t]) for t in tids)
        full = self.cap_mips[vm]
        now = self.sim.now
        for tid in tids:
            self.rate[tid] = float(self.task_alpha[tid]) / total_alpha * full
            self.version[tid] += 1
            finish = now + max(self.remaining[tid], 0.0) / self.rate[tid]
            self.sim.schedule(finish, EventKind.TASK_COMPLETION,
                              (tid, int(self.version[tid])))

    def _max_active(self) -> int:
        return 1 if self.balancer == "throttled" else self.threshold

    def _dispatch(self, task: Task) -> bool:
        """Try to place an arriving task; returns False when enqueued."""
        if self.balancer == "sbdlb":
            alpha = float(self.task_alpha[task.task_id])
            vm = self._select_sbdlb(alpha)
            if vm < 0:
                self.queue.push(task, alpha)
                return False
            self._assign(task, vm, alpha * self.cap[vm], alpha * self.cap_mips[vm])
            return True
        if self._avail_heap:
            vm = heapq.heappop(self._avail_heap)
            self._assign(task, vm, self.cap[vm].copy(), self.cap_mips[vm])
            return True
        self.queue.push(task, 0.0)
        return False

    def _reassess_after(self, vm: int) -> None:
        """Place queued tasks the completion on `vm` made feasible.

        Between events every queued task is infeasible on every VM, so
        only the VM that just released capacity can admit new tasks;
        candidates are gated by its headroom and then routed through the
        regular selection.
        """
        if self.balancer == "throttled":
            while len(self.queue) and self._avail_heap:
                slot, task = self.queue.head()
                self.queue.remove(slot)
                v = heapq.heappop(self._avail_heap)
                self._assign(task, v, self.cap[v].copy(), self.cap_mips[v])
            return
        while len(self.queue) and self.active[vm] < self.threshold:
            headroom = float(((self.avail[vm] + self.eps[vm]) / self.cap[vm]).min())
            if self.queue_mode == "head-only":
                slot, task = self.queue.head()
                if self.task_alpha[task.task_id] > headroom:
                    break
            else:
                hit = self.queue.first_fit(headroom)
                if hit is None:
                    break
                slot, task = hit
            alpha = float(self.task_alpha[task.task_id])
            target = self._select_sbdlb(alpha)
            if target < 0:
                break
            self.queue.remove(slot)
            self._assign(task, target, alpha * self.cap[target],
                         alpha * self.cap_mips[target])

    # -- event handlers ----------------------------------------------------

    def _on_batch(self, event: SimEvent) -> None:
        start, count = event.payload
        for task in self.tasks[start:start + count]:
            self._dispatch(task)

    def _on_completion(self, event: SimEvent) -> None:
        task_id, event_version = event.payload
        if self._ps and event_version != int(self.version[task_id]):
            return  # superseded by a reschedule
        vm, demand = self.in_flight.pop(task_id)
        task = self.tasks[task_id]
        task.finish = self.sim.now
        self.avail[vm] += demand
        self.active[vm] -= 1
        if self._ps:
            self._vm_advance(vm)
            del self.vm_tasks[vm][task_id]
            self.version[task_id] += 1
            self._vm_reschedule(vm)
        if self.balancer == "throttled":
            heapq.heappush(self._avail_heap, vm)
        self.records.append(task)
        self._reassess_after(vm)

    def _on_hour(self, event: SimEvent) -> None:
        pass  # marker event; metrics bin by arrival time

    def _on_end(self, event: SimEvent) -> None:
        pass

    # -- driving -----------------------------------------------------------

    def prepare(self, tasks: list[Task],
                schedule: list[tuple[float, int]]) -> None:
        """Wire handlers and schedule all batch arrivals.

        Tasks must be ordered by batch, ids 0..n-1, with arrival times
        matching the schedule.
        """
        for t in tasks:
            t.reset()
        self.tasks = tasks
        self.records = []
        self.task_alpha = np.array(
            [demand_fraction(t.length_mi, self.bounds) for t in tasks])
        if self.balancer == "throttled":
            self._avail_heap = list(range(self.n_vms))
        if self._ps:
            n = len(tasks)
            self.vm_tasks = [dict() for _ in range(self.n_vms)]
            self.remaining = np.zeros(n)
            self.rate = np.zeros(n)
            self.version = np.zeros(n, dtype=np.int64)
            self.vm_last = np.zeros(self.n_vms)

        self.sim = Simulator(trace=self.trace)
        self.sim.register(EventKind.BATCH_ARRIVAL, self._on_batch)
        self.sim.register(EventKind.TASK_COMPLETION, self._on_completion)
        self.sim.register(EventKind.HOUR_BOUNDARY, self._on_hour)
        self.sim.register(EventKind.SIMULATION_END, self._on_end)
        offset = 0
        for time, count in schedule:
            self.sim.schedule(time, EventKind.BATCH_ARRIVAL, (offset, count))
            offset += count
        if offset != len(tasks):
            raise ValueError("schedule task count does not match task stream")
        if self.hourly:
            for h in range(1, 25):
                self.sim.schedule(h * HOUR_SEC, EventKind.HOUR_BOUNDARY, h)
        if self.until is not None:
            self.sim.schedule(self.until, EventKind.SIMULATION_END, None)

    def run(self, tasks: list[Task],
            schedule: list[tuple[float, int]]) -> RunResult:
        self.prepare(tasks, schedule)
        processed = self.sim.run(until=self.until)
        self.validate()
        unfinished = sum(1 for t in self.tasks if t.finish is None)
        return RunResult(records=self.records, unfinished=unfinished,
                         events_processed=processed)

    # -- invariants and mirrors -------------------------------------------

    def validate(self) -> None:
        """Conservation, bounds, and threshold checks over the whole fleet."""
        expected = self.cap.copy()
        counts = np.zeros(self.n_vms, dtype=np.int64)
        for vm, demand in self.in_flight.values():
            expected[vm] -= demand
            counts[vm] += 1
        if not np.allclose(self.avail, expected, rtol=1e-9, atol=1e-6):
            raise SimulationError("capacity - available != sum of active demands")
        if not (counts == self.active).all():
            raise SimulationError("active task counts out of sync")
        if (self.active > self._max_active()).any():
            raise SimulationError("task threshold exceeded")
        if ((self.avail < -1e-6) | (self.avail > self.cap + 1e-6)).any():
            raise SimulationError("available resources out of [0, capacity]")

    def vm_states(self) -> list[VmState]:
        """Object-model mirror of the current fleet (for cross-checks)."""
        states = [VmState(vm_id=i, dc_id=int(self.dc_of[i]), spec=self.specs[i])
                  for i in range(self.n_vms)]
        for task_id, (vm, demand) in self.in_flight.items():
            states[vm].per_task_demand[task_id] = cloud.ResourceVector(
                float(demand[0]), float(demand[1]), float(demand[2]))
        return states


def make_trace_writer(fileobj) -> Callable[[SimEvent], None]:
    """One line per processed event: time,seq,kind,payload."""
    def write(event: SimEvent) -> None:
        fileobj.write(f"{event.time!r},{event.seq},{event.kind.value},"
                      f"{event.payload}\n")
    return write
