"""Load-balancing decision layer.

The score-based balancer normalizes a task's MI length onto each VM's
total capacity with min-max scaling (floored so demands are never zero),
rejects VMs whose availability cannot cover the demand with a -1
sentinel, excludes VMs at the task threshold, and picks the highest
availability-sum score.  The throttled baseline assigns each task the
first available VM exclusively, one task per VM.

The wait queue is FIFO; on completion it is reassessed and every task
the active policy can now place is assigned, preserving FIFO order among
feasible tasks.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterator, Optional, Union

from .cloud import ResourceVector, VmSpec, VmState, total_capacity
from .workload import Task

DEFAULT_TASK_THRESHOLD = 3
DEFAULT_FLOOR_FRACTION = 0.05
SENTINEL = -1.0


class OutOfBounds(Exception):
    """Task MI length outside the configured normalization range."""


@dataclass(frozen=True)
class NormalizationBounds:
    mi_min: float
    mi_max: float
    floor_fraction: float = DEFAULT_FLOOR_FRACTION

    def __post_init__(self) -> None:
        if not self.mi_min < self.mi_max:
            raise ValueError("mi_min must be < mi_max")
        if not 0 <= self.floor_fraction < 1:
            raise ValueError("floor_fraction must be in [0, 1)")


def demand_fraction(length_mi: float, bounds: NormalizationBounds) -> float:
    """Fraction of a VM's total capacity a task reserves, in
    [floor_fraction, 1]; min-max scaling of the MI length."""
    if not bounds.mi_min <= length_mi <= bounds.mi_max:
        raise OutOfBounds(
            f"length {length_mi} MI outside [{bounds.mi_min}, {bounds.mi_max}]")
    frac = (length_mi - bounds.mi_min) / (bounds.mi_max - bounds.mi_min)
    return bounds.floor_fraction + frac * (1.0 - bounds.floor_fraction)


def normalize_demand(task: Task, spec: VmSpec,
                     bounds: NormalizationBounds) -> ResourceVector:
    """Map the task's MI length onto [floor * capacity, capacity] of the
    VM's total capacity, componentwise."""
    alpha = demand_fraction(task.length_mi, bounds)
    cap = total_capacity(spec)
    return ResourceVector(alpha * cap.mips, alpha * cap.ram_mb, alpha * cap.bw_mbps)


@dataclass(frozen=True)
class Assign:
    vm_id: int
    demand: ResourceVector


@dataclass(frozen=True)
class Enqueue:
    pass


ENQUEUE = Enqueue()
BalancerDecision = Union[Assign, Enqueue]


def sbdlb_score(vm: VmState, demand: ResourceVector,
                threshold: int = DEFAULT_TASK_THRESHOLD) -> Optional[float]:
    """Suitability score of one VM for a demand.

    None: excluded (at/over the task threshold, not a candidate).
    -1:   insufficient availability in some component.
    else: available.mips + available.ram_mb + available.bw_mbps.
    """
    if vm.active_tasks >= threshold:
        return None
    available = vm.available
    if not demand.fits_within(available):
        return SENTINEL
    return available.total()


def sbdlb_select(vms: list[VmState], task: Task, bounds: NormalizationBounds,
                 threshold: int = DEFAULT_TASK_THRESHOLD) -> BalancerDecision:
    """Pick the feasible VM with the highest score, ties to the lowest
    vm_id; Enqueue when every VM is excluded or infeasible."""
    best_vm: Optional[VmState] = None
    best_score = SENTINEL
    best_demand: Optional[ResourceVector] = None
    for vm in vms:
        demand = normalize_demand(task, vm.spec, bounds)
        score = sbdlb_score(vm, demand, threshold)
        if score is None or score < 0:
            continue
        if best_vm is None or score > best_score or \
                (score == best_score and vm.vm_id < best_vm.vm_id):
            best_vm, best_score, best_demand = vm, score, demand
    if best_vm is None:
        return ENQUEUE
    return Assign(best_vm.vm_id, best_demand)


class ThrottledTable:
    """Per-VM availability table for the throttled policy."""

    def __init__(self, vm_ids: list[int]) -> None:
        self.busy: dict[int, bool] = {vm_id: False for vm_id in sorted(vm_ids)}

    def first_available(self) -> Optional[int]:
        for vm_id, busy in self.busy.items():
            if not busy:
                return vm_id
        return None

    def mark_busy(self, vm_id: int) -> None:
        self.busy[vm_id] = True

    def mark_available(self, vm_id: int) -> None:
        self.busy[vm_id] = False


def throttled_select(table: ThrottledTable, vms: dict[int, VmState],
                     task: Task) -> BalancerDecision:
    """First available VM by ascending id, allocated exclusively at its
    full capacity; Enqueue when all are busy."""
    vm_id = table.first_available()
    if vm_id is None:
        return ENQUEUE
    table.mark_busy(vm_id)
    return Assign(vm_id, vms[vm_id].capacity)


def execution_duration(task: Task, demand: ResourceVector) -> float:
    """Seconds to execute: MI length over the reserved MIPS share."""
    if demand.mips <= 0:
        raise ValueError("demand.mips must be > 0")
    return task.length_mi / demand.mips


_INF = float("inf")


class WaitQueue:
    """FIFO wait queue with a fast earliest-feasible lookup.

    Each task occupies a slot in enqueue order.  Slots carry the task's
    capacity demand fraction in a min-segment tree, so 'earliest queued
    task with fraction <= headroom' is O(log n).  Plain FIFO iteration is
    also provided for scans and head-only mode.
    """

    def __init__(self, capacity_hint: int = 64) -> None:
        size = 1
        while size < max(capacity_hint, 1):
            size *= 2
        self._size = size
        self._tree = [_INF] * (2 * size)
        self._tasks: dict[int, Task] = {}  # slot -> task
        self._slot_of: dict[int, int] = {}  # task_id -> slot
        self._next_slot = 0
        self._head_slot = 0

    def __len__(self) -> int:
        return len(self._tasks)

    def __contains__(self, task_id: int) -> bool:
        return task_id in self._slot_of

    def _grow(self) -> None:
        old_leaves = self._tree[self._size:2 * self._size]
        self._size *= 2
        self._tree = [_INF] * (2 * self._size)
        self._tree[self._size:self._size + len(old_leaves)] = old_leaves
        for i in range(self._size - 1, 0, -1):
            self._tree[i] = min(self._tree[2 * i], self._tree[2 * i + 1])

    def _set(self, slot: int, value: float) -> None:
        i = slot + self._size
        self._tree[i] = value
        i //= 2
        while i:
            self._tree[i] = min(self._tree[2 * i], self._tree[2 * i + 1])
            i //= 2

    def push(self, task: Task, fraction: float = 0.0) -> int:
        if task.task_id in self._slot_of:
            raise ValueError(f"task {task.task_id} already queued")
        if self._next_slot == self._size:
            self._grow()
        slot = self._next_slot
        self._next_slot += 1
        self._tasks[slot] = task
        self._slot_of[task.task_id] = slot
        self._set(slot, fraction)
        return slot

    def remove(self, slot: int) -> Task:
        task = self._tasks.pop(slot)
        del self._slot_of[task.task_id]
        self._set(slot, _INF)
        while self._head_slot < self._next_slot and self._head_slot not in self._tasks:
            self._head_slot += 1
        return task

    def head(self) -> Optional[tuple[int, Task]]:
        if not self._tasks:
            return None
        return self._head_slot, self._tasks[self._head_slot]

    def first_fit(self, max_fraction: float) -> Optional[tuple[int, Task]]:
        """Earliest-enqueued task whose fraction is <= max_fraction."""
        if self._tree[1] > max_fraction:
            return None
        i = 1
        while i < self._size:
            i *= 2
            if self._tree[i] > max_fraction:
                i += 1
        slot = i - self._size
        return slot, self._tasks[slot]

    def items(self) -> Iterator[tuple[int, Task]]:
        """(slot, task) pairs in FIFO order."""
        for slot in sorted(self._tasks):
            yield slot, self._tasks[slot]


def reassess(queue: WaitQueue,
             select: Callable[[Task], BalancerDecision],
             mode: str = "scan") -> list[tuple[Task, Assign]]:
    """Assign queued tasks the policy can now place, in FIFO order.

    mode 'scan' walks the whole queue so small tasks are not starved by
    an infeasible giant at the head; 'head-only' stops at the first task
    that cannot be placed.
    """
    if mode not in ("scan", "head-only"):
        raise ValueError(f"unknown queue mode {mode!r}")
    assigned: list[tuple[Task, Assign]] = []
    for slot, task in list(queue.items()):
        decision = select(task)
        if isinstance(decision, Assign):
            queue.remove(slot)
            assigned.append((task, decision))
        elif mode == "head-only":
            break
    return assigned
