"""Task stream generation.

Three task categories (Reels, Images, Text) with byte-size and
computational-intensity ranges; task length in million instructions is
size_bytes * ci / 1e6.  Batches arrive on a fixed-interval schedule or on
a 24-hour peak/non-peak plan with per-hour random batch sizes and counts.

All sampling goes through an explicit numpy Generator, so a fixed seed
reproduces the identical stream.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

MI_DIVISOR = 1e6  # instructions per MI; MB = 1e6 bytes, KB = 1e3 bytes


@dataclass(frozen=True)
class TaskCategory:
    name: str
    size_range_bytes: tuple[int, int]
    ci_range: tuple[float, float]  # instructions per byte
    share: float

    def mi_bounds(self) -> tuple[float, float]:
        lo = self.size_range_bytes[0] * self.ci_range[0] / MI_DIVISOR
        hi = self.size_range_bytes[1] * self.ci_range[1] / MI_DIVISOR
        return lo, hi


REELS = TaskCategory("Reels", (10_000_000, 1_000_000_000), (1000.0, 10000.0), 0.60)
IMAGES = TaskCategory("Images", (1_000_000, 30_000_000), (500.0, 1000.0), 0.30)
TEXT = TaskCategory("Text", (10_000, 100_000), (10.0, 100.0), 0.10)

DEFAULT_CATEGORIES = (REELS, IMAGES, TEXT)


def validate_categories(categories: tuple[TaskCategory, ...]) -> None:
    total = sum(c.share for c in categories)
    if abs(total - 1.0) > 1e-9:
        raise ValueError(f"category shares must sum to 1, got {total}")


def global_mi_bounds(categories: tuple[TaskCategory, ...] = DEFAULT_CATEGORIES
                     ) -> tuple[float, float]:
    bounds = [c.mi_bounds() for c in categories]
    return min(b[0] for b in bounds), max(b[1] for b in bounds)


def compute_mi(size_bytes: int, ci: float) -> float:
    """Task length in million instructions."""
    if size_bytes <= 0 or ci <= 0:
        raise ValueError("size_bytes and ci must be > 0")
    return size_bytes * ci / MI_DIVISOR


@dataclass(slots=True)
class Task:
    task_id: int
    category: str
    size_bytes: int
    ci: float
    length_mi: float
    arrival: float
    start: Optional[float] = None
    finish: Optional[float] = None
    vm_id: Optional[int] = None
    dc_id: Optional[int] = None

    def reset(self) -> None:
        """Clear scheduling state so the same stream can be re-run."""
        self.start = None
        self.finish = None
        self.vm_id = None
        self.dc_id = None


def sample_task(rng: np.random.Generator, task_id: int, arrival: float,
                categories: tuple[TaskCategory, ...] = DEFAULT_CATEGORIES,
                log_uniform_sizes: bool = False) -> Task:
    """Draw one task: category by share, size and CI uniform in range."""
    shares = [c.share for c in categories]
    cat = categories[rng.choice(len(categories), p=shares)]
    if log_uniform_sizes:
        lo, hi = cat.size_range_bytes
        size = int(round(math.exp(rng.uniform(math.log(lo), math.log(hi)))))
    else:
        size = int(rng.integers(cat.size_range_bytes[0], cat.size_range_bytes[1] + 1))
    ci = float(rng.uniform(cat.ci_range[0], cat.ci_range[1]))
    return Task(task_id=task_id, category=cat.name, size_bytes=size, ci=ci,
                length_mi=compute_mi(size, ci), arrival=arrival)


def sample_tasks(rng: np.random.Generator, n: int, arrivals: np.ndarray,
                 categories: tuple[TaskCategory, ...] = DEFAULT_CATEGORIES,
                 first_task_id: int = 0,
                 log_uniform_sizes: bool = False) -> list[Task]:
    """Vectorized batch version of sample_task (same distributions)."""
    validate_categories(categories)
    shares = [c.share for c in categories]
    cat_idx = rng.choice(len(categories), size=n, p=shares)
    sizes = np.empty(n, dtype=np.int64)
    cis = np.empty(n, dtype=np.float64)
    for k, cat in enumerate(categories):
        mask = cat_idx == k
        m = int(mask.sum())
        if m == 0:
            continue
        if log_uniform_sizes:
            lo, hi = cat.size_range_bytes
            sizes[mask] = np.round(np.exp(
                rng.uniform(math.log(lo), math.log(hi), size=m))).astype(np.int64)
        else:
            sizes[mask] = rng.integers(cat.size_range_bytes[0],
                                       cat.size_range_bytes[1] + 1, size=m)
        cis[mask] = rng.uniform(cat.ci_range[0], cat.ci_range[1], size=m)
    tasks = []
    for i in range(n):
        size = int(sizes[i])
        ci = float(cis[i])
        tasks.append(Task(task_id=first_task_id + i,
                          category=categories[cat_idx[i]].name,
                          size_bytes=size, ci=ci,
                          length_mi=compute_mi(size, ci),
                          arrival=float(arrivals[i])))
    return tasks


DEFAULT_BATCH_INTERVAL_SEC = 1.0


@dataclass(frozen=True)
class BatchPlan:
    batch_count: int
    batch_size: int
    inter_batch_interval_sec: float = DEFAULT_BATCH_INTERVAL_SEC

    def __post_init__(self) -> None:
        if self.batch_count <= 0 or self.batch_size <= 0:
            raise ValueError("batch_count and batch_size must be > 0")
        if self.inter_batch_interval_sec <= 0:
            raise ValueError("inter_batch_interval_sec must be > 0")


def build_batch_schedule(plan: BatchPlan) -> list[tuple[float, int]]:
    """(arrival time, task count) per batch; batch i arrives at i * interval."""
    return [(i * plan.inter_batch_interval_sec, plan.batch_size)
            for i in range(plan.batch_count)]


PEAK_HOURS = frozenset({8, 9, 10, 13, 14, 17, 18, 19, 20, 21, 22})
PEAK_BATCH_SIZES = (5000, 5500, 6000)
PEAK_BATCH_COUNTS = (18, 19, 20)
NONPEAK_BATCH_SIZES = (3000, 3500, 4000)
NONPEAK_BATCH_COUNTS = (9, 10, 11)
HOUR_SEC = 3600.0


@dataclass(frozen=True)
class HourPlan:
    hour: int
    hour_type: str  # "Peak" or "NonPeak"
    batch_size: int
    total_batches: int


@dataclass(frozen=True)
class DiurnalPlan:
    hours: tuple[HourPlan, ...]

    def __post_init__(self) -> None:
        if len(self.hours) != 24:
            raise ValueError("diurnal plan must cover 24 hours")


def build_diurnal_plan(rng: np.random.Generator, scale: float = 1.0) -> DiurnalPlan:
    """Per-hour batch size and count, drawn uniformly from the hour-type sets.

    scale shrinks batch sizes (not counts) for desk-scale runs, so the
    diurnal shape is preserved.
    """
    if not 0 < scale <= 1:
        raise ValueError("scale must be in (0, 1]")
    hours = []
    for h in range(24):
        if h in PEAK_HOURS:
            size = int(rng.choice(PEAK_BATCH_SIZES))
            count = int(rng.choice(PEAK_BATCH_COUNTS))
            hour_type = "Peak"
        else:
            size = int(rng.choice(NONPEAK_BATCH_SIZES))
            count = int(rng.choice(NONPEAK_BATCH_COUNTS))
            hour_type = "NonPeak"
        hours.append(HourPlan(hour=h, hour_type=hour_type,
                              batch_size=max(1, round(size * scale)),
                              total_batches=count))
    return DiurnalPlan(hours=tuple(hours))


def build_diurnal_schedule(plan: DiurnalPlan) -> list[tuple[float, int]]:
    """Batches evenly spaced within each hour."""
    schedule = []
    for hp in plan.hours:
        spacing = HOUR_SEC / hp.total_batches
        for b in range(hp.total_batches):
            schedule.append((hp.hour * HOUR_SEC + b * spacing, hp.batch_size))
    return schedule


def generate_stream(seed: int, schedule: list[tuple[float, int]],
                    categories: tuple[TaskCategory, ...] = DEFAULT_CATEGORIES,
                    log_uniform_sizes: bool = False) -> list[Task]:
    """Full task stream for a batch schedule; all tasks in a batch share
    the batch arrival time."""
    rng = np.random.default_rng(seed)
    arrivals = np.concatenate([np.full(count, t) for t, count in schedule]) \
        if schedule else np.empty(0)
    n = int(sum(count for _, count in schedule))
    return sample_tasks(rng, n, arrivals, categories=categories,
                        log_uniform_sizes=log_uniform_sizes)


def stream_digest(tasks: list[Task]) -> str:
    """Content hash of a task stream (identity check across balancer runs)."""
    h = hashlib.sha256()
    for t in tasks:
        h.update(f"{t.task_id},{t.category},{t.size_bytes},{t.ci!r},{t.arrival!r}\n"
                 .encode())
    return h.hexdigest()
