"""Performance metrics over completed-task records.

Three headline metrics: mean response time (arrival to finish, queue
wait included), per-data-center processing time (last finish minus first
start), and operating cost (processing time times the CPU cost rate).
All computation is in seconds; CSV output reports times in milliseconds.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .cloud import CostRates
from .workload import Task

TaskRecord = Task  # a Task with start/finish/vm_id/dc_id populated


class EmptyRecordSet(Exception):
    pass


class NoTasksForDc(Exception):
    pass


@dataclass(frozen=True)
class DcRecord:
    dc_id: int
    first_start: float
    last_finish: float
    processing_time: float
    cost: float


@dataclass(frozen=True)
class HourlySummary:
    hour: int
    tasks: int
    avg_response_sec: Optional[float]
    dc_processing_sec: Optional[float]  # mean over DCs active in the hour
    cost: Optional[float]


@dataclass(frozen=True)
class RunSummary:
    avg_response_sec: float
    per_dc: tuple[DcRecord, ...]
    avg_dc_processing_sec: float
    total_cost: float
    task_count: int
    unfinished: int = 0
    hourly: Optional[tuple[HourlySummary, ...]] = None


def avg_response_time(records: Iterable[TaskRecord]) -> float:
    records = list(records)
    if not records:
        raise EmptyRecordSet("no completed tasks")
    return sum(r.finish - r.arrival for r in records) / len(records)


def dc_processing_time(records: Iterable[TaskRecord], dc_id: int) -> float:
    starts, finishes = [], []
    for r in records:
        if r.dc_id == dc_id:
            starts.append(r.start)
            finishes.append(r.finish)
    if not starts:
        raise NoTasksForDc(f"no tasks ran in dc {dc_id}")
    return max(finishes) - min(starts)


def dc_operating_cost(processing_time: float, rates: CostRates) -> float:
    if processing_time < 0:
        raise ValueError("processing_time must be >= 0")
    return processing_time * rates.cpu_per_sec


def summarize(records: list[TaskRecord], rates: CostRates = CostRates(),
              unfinished: int = 0,
              hour_length_sec: Optional[float] = None) -> RunSummary:
    """Full run summary; pass hour_length_sec to add hourly breakdowns."""
    if not records:
        raise EmptyRecordSet("no completed tasks")
    dc_ids = sorted({r.dc_id for r in records})
    per_dc = []
    for dc_id in dc_ids:
        t = dc_processing_time(records, dc_id)
        per_dc.append(DcRecord(dc_id=dc_id,
                               first_start=min(r.start for r in records
                                               if r.dc_id == dc_id),
                               last_finish=max(r.finish for r in records
                                               if r.dc_id == dc_id),
                               processing_time=t,
                               cost=dc_operating_cost(t, rates)))
    hourly = None
    if hour_length_sec is not None:
        hourly = tuple(hourly_breakdown(records, hour_length_sec, rates))
    return RunSummary(
        avg_response_sec=avg_response_time(records),
        per_dc=tuple(per_dc),
        avg_dc_processing_sec=sum(d.processing_time for d in per_dc) / len(per_dc),
        total_cost=sum(d.cost for d in per_dc),
        task_count=len(records),
        unfinished=unfinished,
        hourly=hourly,
    )


def hourly_breakdown(records: list[TaskRecord], hour_length_sec: float,
                     rates: CostRates = CostRates()) -> list[HourlySummary]:
    """Bin tasks by arrival hour; per-hour DC processing time clips task
    start/finish to the hour window so long tasks do not double-count."""
    if hour_length_sec <= 0:
        raise ValueError("hour_length_sec must be > 0")
    bins: dict[int, list[TaskRecord]] = {}
    for r in records:
        bins.setdefault(int(r.arrival // hour_length_sec), []).append(r)
    out = []
    for hour in range(max(bins) + 1 if bins else 0):
        members = bins.get(hour, [])
        if not members:
            out.append(HourlySummary(hour, 0, None, None, None))
            continue
        h0, h1 = hour * hour_length_sec, (hour + 1) * hour_length_sec
        per_dc_times = []
        for dc_id in sorted({r.dc_id for r in members}):
            starts = [min(max(r.start, h0), h1) for r in members if r.dc_id == dc_id]
            ends = [min(max(r.finish, h0), h1) for r in members if r.dc_id == dc_id]
            per_dc_times.append(max(ends) - min(starts))
        mean_proc = sum(per_dc_times) / len(per_dc_times)
        cost = sum(dc_operating_cost(t, rates) for t in per_dc_times)
        out.append(HourlySummary(hour=hour, tasks=len(members),
                                 avg_response_sec=avg_response_time(members),
                                 dc_processing_sec=mean_proc, cost=cost))
    return out


TASKS_HEADER = ["task_id", "category", "length_mi", "vm_id", "dc_id",
                "arrival_s", "start_s", "finish_s", "response_ms"]
SUMMARY_HEADER = ["run_id", "balancer", "dcs", "vms_per_dc", "tasks",
                  "avg_response_ms", "avg_dc_processing_ms", "total_cost_usd",
                  "unfinished"]
HOURLY_HEADER = ["run_id", "hour", "tasks", "avg_response_ms",
                 "dc_processing_ms", "cost_usd"]
VM_ALLOCATION_HEADER = ["run_id", "balancer", "dc_id", "vm_id", "tier", "tasks"]
STATS_HEADER = ["metric", "balancer_a", "balancer_b", "n", "t", "df",
                "p_two_sided", "improvement_pct"]


def _fmt(x: float) -> str:
    return f"{x:.6f}"


def write_tasks_csv(path, records: list[TaskRecord]) -> None:
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(TASKS_HEADER)
        for r in records:
            w.writerow([r.task_id, r.category, _fmt(r.length_mi), r.vm_id, r.dc_id,
                        _fmt(r.arrival), _fmt(r.start), _fmt(r.finish),
                        _fmt((r.finish - r.arrival) * 1000.0)])


def summary_row(run_id: str, balancer: str, dcs: int, vms_per_dc: int,
                summary: RunSummary) -> list:
    return [run_id, balancer, dcs, vms_per_dc, summary.task_count,
            _fmt(summary.avg_response_sec * 1000.0),
            _fmt(summary.avg_dc_processing_sec * 1000.0),
            _fmt(summary.total_cost),
            summary.unfinished]


def write_summary_csv(path, rows: list[list]) -> None:
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(SUMMARY_HEADER)
        w.writerows(rows)


def write_hourly_csv(path, rows: list[list]) -> None:
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(HOURLY_HEADER)
        w.writerows(rows)


def hourly_rows(run_id: str, summary: RunSummary) -> list[list]:
    rows = []
    for h in summary.hourly or ():
        if h.tasks == 0:
            rows.append([run_id, h.hour, 0, "", "", ""])
        else:
            rows.append([run_id, h.hour, h.tasks,
                         _fmt(h.avg_response_sec * 1000.0),
                         _fmt(h.dc_processing_sec * 1000.0),
                         _fmt(h.cost)])
    return rows


def write_vm_allocation_csv(path, rows: list[list]) -> None:
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(VM_ALLOCATION_HEADER)
        w.writerows(rows)


def write_stats_csv(path, rows: list[list]) -> None:
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(STATS_HEADER)
        w.writerows(rows)
