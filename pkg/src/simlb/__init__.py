"""Deterministic simulator of score-based vs throttled cloud load balancing."""

__version__ = "0.1.0"

from .balancers import (Assign, ENQUEUE, Enqueue, NormalizationBounds,
                        normalize_demand, sbdlb_score, sbdlb_select)
from .cloud import (CostRates, DataCenter, HostSpec, ResourceVector, VmSpec,
                    VmState, HIGH_SPEC, LOW_SPEC)
from .engine import CloudSimulation, RunResult, SimulationError
from .kernel import EventKind, EventQueue, SimEvent, Simulator
from .runner import ScenarioConfig, run_scenario
from .workload import Task, TaskCategory, compute_mi

__all__ = [
    "Assign", "ENQUEUE", "Enqueue", "NormalizationBounds", "normalize_demand",
    "sbdlb_score", "sbdlb_select", "CostRates", "DataCenter", "HostSpec",
    "ResourceVector", "VmSpec", "VmState", "HIGH_SPEC", "LOW_SPEC",
    "CloudSimulation", "RunResult", "SimulationError", "EventKind",
    "EventQueue", "SimEvent", "Simulator", "ScenarioConfig", "run_scenario",
    "Task", "TaskCategory", "compute_mi",
]
