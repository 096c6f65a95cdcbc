"""Domain model of data centers, hosts, and VMs.

Resource accounting is exact: a VM stores the demand vector of every
active task, and its available vector is derived as capacity minus the
sum of stored demands, so allocate/release round-trips restore capacity
bit-exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional


class InsufficientResources(Exception):
    pass


class ThresholdExceeded(Exception):
    pass


class UnknownTask(Exception):
    pass


class PlacementFailure(Exception):
    pass


@dataclass(frozen=True)
class CostRates:
    """Per-unit operating cost rates; the headline cost metric uses only
    cpu_per_sec, the others feed the optional extended cost line."""

    cpu_per_sec: float = 3.0
    ram_per_mb: float = 0.004
    bw_per_mbps: float = 0.01
    storage_per_mb: float = 0.0001

    def __post_init__(self) -> None:
        for name in ("cpu_per_sec", "ram_per_mb", "bw_per_mbps", "storage_per_mb"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")


@dataclass(frozen=True)
class HostSpec:
    ram_mb: int
    storage_gb: int
    bw_mbps: int
    cores: int

    def __post_init__(self) -> None:
        for name in ("ram_mb", "storage_gb", "bw_mbps", "cores"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be > 0")


TYPE1_HOST = HostSpec(ram_mb=1024, storage_gb=10, bw_mbps=1000, cores=4)
TYPE2_HOST = HostSpec(ram_mb=2048, storage_gb=20, bw_mbps=2000, cores=8)


@dataclass(frozen=True)
class VmSpec:
    mips_per_core: float
    cores: int
    ram_mb: int
    bw_mbps: int
    storage_gb: int
    tier: str  # "low" or "high"

    def __post_init__(self) -> None:
        for name in ("mips_per_core", "cores", "ram_mb", "bw_mbps", "storage_gb"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be > 0")
        if self.tier not in ("low", "high"):
            raise ValueError("tier must be 'low' or 'high'")


LOW_SPEC = VmSpec(mips_per_core=500, cores=1, ram_mb=1024, bw_mbps=1000,
                  storage_gb=10, tier="low")
HIGH_SPEC = VmSpec(mips_per_core=1000, cores=2, ram_mb=2048, bw_mbps=2000,
                   storage_gb=20, tier="high")


@dataclass(frozen=True)
class ResourceVector:
    mips: float
    ram_mb: float
    bw_mbps: float

    def __add__(self, other: "ResourceVector") -> "ResourceVector":
        return ResourceVector(self.mips + other.mips,
                              self.ram_mb + other.ram_mb,
                              self.bw_mbps + other.bw_mbps)

    def __sub__(self, other: "ResourceVector") -> "ResourceVector":
        return ResourceVector(self.mips - other.mips,
                              self.ram_mb - other.ram_mb,
                              self.bw_mbps - other.bw_mbps)

    def fits_within(self, other: "ResourceVector") -> bool:
        """Componentwise self <= other."""
        return (self.mips <= other.mips
                and self.ram_mb <= other.ram_mb
                and self.bw_mbps <= other.bw_mbps)

    def total(self) -> float:
        return self.mips + self.ram_mb + self.bw_mbps

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.mips, self.ram_mb, self.bw_mbps)


ZERO_RESOURCES = ResourceVector(0.0, 0.0, 0.0)


def total_capacity(spec: VmSpec) -> ResourceVector:
    """Aggregate VM capacity: total MIPS is per-core MIPS times core count."""
    return ResourceVector(spec.mips_per_core * spec.cores,
                          float(spec.ram_mb), float(spec.bw_mbps))


@dataclass
class VmState:
    """A VM with exact per-task demand bookkeeping.

    available is derived, never stored, so conservation
    (capacity - available == sum of demands) holds by construction.
    """

    vm_id: int
    dc_id: int
    spec: VmSpec
    per_task_demand: dict[int, ResourceVector] = field(default_factory=dict)

    @property
    def capacity(self) -> ResourceVector:
        return total_capacity(self.spec)

    @property
    def available(self) -> ResourceVector:
        avail = self.capacity
        for demand in self.per_task_demand.values():
            avail = avail - demand
        return avail

    @property
    def active_tasks(self) -> int:
        return len(self.per_task_demand)

    def allocate(self, task_id: int, demand: ResourceVector,
                 max_active: Optional[int] = None) -> None:
        if max_active is not None and self.active_tasks >= max_active:
            raise ThresholdExceeded(
                f"vm {self.vm_id} already runs {self.active_tasks} tasks")
        if not demand.fits_within(self.available):
            raise InsufficientResources(
                f"vm {self.vm_id}: demand {demand} exceeds available {self.available}")
        if task_id in self.per_task_demand:
            raise ValueError(f"task {task_id} already allocated on vm {self.vm_id}")
        self.per_task_demand[task_id] = demand

    def release(self, task_id: int) -> ResourceVector:
        try:
            return self.per_task_demand.pop(task_id)
        except KeyError:
            raise UnknownTask(f"task {task_id} not running on vm {self.vm_id}") from None


@dataclass
class DataCenter:
    dc_id: int
    cost_rates: CostRates
    hosts: list[HostSpec]
    vms: list[VmState]


def place_vms(hosts: list[HostSpec], vm_specs: list[VmSpec]) -> list[int]:
    """First-fit placement of VMs onto hosts by host index.

    A VM fits a host when the host's remaining cores and RAM cover the
    VM's cores and RAM.  Returns the host index for each VM.
    """
    free_cores = [h.cores for h in hosts]
    free_ram = [h.ram_mb for h in hosts]
    placement = []
    for i, spec in enumerate(vm_specs):
        for h in range(len(hosts)):
            if free_cores[h] >= spec.cores and free_ram[h] >= spec.ram_mb:
                free_cores[h] -= spec.cores
                free_ram[h] -= spec.ram_mb
                placement.append(h)
                break
        else:
            raise PlacementFailure(f"vm {i} ({spec.tier}) does not fit any host")
    return placement


def provision_hosts(vm_specs: list[VmSpec]) -> list[HostSpec]:
    """Smallest mixed set of Type-1/Type-2 hosts that first-fits the VMs.

    Greedy: walk the VMs in order, and whenever the current host pool
    cannot take the next VM, add the smallest host type that can.
    """
    hosts: list[HostSpec] = []
    free_cores: list[int] = []
    free_ram: list[int] = []
    for spec in vm_specs:
        placed = False
        for h in range(len(hosts)):
            if free_cores[h] >= spec.cores and free_ram[h] >= spec.ram_mb:
                free_cores[h] -= spec.cores
                free_ram[h] -= spec.ram_mb
                placed = True
                break
        if not placed:
            host = TYPE1_HOST
            if spec.cores > host.cores or spec.ram_mb > host.ram_mb:
                host = TYPE2_HOST
            if spec.cores > host.cores or spec.ram_mb > host.ram_mb:
                raise PlacementFailure(f"vm spec {spec} fits no host type")
            hosts.append(host)
            free_cores.append(host.cores - spec.cores)
            free_ram.append(host.ram_mb - spec.ram_mb)
    return hosts


def build_datacenter(dc_id: int, vm_specs: list[VmSpec],
                     cost_rates: CostRates = CostRates(),
                     first_vm_id: int = 0) -> DataCenter:
    hosts = provision_hosts(vm_specs)
    place_vms(hosts, vm_specs)  # sanity: provisioning must admit first-fit
    vms = [VmState(vm_id=first_vm_id + i, dc_id=dc_id, spec=spec)
           for i, spec in enumerate(vm_specs)]
    return DataCenter(dc_id=dc_id, cost_rates=cost_rates, hosts=hosts, vms=vms)


def alternating_tier_specs(count: int) -> list[VmSpec]:
    """50/50 low/high VM mix, alternating by id (low first)."""
    return [LOW_SPEC if i % 2 == 0 else HIGH_SPEC for i in range(count)]
