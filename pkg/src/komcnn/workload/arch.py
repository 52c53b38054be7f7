"""Built-in CNN convolution-kernel inventories."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field

from ..netlist.timing import FPGA_FIELDS
from .tables import MultiplierKind, UnitCost, default_unit_costs


@dataclass(frozen=True)
class CnnArchSpec:
    name: str
    input_dims: tuple[int, int, int]
    conv_layers: int
    kernel_inventory: tuple[tuple[int, int], ...]  # (kernel size, kernel count)
    source: str = "paper"

    def __post_init__(self):
        if self.conv_layers < 1 or min(self.input_dims) < 1:
            raise ValueError(f"{self.name}: extents and layer count must be positive")
        for k, count in self.kernel_inventory:
            if k < 1 or k % 2 == 0:
                raise ValueError(f"{self.name}: kernel size {k} must be odd and positive")
            if count < 1:
                raise ValueError(f"{self.name}: kernel count for {k}x{k} must be positive")

    @property
    def total_kernels(self) -> int:
        return sum(count for _, count in self.kernel_inventory)


# Inventories as stated in the source document.  Note the VGG layer counts
# (12 and 14) differ from the usual 13 and 16; they are kept as stated.
_BUILTIN = {
    "ALEXNET": CnnArchSpec("ALEXNET", (227, 227, 3), 5, ((11, 96), (5, 256), (3, 1024))),
    "VGG16": CnnArchSpec("VGG16", (224, 224, 3), 12, ((3, 3968),)),
    "VGG19": CnnArchSpec("VGG19", (224, 224, 3), 14, ((3, 4992),)),
}


def builtin_arch(name: str) -> CnnArchSpec:
    try:
        return _BUILTIN[name.upper()]
    except KeyError:
        raise ValueError(f"unknown architecture {name!r}; expected one of "
                         f"{[n.lower() for n in _BUILTIN]}") from None


def builtin_names() -> list[str]:
    return list(_BUILTIN)


@dataclass(frozen=True)
class WorkloadRow:
    kernel_size: int
    kernel_count: int
    instances: int
    cost: dict[str, int]


@dataclass(frozen=True)
class WorkloadReport:
    arch: str
    kind: MultiplierKind
    total_kernels: int
    total_instances: int
    totals: dict[str, int]
    rows: list[WorkloadRow] = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "arch": self.arch,
            "multiplier": self.kind.value,
            "total_kernels": self.total_kernels,
            "total_instances": self.total_instances,
            "totals": dict(self.totals),
            "rows": [
                {"kernel_size": r.kernel_size, "kernel_count": r.kernel_count,
                 "instances": r.instances, **r.cost}
                for r in self.rows
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), indent=2, sort_keys=True)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["kernel", "kernel_count", "instances", *FPGA_FIELDS])
        for r in self.rows:
            writer.writerow([f"{r.kernel_size}x{r.kernel_size}", r.kernel_count, r.instances,
                             *(r.cost[f] for f in FPGA_FIELDS)])
        writer.writerow(["total", self.total_kernels, self.total_instances,
                         *(self.totals[f] for f in FPGA_FIELDS)])
        return buf.getvalue()


def workload_report(arch: CnnArchSpec, kind: MultiplierKind | str,
                    costs: dict[MultiplierKind, UnitCost] | None = None) -> WorkloadReport:
    """Multiplier instances per kernel entry (``count * k**3``) and their cost."""
    kind = kind if isinstance(kind, MultiplierKind) else MultiplierKind.parse(kind)
    unit = (costs or default_unit_costs())[kind]
    rows = []
    for k, count in arch.kernel_inventory:
        instances = count * k ** 3
        rows.append(WorkloadRow(k, count, instances, unit.scaled(instances)))
    totals = {f: sum(r.cost[f] for r in rows) for f in FPGA_FIELDS}
    return WorkloadReport(arch.name, kind, arch.total_kernels,
                          sum(r.instances for r in rows), totals, rows)
