"""Static timing and structural cost of netlists."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Protocol

from .core import Gate, GateKind, Netlist, NetlistError, Register, flatten


class TimingError(NetlistError):
    pass


@dataclass(frozen=True)
class DelayTable:
    """Per-gate-kind delay in abstract units.

    The default is the unit-delay model.  Registers are ideal: zero setup
    time and zero clock-to-q.
    """

    delays: Mapping[GateKind, float] = field(
        default_factory=lambda: {k: 1 for k in GateKind})

    def __getitem__(self, kind: GateKind) -> float:
        try:
            return self.delays[kind]
        except KeyError:
            raise TimingError(f"no delay given for gate kind {kind.value}") from None

    @classmethod
    def from_mapping(cls, raw: Mapping[str, float]) -> "DelayTable":
        table = {}
        for name, value in raw.items():
            try:
                kind = GateKind(name.upper())
            except ValueError:
                raise TimingError(f"unknown gate kind {name!r} in delay table") from None
            if value < 0:
                raise TimingError(f"negative delay for {name}")
            table[kind] = value
        return cls(table)


UNIT_DELAYS = DelayTable()


@dataclass(frozen=True)
class CriticalPath:
    per_stage_delay: list[float]
    max_stage_delay: float
    total_unpipelined_delay: float
    witness_path: list[str]


def _arrivals(netlist: Netlist, delays: DelayTable, through_registers: bool) -> dict[str, float]:
    """Longest-path arrival time of every wire.

    With ``through_registers`` false a register output restarts at time 0
    (ideal flip-flop); otherwise registers act as plain wires.
    """
    arrival: dict[str, float] = {}
    for node in netlist.order:
        if isinstance(node, Register):
            arrival[node.output] = arrival.get(node.input, 0) if through_registers else 0
        else:
            arrival[node.output] = max(arrival.get(w, 0) for w in node.inputs) + delays[node.kind]
    return arrival


def _witness(netlist: Netlist, arrival: Mapping[str, float], end_gate: Gate | None) -> list[str]:
    """Walk back from ``end_gate`` along latest-arriving inputs to a stage boundary."""
    path = []
    node = end_gate
    while node is not None:
        path.append(node.id)
        nxt, best = None, -1.0
        for w in node.inputs:
            driver = netlist.drivers.get(w)
            if isinstance(driver, Gate) and arrival[w] > best:
                nxt, best = driver, arrival[w]
        node = nxt
    path.reverse()
    return path


def critical_path(netlist: Netlist, delays: DelayTable = UNIT_DELAYS) -> CriticalPath:
    """Longest delay-weighted path inside every logic segment.

    ``per_stage_delay`` has ``stage_count + 1`` entries.  The witness is the
    gate-id sequence realising ``max_stage_delay``.
    """
    netlist.check()
    for g in netlist.gates:
        delays[g.kind]
    stage_of = netlist.wire_stage
    arrival = _arrivals(netlist, delays, through_registers=False)
    per_stage = [0.0] * (netlist.stage_count + 1)
    worst: Gate | None = None
    for g in netlist.gates:
        s = stage_of.get(g.output) or 0
        t = arrival[g.output]
        if t > per_stage[s]:
            per_stage[s] = t
        if worst is None or t > arrival[worst.output]:
            worst = g
    flat_arrival = _arrivals(netlist, delays, through_registers=True)
    total = max((flat_arrival[g.output] for g in netlist.gates), default=0)
    return CriticalPath(
        per_stage_delay=per_stage,
        max_stage_delay=max(per_stage),
        total_unpipelined_delay=total,
        witness_path=_witness(netlist, arrival, worst),
    )


def stage_depths(netlist: Netlist) -> list[int]:
    """Unit-delay gate levels per logic segment."""
    return [int(d) for d in critical_path(netlist).per_stage_delay]


class UnitCostLike(Protocol):
    slice_registers: int
    slice_luts: int
    lut_ff_pairs: int
    bonded_iobs: int


@dataclass(frozen=True)
class CostReport:
    slice_registers: int
    slice_luts: int
    lut_ff_pairs: int
    bonded_iobs: int
    gate_count: int
    register_count: int
    depth: int

    def __post_init__(self):
        for name, value in self.as_dict().items():
            if not isinstance(value, int) or value < 0:
                raise ValueError(f"{name} must be a non-negative integer, got {value!r}")

    def as_dict(self) -> dict[str, int]:
        return {
            "slice_registers": self.slice_registers,
            "slice_luts": self.slice_luts,
            "lut_ff_pairs": self.lut_ff_pairs,
            "bonded_iobs": self.bonded_iobs,
            "gate_count": self.gate_count,
            "register_count": self.register_count,
            "depth": self.depth,
        }


FPGA_FIELDS = ("slice_registers", "slice_luts", "lut_ff_pairs", "bonded_iobs")


def cost_report(netlist: Netlist, model: str = "structural",
                unit_cost: UnitCostLike | None = None) -> CostReport:
    """Resource counts for a netlist.

    Structural model: one primitive gate maps to one LUT, one register to one
    slice register, a LUT-FF pair is a register whose D input comes straight
    from a gate, and every port bit is a bonded IOB.  The calibrated model
    takes the four FPGA columns from ``unit_cost`` instead; the structural
    columns are filled either way.
    """
    if model not in ("structural", "calibrated"):
        raise ValueError(f"unknown cost model {model!r}")
    if model == "calibrated" and unit_cost is None:
        raise ValueError("calibrated cost model needs a unit cost")
    netlist.check()
    gate_outputs = {g.output for g in netlist.gates}
    depth = int(critical_path(netlist).max_stage_delay)
    structural = dict(
        gate_count=len(netlist.gates),
        register_count=len(netlist.registers),
        depth=depth,
    )
    if model == "calibrated":
        fpga = {f: getattr(unit_cost, f) for f in FPGA_FIELDS}
    else:
        fpga = dict(
            slice_registers=len(netlist.registers),
            slice_luts=len(netlist.gates),
            lut_ff_pairs=sum(1 for r in netlist.registers if r.input in gate_outputs),
            bonded_iobs=sum(p.width for p in (*netlist.inputs, *netlist.outputs)),
        )
    return CostReport(**fpga, **structural)


def flattened_depth(netlist: Netlist, delays: DelayTable = UNIT_DELAYS) -> float:
    return critical_path(flatten(netlist), delays).max_stage_delay
