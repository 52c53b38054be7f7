"""Netlist data model: bit vectors, primitive gates, pipeline registers and
structural validation.

Wires are plain strings.  Bit ``i`` of a port named ``X`` is the wire
``X[i]`` (index 0 is the least significant bit).  Two reserved wires,
:data:`CONST0` and :data:`CONST1`, are always driven and carry constant
values.  Pipeline registers are ideal D flip-flops tagged with the register
rank they belong to; rank ``k`` separates logic segment ``k - 1`` from
segment ``k``.  ``stage_count`` is the number of register ranks, which is
also the latency of the circuit in clock cycles.
"""

from __future__ import annotations

import enum
from collections import Counter, defaultdict, deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Sequence

CONST0 = "1'b0"
CONST1 = "1'b1"
CONSTANTS = (CONST0, CONST1)


class NetlistError(ValueError):
    """Raised when a netlist is malformed or used outside its contract."""

    def __init__(self, message: str, defects: Sequence["Defect"] = ()):
        super().__init__(message)
        self.defects = list(defects)


class GateKind(str, enum.Enum):
    AND = "AND"
    OR = "OR"
    XOR = "XOR"
    NOT = "NOT"
    NAND = "NAND"
    XNOR = "XNOR"

    @property
    def arity(self) -> int:
        return 1 if self is GateKind.NOT else 2


def bus_wire(bus: str, index: int) -> str:
    return f"{bus}[{index}]"


@dataclass(frozen=True)
class BitVec:
    """Fixed-width bit vector, LSB first."""

    width: int
    bits: tuple[bool, ...]

    def __post_init__(self):
        if self.width < 1:
            raise ValueError(f"width must be positive, got {self.width}")
        if len(self.bits) != self.width:
            raise ValueError(f"{len(self.bits)} bits given for width {self.width}")

    @classmethod
    def from_int(cls, value: int, width: int) -> "BitVec":
        """Build from an unsigned value, or a negative value in two's complement."""
        if width < 1 or not -(1 << (width - 1)) <= value < (1 << width):
            raise ValueError(f"{value} does not fit in {width} bits")
        if value < 0:
            value += 1 << width
        return cls(width, tuple(bool((value >> i) & 1) for i in range(width)))

    @classmethod
    def from_signed(cls, value: int, width: int) -> "BitVec":
        if not -(1 << (width - 1)) <= value < (1 << (width - 1)):
            raise ValueError(f"{value} does not fit in {width}-bit two's complement")
        return cls.from_int(value, width)

    def to_unsigned(self) -> int:
        return sum(1 << i for i, b in enumerate(self.bits) if b)

    def to_signed(self) -> int:
        value = self.to_unsigned()
        if self.bits[-1]:
            value -= 1 << self.width
        return value

    def __int__(self) -> int:
        return self.to_unsigned()

    def __str__(self) -> str:
        return "".join("1" if b else "0" for b in reversed(self.bits))


@dataclass(frozen=True)
class Port:
    name: str
    width: int

    @property
    def wires(self) -> list[str]:
        return [bus_wire(self.name, i) for i in range(self.width)]


@dataclass(frozen=True)
class Gate:
    id: str
    kind: GateKind
    inputs: tuple[str, ...]
    output: str


@dataclass(frozen=True)
class Register:
    input: str
    output: str
    stage: int


@dataclass(frozen=True)
class Defect:
    code: str
    message: str
    where: str = ""

    def __str__(self) -> str:
        return f"{self.message} ({self.where})" if self.where else self.message


@dataclass(frozen=True, eq=False)
class Netlist:
    """Immutable staged gate-level circuit.

    ``markers`` optionally maps gate ids to the logic segment a generator
    wants them in; :func:`komcnn.netlist.pipeline.insert_pipeline` consumes
    it.  Markers are build-time metadata and are not part of the interchange
    format.
    """

    name: str
    inputs: tuple[Port, ...]
    outputs: tuple[Port, ...]
    gates: tuple[Gate, ...]
    registers: tuple[Register, ...] = ()
    markers: Mapping[str, int] = field(default_factory=dict)

    @property
    def stage_count(self) -> int:
        return max((r.stage for r in self.registers), default=0)

    @property
    def is_combinational(self) -> bool:
        return not self.registers

    def input_port(self, name: str) -> Port:
        for p in self.inputs:
            if p.name == name:
                return p
        raise KeyError(name)

    def output_port(self, name: str) -> Port:
        for p in self.outputs:
            if p.name == name:
                return p
        raise KeyError(name)

    @cached_property
    def input_wires(self) -> frozenset[str]:
        return frozenset(w for p in self.inputs for w in p.wires)

    @cached_property
    def drivers(self) -> dict[str, Gate | Register]:
        out: dict[str, Gate | Register] = {}
        for g in self.gates:
            out.setdefault(g.output, g)
        for r in self.registers:
            out.setdefault(r.output, r)
        return out

    @cached_property
    def wire_stage(self) -> dict[str, int | None]:
        """Logic segment of every reachable wire; ``None`` for constants."""
        return _wire_stages(self)[0]

    @cached_property
    def order(self) -> tuple[Gate | Register, ...]:
        """Gates and registers in a dependency-respecting order.

        Registers are treated as ordinary nodes, so this is a single
        topological order of the whole (feed-forward) circuit.
        """
        order, leftover = _topo_order(self)
        if leftover:
            raise NetlistError(f"netlist {self.name!r} contains a cycle")
        return tuple(order)

    def check(self) -> None:
        """Raise :class:`NetlistError` unless the netlist validates."""
        if self.__dict__.get("_valid"):
            return
        defects = validate(self)
        if defects:
            raise NetlistError(
                f"netlist {self.name!r} is invalid: " + "; ".join(map(str, defects[:5])),
                defects,
            )
        self.__dict__["_valid"] = True

    def __repr__(self) -> str:
        return (
            f"Netlist({self.name!r}, gates={len(self.gates)}, "
            f"registers={len(self.registers)}, stages={self.stage_count})"
        )


def _topo_order(netlist: Netlist) -> tuple[list[Gate | Register], list[Gate | Register]]:
    nodes: list[Gate | Register] = [*netlist.gates, *netlist.registers]
    consumers: dict[str, list[int]] = defaultdict(list)
    indeg = [0] * len(nodes)
    produced = {n.output for n in nodes}
    for idx, node in enumerate(nodes):
        ins = node.inputs if isinstance(node, Gate) else (node.input,)
        for w in ins:
            if w in produced:
                consumers[w].append(idx)
                indeg[idx] += 1
    queue = deque(i for i, d in enumerate(indeg) if d == 0)
    order = []
    while queue:
        i = queue.popleft()
        order.append(nodes[i])
        for j in consumers.get(nodes[i].output, ()):
            indeg[j] -= 1
            if indeg[j] == 0:
                queue.append(j)
    seen = {id(n) for n in order}
    return order, [n for n in nodes if id(n) not in seen]


def _wire_stages(netlist: Netlist) -> tuple[dict[str, int | None], list[Defect]]:
    stage: dict[str, int | None] = {c: None for c in CONSTANTS}
    for w in netlist.input_wires:
        stage[w] = 0
    defects = []
    order, _ = _topo_order(netlist)
    for node in order:
        if isinstance(node, Register):
            src = stage.get(node.input)
            if src is not None and src != node.stage - 1:
                defects.append(Defect(
                    "stage", f"register feeding stage {node.stage} is driven from stage {src}",
                    node.output))
            stage[node.output] = node.stage
        else:
            known = {stage[w] for w in node.inputs if stage.get(w) is not None}
            if len(known) > 1:
                defects.append(Defect(
                    "stage", f"gate mixes stages {sorted(known)} without registers", node.id))
            stage[node.output] = max(known) if known else None
    return stage, defects


def validate(netlist: Netlist) -> list[Defect]:
    """Check every structural invariant; an empty list means the netlist is ok."""
    defects: list[Defect] = []

    for ports in (netlist.inputs, netlist.outputs):
        for name, n in Counter(p.name for p in ports).items():
            if n > 1:
                defects.append(Defect("port", "duplicate port name", name))
    for p in (*netlist.inputs, *netlist.outputs):
        if p.width < 1:
            defects.append(Defect("port", "port width must be positive", p.name))

    ids = Counter(g.id for g in netlist.gates)
    for gid, n in ids.items():
        if n > 1:
            defects.append(Defect("id", "duplicate gate id", gid))

    for g in netlist.gates:
        if not isinstance(g.kind, GateKind):
            defects.append(Defect("kind", f"unknown gate kind {g.kind!r}", g.id))
        elif len(g.inputs) != g.kind.arity:
            defects.append(Defect(
                "arity", f"{g.kind.value} gate needs {g.kind.arity} input(s), has {len(g.inputs)}",
                g.id))

    drive_count: Counter[str] = Counter()
    for w in netlist.input_wires:
        drive_count[w] += 1
    for c in CONSTANTS:
        drive_count[c] += 1
    for g in netlist.gates:
        drive_count[g.output] += 1
    for r in netlist.registers:
        drive_count[r.output] += 1
    for w, n in drive_count.items():
        if n > 1:
            defects.append(Defect("multi-driven", "multiply-driven wire", w))

    consumed = [(w, g.id) for g in netlist.gates for w in g.inputs]
    consumed += [(r.input, f"register->{r.output}") for r in netlist.registers]
    consumed += [(w, f"output {p.name}") for p in netlist.outputs for w in p.wires]
    for w, user in consumed:
        if w not in drive_count:
            defects.append(Defect("undriven", f"undriven wire {w}", user))

    stages = sorted({r.stage for r in netlist.registers})
    if stages and stages != list(range(1, stages[-1] + 1)):
        defects.append(Defect("stage", f"register ranks are not contiguous: {stages}"))
    if any(s < 1 for s in stages):
        defects.append(Defect("stage", "register ranks start at 1"))

    _, leftover = _topo_order(netlist)
    # Kahn leaves cycles plus everything downstream of them; peel the
    # downstream part off from the sink side.
    while True:
        fed = {w for n in leftover for w in (n.inputs if isinstance(n, Gate) else (n.input,))}
        trimmed = [n for n in leftover if n.output in fed]
        if len(trimmed) == len(leftover):
            break
        leftover = trimmed
    if leftover:
        wire_stage, _ = _wire_stages(netlist)
        by_stage: dict[int, list[str]] = defaultdict(list)
        for node in leftover:
            if isinstance(node, Register):
                s = node.stage
                label = f"register->{node.output}"
            else:
                known = [wire_stage[w] for w in node.inputs if wire_stage.get(w) is not None]
                s = min(known) if known else 0
                label = node.id
            by_stage[s].append(label)
        for s, members in sorted(by_stage.items()):
            defects.append(Defect("cycle", f"cycle in stage {s}", ", ".join(members[:8])))
        return defects

    wire_stage, stage_defects = _wire_stages(netlist)
    defects += stage_defects
    final = netlist.stage_count
    for p in netlist.outputs:
        for w in p.wires:
            s = wire_stage.get(w)
            if s is not None and s != final:
                defects.append(Defect(
                    "stage", f"output bit settles in stage {s}, expected {final}", w))
    return defects


def flatten(netlist: Netlist) -> Netlist:
    """Remove every pipeline register, splicing its input to its output.

    The result is the combinational circuit the pipeline was cut from.
    """
    if netlist.is_combinational:
        return netlist
    source = {r.output: r.input for r in netlist.registers}

    def resolve(w: str) -> str:
        while w in source:
            w = source[w]
        return w

    port_wires = {w for p in netlist.outputs for w in p.wires}
    rename: dict[str, str] = {}
    buffers: list[Gate] = []
    gate_outputs = {g.output for g in netlist.gates}
    for p in netlist.outputs:
        for w in p.wires:
            if w not in source:
                continue
            src = resolve(w)
            if src in gate_outputs and src not in rename and src not in port_wires:
                rename[src] = w
            else:
                buffers.append(Gate(f"flatten/buf{len(buffers)}", GateKind.AND, (src, src), w))

    def sub(w: str) -> str:
        w = resolve(w)
        return rename.get(w, w)

    gates = tuple(
        Gate(g.id, g.kind, tuple(sub(w) for w in g.inputs), rename.get(g.output, g.output))
        for g in netlist.gates
    )
    buffers = [Gate(b.id, b.kind, tuple(sub(w) for w in b.inputs), b.output) for b in buffers]
    return Netlist(netlist.name, netlist.inputs, netlist.outputs, gates + tuple(buffers), (),
                   dict(netlist.markers))


def instance_scopes(netlist: Netlist, component: str) -> set[str]:
    """Distinct hierarchical scopes (gate-id prefixes) ending in ``component``.

    Generators name gates ``scope/sub/.../gateN``; this recovers how many
    instances of a sub-circuit were stamped out.
    """
    found = set()
    for g in netlist.gates:
        parts = g.id.split("/")[:-1]
        for i, part in enumerate(parts):
            if part == component:
                found.add("/".join(parts[: i + 1]))
    return found


def coerce_bitvec(value: "BitVec | int", width: int, what: str) -> BitVec:
    if isinstance(value, BitVec):
        if value.width != width:
            raise NetlistError(f"{what}: width {value.width} given, port is {width} bits")
        return value
    if isinstance(value, bool) or not isinstance(value, int):
        raise NetlistError(f"{what}: expected BitVec or int, got {type(value).__name__}")
    if not 0 <= value < (1 << width):
        raise NetlistError(f"{what}: {value} does not fit in {width} unsigned bits")
    return BitVec.from_int(value, width)


def check_assignment(ports: Iterable[Port], assignment: Mapping[str, object], what: str) -> None:
    expected = {p.name for p in ports}
    given = set(assignment)
    if missing := expected - given:
        raise NetlistError(f"{what}: missing input bus(es) {sorted(missing)}")
    if extra := given - expected:
        raise NetlistError(f"{what}: unknown input bus(es) {sorted(extra)}")
