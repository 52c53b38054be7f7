"""Register insertion: cut a combinational netlist into pipeline stages."""

from __future__ import annotations

from typing import Mapping

from .core import CONSTANTS, Gate, Netlist, NetlistError, Register
from .timing import UNIT_DELAYS, DelayTable


class PipelineError(NetlistError):
    pass


def _stages_by_depth(netlist: Netlist, max_depth: float, delays: DelayTable) -> dict[str, int]:
    biggest = max((delays[g.kind] for g in netlist.gates), default=0)
    if max_depth < biggest:
        raise PipelineError(
            f"max depth {max_depth} is smaller than the largest single-gate delay {biggest}")
    stage: dict[str, int | None] = {c: None for c in CONSTANTS}
    local: dict[str, float] = {}
    for w in netlist.input_wires:
        stage[w], local[w] = 0, 0
    out = {}
    for g in netlist.order:
        known = [stage[w] for w in g.inputs if stage[w] is not None]
        st = max(known, default=0)
        t = max((local[w] for w in g.inputs if stage[w] == st), default=0) + delays[g.kind]
        if t > max_depth:
            st, t = st + 1, delays[g.kind]
        stage[g.output], local[g.output] = st, t
        out[g.id] = st
    return out


def _stages_by_markers(netlist: Netlist, markers: Mapping[str, int]) -> dict[str, int]:
    ids = {g.id for g in netlist.gates}
    if unknown := [m for m in markers if m not in ids]:
        raise PipelineError(f"unreachable marker(s): {unknown[:5]}")
    stage: dict[str, int | None] = {c: None for c in CONSTANTS}
    for w in netlist.input_wires:
        stage[w] = 0
    out = {}
    for g in netlist.order:
        earliest = max((stage[w] for w in g.inputs if stage[w] is not None), default=0)
        st = markers.get(g.id, earliest)
        if st < 0:
            raise PipelineError(f"negative marker on {g.id}")
        if st < earliest:
            raise PipelineError(
                f"unreachable marker: {g.id} is marked for stage {st} "
                f"but its inputs settle in stage {earliest}")
        stage[g.output] = st
        out[g.id] = st
    return out


def insert_pipeline(netlist: Netlist, max_depth: float | None = None, *,
                    delays: DelayTable = UNIT_DELAYS,
                    markers: Mapping[str, int] | None = None) -> Netlist:
    """Return a pipelined copy of a combinational netlist.

    With ``max_depth`` every logic segment's longest path is kept within
    ``max_depth`` under ``delays`` (a greedy as-soon-as-possible cut).
    Otherwise gates are placed in the segment named by ``markers``, falling
    back to the netlist's own generator markers; unmarked gates go to the
    earliest segment their inputs allow.  Signals crossing several segments,
    and outputs settling early, are carried through register chains so that
    every output has the same latency.
    """
    if not netlist.is_combinational:
        raise PipelineError(f"netlist {netlist.name!r} is already pipelined")
    netlist.check()
    if max_depth is not None:
        gate_stage = _stages_by_depth(netlist, max_depth, delays)
    else:
        markers = netlist.markers if markers is None else markers
        if not markers:
            raise PipelineError(f"netlist {netlist.name!r} carries no stage markers")
        gate_stage = _stages_by_markers(netlist, markers)

    wire_stage: dict[str, int] = {w: 0 for w in netlist.input_wires}
    for g in netlist.gates:
        wire_stage[g.output] = gate_stage[g.id]
    port_wires = [w for p in netlist.outputs for w in p.wires]
    last = max([gate_stage[g] for g in gate_stage] + [wire_stage.get(w, 0) for w in port_wires],
               default=0)

    # Output bits settling before the last segment get an internal name and a
    # register chain whose final register drives the port wire.
    rename: dict[str, str] = {}
    for w in port_wires:
        s = wire_stage.get(w)
        if s is None or s == last:
            continue
        if w in netlist.input_wires:
            raise PipelineError(f"output {w} is a primary input and cannot be delayed")
        rename[w] = f"{w}@s{s}"
        wire_stage[rename[w]] = s

    registers: list[Register] = []
    copies: dict[tuple[str, int], str] = {}

    def at(w: str, t: int) -> str:
        if w in CONSTANTS:
            return w
        s = wire_stage[w]
        if t == s:
            return w
        key = (w, t)
        if key not in copies:
            prev = at(w, t - 1)
            copies[key] = f"{w}@{t}"
            registers.append(Register(prev, copies[key], t))
        return copies[key]

    gates = []
    for g in netlist.gates:
        st = gate_stage[g.id]
        ins = tuple(at(rename.get(w, w), st) for w in g.inputs)
        gates.append(Gate(g.id, g.kind, ins, rename.get(g.output, g.output)))
    for w, internal in rename.items():
        prev = at(internal, last - 1)
        registers.append(Register(prev, w, last))

    result = Netlist(netlist.name, netlist.inputs, netlist.outputs, tuple(gates),
                     tuple(sorted(registers, key=lambda r: r.stage)))
    result.check()
    return result
