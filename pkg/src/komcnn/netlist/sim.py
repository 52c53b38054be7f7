"""Functional simulation of netlists.

All evaluation is bit-parallel: every wire carries a Python int whose bit
``k`` is the wire's value in lane ``k``.  A lane is either an independent
test vector (:func:`evaluate_many`) or a clock cycle
(:func:`simulate_pipelined`).  In the cycle interpretation a register is a
one-lane shift, which is exact for feed-forward pipelines because no
register output ever feeds back into its own stage.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .core import (
    CONST0,
    CONST1,
    BitVec,
    Gate,
    GateKind,
    Netlist,
    NetlistError,
    check_assignment,
    coerce_bitvec,
)

_OP_AND, _OP_OR, _OP_XOR, _OP_NOT, _OP_NAND, _OP_XNOR, _OP_REG = range(7)
_OPCODE = {
    GateKind.AND: _OP_AND,
    GateKind.OR: _OP_OR,
    GateKind.XOR: _OP_XOR,
    GateKind.NOT: _OP_NOT,
    GateKind.NAND: _OP_NAND,
    GateKind.XNOR: _OP_XNOR,
}


@dataclass(frozen=True)
class _Program:
    n_wires: int
    ops: tuple[tuple[int, int, int, int], ...]
    inputs: dict[str, list[int]]
    outputs: dict[str, list[int]]


def _compile(netlist: Netlist) -> _Program:
    # Netlists are immutable, so the compiled form is cached on the instance.
    cached = netlist.__dict__.get("_program")
    if cached is not None:
        return cached
    netlist.check()
    index: dict[str, int] = {CONST0: 0, CONST1: 1}

    def idx(w: str) -> int:
        i = index.get(w)
        if i is None:
            i = index[w] = len(index)
        return i

    inputs = {p.name: [idx(w) for w in p.wires] for p in netlist.inputs}
    ops = []
    for node in netlist.order:
        if isinstance(node, Gate):
            a = idx(node.inputs[0])
            b = idx(node.inputs[1]) if len(node.inputs) > 1 else a
            ops.append((_OPCODE[node.kind], idx(node.output), a, b))
        else:
            a = idx(node.input)
            ops.append((_OP_REG, idx(node.output), a, a))
    outputs = {p.name: [idx(w) for w in p.wires] for p in netlist.outputs}
    prog = _Program(len(index), tuple(ops), inputs, outputs)
    netlist.__dict__["_program"] = prog
    return prog


def _run(prog: _Program, planes: Mapping[str, list[int]], lanes: int, clocked: bool) -> dict[str, list[int]]:
    mask = (1 << lanes) - 1
    vals = [0] * prog.n_wires
    vals[1] = mask
    for name, wires in prog.inputs.items():
        for w, v in zip(wires, planes[name]):
            vals[w] = v
    for op, o, a, b in prog.ops:
        if op == _OP_AND:
            vals[o] = vals[a] & vals[b]
        elif op == _OP_XOR:
            vals[o] = vals[a] ^ vals[b]
        elif op == _OP_OR:
            vals[o] = vals[a] | vals[b]
        elif op == _OP_NOT:
            vals[o] = vals[a] ^ mask
        elif op == _OP_NAND:
            vals[o] = (vals[a] & vals[b]) ^ mask
        elif op == _OP_XNOR:
            vals[o] = vals[a] ^ vals[b] ^ mask
        elif clocked:
            vals[o] = (vals[a] << 1) & mask
        else:
            vals[o] = vals[a]
    return {name: [vals[w] for w in wires] for name, wires in prog.outputs.items()}


def _to_planes(values: Sequence[int], width: int) -> list[int]:
    """Transpose ``len(values)`` unsigned ints into ``width`` lane-packed ints."""
    planes = []
    chunks = []
    for c in range(0, width, 64):
        chunks.append(np.array([(v >> c) & 0xFFFFFFFFFFFFFFFF for v in values], dtype=np.uint64))
    for j in range(width):
        col = (chunks[j // 64] >> np.uint64(j % 64)) & np.uint64(1)
        packed = np.packbits(col.astype(np.uint8), bitorder="little")
        planes.append(int.from_bytes(packed.tobytes(), "little"))
    return planes


def _from_planes(planes: Sequence[int], lanes: int) -> list[int]:
    width = len(planes)
    nbytes = (lanes + 7) // 8
    chunks = [np.zeros(lanes, dtype=np.uint64) for _ in range(0, width, 64)]
    for j, plane in enumerate(planes):
        if not plane:
            continue
        bits = np.unpackbits(
            np.frombuffer(plane.to_bytes(nbytes, "little"), dtype=np.uint8),
            bitorder="little", count=lanes,
        ).astype(np.uint64)
        chunks[j // 64] |= bits << np.uint64(j % 64)
    if len(chunks) == 1:
        return chunks[0].tolist()
    out = [0] * lanes
    for c, chunk in enumerate(chunks):
        shift = 64 * c
        out = [acc | (int(v) << shift) for acc, v in zip(out, chunk.tolist())]
    return out


def _check_values(netlist: Netlist, inputs: Mapping[str, Sequence[int]]) -> int:
    check_assignment(netlist.inputs, inputs, "input assignment")
    lengths = {len(v) for v in inputs.values()}
    if len(lengths) > 1:
        raise NetlistError(f"input buses have different vector counts {sorted(lengths)}")
    for p in netlist.inputs:
        vals = inputs[p.name]
        if len(vals) and (min(vals) < 0 or max(vals) >= (1 << p.width)):
            raise NetlistError(f"input bus {p.name}: value out of range for {p.width} bits")
    return lengths.pop() if lengths else 0


def _require_combinational(netlist: Netlist) -> None:
    if not netlist.is_combinational:
        raise NetlistError(
            f"netlist {netlist.name!r} is pipelined ({netlist.stage_count} stages); "
            "use simulate_pipelined or flatten it first")


def evaluate(netlist: Netlist, inputs: Mapping[str, BitVec | int]) -> dict[str, BitVec]:
    """Evaluate a combinational netlist on one input assignment.

    Each input bus takes a :class:`BitVec` of the declared width or an
    unsigned int that fits in it.
    """
    _require_combinational(netlist)
    check_assignment(netlist.inputs, inputs, "input assignment")
    vecs = {p.name: coerce_bitvec(inputs[p.name], p.width, f"input bus {p.name}")
            for p in netlist.inputs}
    planes = {name: [int(b) for b in v.bits] for name, v in vecs.items()}
    out = _run(_compile(netlist), planes, 1, clocked=False)
    return {p.name: BitVec(p.width, tuple(bool(b) for b in out[p.name])) for p in netlist.outputs}


def evaluate_many(netlist: Netlist, inputs: Mapping[str, Sequence[int]]) -> dict[str, list[int]]:
    """Evaluate many unsigned input vectors at once.

    ``inputs`` maps each input bus to an equally long sequence of unsigned
    ints; the result maps each output bus to the matching unsigned outputs.
    """
    _require_combinational(netlist)
    n = _check_values(netlist, inputs)
    if n == 0:
        return {p.name: [] for p in netlist.outputs}
    prog = _compile(netlist)
    planes = {p.name: _to_planes(inputs[p.name], p.width) for p in netlist.inputs}
    out = _run(prog, planes, n, clocked=False)
    return {name: _from_planes(bits, n) for name, bits in out.items()}


@dataclass(frozen=True)
class PipelineRun:
    """Cycle-by-cycle outputs of a pipelined simulation.

    ``cycles[t]`` holds the output buses observed during clock cycle ``t``.
    ``results[i]`` is the output belonging to stream entry ``i``; it was
    observed at cycle ``i + latency``.
    """

    latency: int
    cycles: list[dict[str, int]]

    @property
    def results(self) -> list[dict[str, int]]:
        return self.cycles[self.latency:]


def _stream_columns(netlist: Netlist, stream: Sequence[Mapping[str, BitVec | int]]) -> dict[str, list[int]]:
    cols: dict[str, list[int]] = {p.name: [] for p in netlist.inputs}
    for t, entry in enumerate(stream):
        check_assignment(netlist.inputs, entry, f"stream entry {t}")
        for p in netlist.inputs:
            v = coerce_bitvec(entry[p.name], p.width, f"stream entry {t}, bus {p.name}")
            cols[p.name].append(v.to_unsigned())
    return cols


def simulate_pipelined(netlist: Netlist, input_stream: Sequence[Mapping[str, BitVec | int]]) -> PipelineRun:
    """Clock a pipelined netlist over an input stream.

    Entry ``t`` of the stream is applied during cycle ``t``; after the stream
    ends, zero inputs are applied for ``stage_count`` further cycles so every
    entry drains.  Registers start cleared.
    """
    if netlist.stage_count < 1:
        raise NetlistError(f"netlist {netlist.name!r} has no pipeline registers")
    cols = _stream_columns(netlist, input_stream)
    latency = netlist.stage_count
    lanes = len(input_stream) + latency
    for v in cols.values():
        v.extend([0] * latency)
    prog = _compile(netlist)
    planes = {p.name: _to_planes(cols[p.name], p.width) for p in netlist.inputs}
    out = _run(prog, planes, lanes, clocked=True)
    values = {name: _from_planes(bits, lanes) for name, bits in out.items()}
    cycles = [{name: values[name][t] for name in values} for t in range(lanes)]
    return PipelineRun(latency, cycles)


class ClockedSimulator:
    """Literal register-transfer simulator: one combinational sweep per clock.

    Much slower than :func:`simulate_pipelined`, which it exists to
    cross-check.
    """

    def __init__(self, netlist: Netlist):
        self.netlist = netlist
        self._prog = _compile(netlist)
        self._state = {op[1]: 0 for op in self._prog.ops if op[0] == _OP_REG}
        self.cycle = 0

    def step(self, inputs: Mapping[str, BitVec | int]) -> dict[str, int]:
        """Apply ``inputs`` for one cycle, return the outputs seen during
        that cycle, then clock the registers."""
        check_assignment(self.netlist.inputs, inputs, f"cycle {self.cycle}")
        vals = [0] * self._prog.n_wires
        vals[1] = 1
        for p in self.netlist.inputs:
            v = coerce_bitvec(inputs[p.name], p.width, f"cycle {self.cycle}, bus {p.name}")
            for w, b in zip(self._prog.inputs[p.name], v.bits):
                vals[w] = int(b)
        next_state = {}
        for op, o, a, b in self._prog.ops:
            if op == _OP_REG:
                vals[o] = self._state[o]
                next_state[o] = None
            elif op == _OP_AND:
                vals[o] = vals[a] & vals[b]
            elif op == _OP_OR:
                vals[o] = vals[a] | vals[b]
            elif op == _OP_XOR:
                vals[o] = vals[a] ^ vals[b]
            elif op == _OP_NOT:
                vals[o] = vals[a] ^ 1
            elif op == _OP_NAND:
                vals[o] = (vals[a] & vals[b]) ^ 1
            else:
                vals[o] = vals[a] ^ vals[b] ^ 1
        for op, o, a, _ in self._prog.ops:
            if op == _OP_REG:
                next_state[o] = vals[a]
        self._state = next_state
        self.cycle += 1
        return {
            name: sum(vals[w] << i for i, w in enumerate(wires))
            for name, wires in self._prog.outputs.items()
        }
