"""Netlist construction helpers shared by the multiplier generators.

:class:`CircuitBuilder` hands out wires, folds constants as gates are
requested (so correction constants and carry-ins cost nothing when they
simplify away), names gates hierarchically (``kom32/hh/base/and3``) and
records per-gate stage markers for later register insertion.

Half adder = 1 XOR + 1 AND.  Full adder = 2 XOR + 2 AND + 1 OR.
"""

from __future__ import annotations

import contextlib
from typing import Iterator, Sequence

from ..netlist.core import CONST0, CONST1, Gate, GateKind, Netlist, Port

Bits = list[str]

AND, OR, XOR, NOT, NAND, XNOR = (
    GateKind.AND, GateKind.OR, GateKind.XOR, GateKind.NOT, GateKind.NAND, GateKind.XNOR)


class CircuitBuilder:
    def __init__(self, name: str):
        self.name = name
        self._inputs: list[Port] = []
        self._outputs: list[tuple[Port, Bits]] = []
        self._gates: list[Gate] = []
        self._markers: dict[str, int] = {}
        self._scope: list[str] = [name]
        self._stage: int | None = None
        self._inverse: dict[str, str] = {}
        self._level: dict[str, int] = {}
        self._count = 0

    # -- structure -----------------------------------------------------
    def input(self, name: str, width: int) -> Bits:
        port = Port(name, width)
        self._inputs.append(port)
        return port.wires

    def output(self, name: str, bits: Sequence[str]) -> None:
        self._outputs.append((Port(name, len(bits)), list(bits)))

    @contextlib.contextmanager
    def scope(self, name: str) -> Iterator[None]:
        self._scope.append(name)
        try:
            yield
        finally:
            self._scope.pop()

    @contextlib.contextmanager
    def stage(self, index: int) -> Iterator[None]:
        """Mark every gate created inside the block for logic segment ``index``."""
        saved, self._stage = self._stage, index
        try:
            yield
        finally:
            self._stage = saved

    def level(self, wire: str) -> int:
        """Unit-delay logic level of ``wire`` (0 for inputs and constants)."""
        return self._level.get(wire, 0)

    @property
    def gate_count(self) -> int:
        return len(self._gates)

    # -- gates -----------------------------------------------------------
    def _emit(self, kind: GateKind, *ins: str) -> str:
        self._count += 1
        out = f"n{self._count}"
        gid = "/".join(self._scope) + f"/{kind.value.lower()}{self._count}"
        self._gates.append(Gate(gid, kind, tuple(ins), out))
        self._level[out] = 1 + max(self.level(w) for w in ins)
        if self._stage is not None:
            self._markers[gid] = self._stage
        return out

    def NOT(self, a: str) -> str:
        if a == CONST0:
            return CONST1
        if a == CONST1:
            return CONST0
        if a in self._inverse:
            return self._inverse[a]
        out = self._emit(NOT, a)
        self._inverse[out] = a
        return out

    def AND(self, a: str, b: str) -> str:
        if CONST0 in (a, b):
            return CONST0
        if a == CONST1:
            return b
        if b == CONST1 or a == b:
            return a
        return self._emit(AND, a, b)

    def OR(self, a: str, b: str) -> str:
        if CONST1 in (a, b):
            return CONST1
        if a == CONST0:
            return b
        if b == CONST0 or a == b:
            return a
        return self._emit(OR, a, b)

    def XOR(self, a: str, b: str) -> str:
        if a == b:
            return CONST0
        if a == CONST0:
            return b
        if b == CONST0:
            return a
        if a == CONST1:
            return self.NOT(b)
        if b == CONST1:
            return self.NOT(a)
        return self._emit(XOR, a, b)

    def XNOR(self, a: str, b: str) -> str:
        if a == b:
            return CONST1
        if a == CONST1:
            return b
        if b == CONST1:
            return a
        if a == CONST0:
            return self.NOT(b)
        if b == CONST0:
            return self.NOT(a)
        return self._emit(XNOR, a, b)

    def NAND(self, a: str, b: str) -> str:
        if CONST0 in (a, b):
            return CONST1
        if a == CONST1:
            return self.NOT(b)
        if b == CONST1 or a == b:
            return self.NOT(a)
        return self._emit(NAND, a, b)

    # -- arithmetic macros -------------------------------------------------
    def half_adder(self, a: str, b: str) -> tuple[str, str]:
        """Return (sum, carry)."""
        return self.XOR(a, b), self.AND(a, b)

    def full_adder(self, a: str, b: str, c: str) -> tuple[str, str]:
        """Return (sum, carry).

        The latest-arriving input is wired to the carry-in pin, which is one
        level faster than the other two.  A constant input degenerates the
        cell to a half adder (0) or to ``XNOR``/``OR`` (1).
        """
        ins = [a, b, c]
        if CONST0 in ins:
            ins.remove(CONST0)
            return self.half_adder(*ins)
        if CONST1 in ins:
            ins.remove(CONST1)
            return self.XNOR(*ins), self.OR(*ins)
        a, b, c = sorted(ins, key=self.level)
        t = self.XOR(a, b)
        s = self.XOR(t, c)
        carry = self.OR(self.AND(a, b), self.AND(t, c))
        return s, carry

    def ripple_add(self, a: Sequence[str], b: Sequence[str], cin: str = CONST0) -> Bits:
        """Ripple-carry sum of two little-endian bit lists; one extra carry-out bit."""
        width = max(len(a), len(b))
        a = list(a) + [CONST0] * (width - len(a))
        b = list(b) + [CONST0] * (width - len(b))
        out = []
        carry = cin
        for x, y in zip(a, b):
            s, carry = self.full_adder(x, y, carry)
            out.append(s)
        out.append(carry)
        return out

    def build(self) -> Netlist:
        """Freeze into a :class:`Netlist`, binding output bits to port wires.

        A port bit whose source is a gate output gets that gate renamed onto
        the port wire.  Constants, primary inputs and wires already bound to
        another port bit are passed through an ``AND(x, x)`` buffer.
        """
        rename: dict[str, str] = {}
        buffers = []
        produced = {g.output for g in self._gates}
        for port, bits in self._outputs:
            for i, src in enumerate(bits):
                target = port.wires[i]
                if src in produced and src not in rename:
                    rename[src] = target
                else:
                    buffers.append((src, target))
        gates = [
            Gate(g.id, g.kind, tuple(rename.get(w, w) for w in g.inputs), rename.get(g.output, g.output))
            for g in self._gates
        ]
        markers = dict(self._markers)
        last = max(markers.values(), default=None)
        for k, (src, target) in enumerate(buffers):
            gid = f"{self.name}/out/buf{k}"
            src = rename.get(src, src)
            gates.append(Gate(gid, AND, (src, src), target))
            if last is not None:
                markers[gid] = last
        return Netlist(self.name, tuple(self._inputs), tuple(p for p, _ in self._outputs),
                       tuple(gates), (), markers)


def dadda_heights(max_height: int) -> list[int]:
    """Dadda stage targets strictly below ``max_height``, largest first.

    >>> dadda_heights(16)
    [13, 9, 6, 4, 3, 2]
    """
    seq = [2]
    while seq[-1] * 3 // 2 < max_height:
        seq.append(seq[-1] * 3 // 2)
    return [d for d in reversed(seq) if d < max_height]


def reduce_columns(b: CircuitBuilder, columns: list[Bits], width: int,
                   scope_prefix: str = "reduce") -> list[Bits]:
    """Dadda reduction of a bit-column matrix down to height two.

    ``columns[i]`` holds the bits of weight ``2**i``; columns at or beyond
    ``width`` are dropped (results are taken modulo ``2**width``).  Each
    stage lives in its own scope ``{scope_prefix}{k}``.
    """
    cols = [list(c) for c in columns[:width]] + [[] for _ in range(width - len(columns))]
    tallest = max((len(c) for c in cols), default=0)
    for k, target in enumerate(dadda_heights(tallest), start=1):
        with b.scope(f"{scope_prefix}{k}"):
            nxt: list[Bits] = [[] for _ in range(width)]
            for i in range(width):
                bits = cols[i]
                # nxt[i] already holds carries produced from column i-1 this stage.
                while len(bits) + len(nxt[i]) > target:
                    excess = len(bits) + len(nxt[i]) - target
                    if excess >= 2 and len(bits) >= 3:
                        s, c = b.full_adder(bits.pop(0), bits.pop(0), bits.pop(0))
                    else:
                        s, c = b.half_adder(bits.pop(0), bits.pop(0))
                    nxt[i].append(s)
                    if i + 1 < width:
                        nxt[i + 1].append(c)
                nxt[i].extend(bits)
            cols = nxt
    return cols


def add_columns(b: CircuitBuilder, columns: list[Bits], width: int,
                reduce_prefix: str = "reduce") -> Bits:
    """Sum a column matrix modulo ``2**width``: Dadda reduction, then one
    ripple-carry adder across all ``width`` columns."""
    cols = reduce_columns(b, columns, width, reduce_prefix)
    with b.scope("cpa"):
        row0 = [c[0] if len(c) > 0 else CONST0 for c in cols]
        row1 = [c[1] if len(c) > 1 else CONST0 for c in cols]
        return b.ripple_add(row0, row1)[:width]


def constant_bits(value: int, width: int) -> list[int]:
    value %= 1 << width
    return [i for i in range(width) if (value >> i) & 1]
