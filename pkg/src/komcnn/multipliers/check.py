"""Oracle sweeps over generated multiplier netlists."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Sequence

from ..netlist.core import Netlist, NetlistError
from ..netlist.sim import evaluate_many, simulate_pipelined
from .spec import MultiplierSpec

MAX_EXHAUSTIVE_WIDTH = 12
DEFAULT_SEED = 20240229


@dataclass(frozen=True)
class Mismatch:
    a: int
    b: int
    got: int
    expected: int


@dataclass(frozen=True)
class SweepResult:
    total: int
    mismatches: list[Mismatch] = field(default_factory=list)
    failed: int = 0

    @property
    def passed(self) -> int:
        return self.total - self.failed

    @property
    def ok(self) -> bool:
        return self.failed == 0


def _require_ports(netlist: Netlist) -> None:
    ins = {p.name for p in netlist.inputs}
    outs = {p.name for p in netlist.outputs}
    if ins != {"A", "B"} or "P" not in outs:
        raise NetlistError(f"netlist {netlist.name!r} is not a multiplier (needs inputs A, B and output P)")


def products(netlist: Netlist, a_vals: Sequence[int], b_vals: Sequence[int]) -> list[int]:
    """Raw unsigned ``P`` for each operand pair; pipelined netlists are
    streamed and their outputs re-aligned by the pipeline latency."""
    _require_ports(netlist)
    if netlist.is_combinational:
        return evaluate_many(netlist, {"A": list(a_vals), "B": list(b_vals)})["P"]
    stream = [{"A": a, "B": b} for a, b in zip(a_vals, b_vals)]
    return [r["P"] for r in simulate_pipelined(netlist, stream).results]


def sweep(netlist: Netlist, spec: MultiplierSpec, a_vals: Sequence[int], b_vals: Sequence[int],
          keep: int = 10) -> SweepResult:
    """Compare every product against the spec oracle; keeps the first
    ``keep`` mismatches."""
    got = products(netlist, a_vals, b_vals)
    bad = []
    failed = 0
    for a, b, p in zip(a_vals, b_vals, got):
        want = spec.oracle(a, b)
        if p != want:
            failed += 1
            if len(bad) < keep:
                bad.append(Mismatch(a, b, p, want))
    return SweepResult(len(got), bad, failed)


def exhaustive_operands(width: int) -> tuple[list[int], list[int]]:
    if width > MAX_EXHAUSTIVE_WIDTH:
        raise ValueError(f"exhaustive sweep limited to width <= {MAX_EXHAUSTIVE_WIDTH}, got {width}")
    n = 1 << width
    return [a for a in range(n) for _ in range(n)], [b for _ in range(n) for b in range(n)]


def random_operands(width: int, count: int, seed: int = DEFAULT_SEED) -> tuple[list[int], list[int]]:
    rng = random.Random(seed)
    return ([rng.getrandbits(width) for _ in range(count)],
            [rng.getrandbits(width) for _ in range(count)])
