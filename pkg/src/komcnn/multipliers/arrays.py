"""Baugh-Wooley, Dadda and schoolbook array multipliers."""

from __future__ import annotations

import re

from ..netlist.core import CONST0, CONST1, Netlist
from .builder import Bits, CircuitBuilder, add_columns, dadda_heights
from .spec import Family, MultiplierSpec, SpecError


def _require(spec: MultiplierSpec, family: Family) -> None:
    if spec.family is not family:
        raise SpecError(f"expected a {family.value} spec, got {spec.family.value}")


def gen_baugh_wooley(spec: MultiplierSpec) -> Netlist:
    """Signed two's-complement carry-save array multiplier.

    Partial products pairing exactly one sign bit with a non-sign bit are
    inverted (NAND), and the correction constant ``2**n + 2**(2n-1)`` is
    preloaded into the sum vector.  Row ``j`` adds ``B[j] * A`` into the
    carry-save (sum, carry) pair; the top half is resolved by a ripple-carry
    adder.
    """
    _require(spec, Family.BAUGH_WOOLEY)
    n = spec.width
    b = CircuitBuilder(spec.netlist_name)
    a = b.input("A", n)
    x = b.input("B", n)
    width = 2 * n

    def pp(i: int, j: int) -> str:
        if (i == n - 1) != (j == n - 1):
            return b.NAND(a[i], x[j])
        return b.AND(a[i], x[j])

    sums: list[str | None] = [None] * (width + 1)
    carries: list[str | None] = [None] * (width + 1)
    with b.scope("row0"):
        for i in range(n):
            sums[i] = pp(i, 0)
    sums[n] = CONST1
    sums[width - 1] = CONST1

    for j in range(1, n):
        with b.scope(f"row{j}"):
            new_carries = list(carries)
            for k in range(j, j + n):
                new_carries[k] = None
            for k in range(j, j + n):
                bits = [w for w in (sums[k], carries[k], pp(k - j, j)) if w is not None]
                if len(bits) == 3:
                    s, c = b.full_adder(*bits)
                elif len(bits) == 2:
                    s, c = b.half_adder(*bits)
                else:
                    s, c = bits[0], None
                sums[k] = s
                if c is not None:
                    new_carries[k + 1] = c
            carries = new_carries

    with b.scope("cpa"):
        row0 = [w or CONST0 for w in sums[:width]]
        row1 = [w or CONST0 for w in carries[:width]]
        product = b.ripple_add(row0, row1)[:width]
    b.output("P", product)
    return b.build()


def gen_dadda(spec: MultiplierSpec) -> Netlist:
    """Unsigned Dadda multiplier: AND partial products, Dadda column
    reduction by the height sequence 2, 3, 4, 6, 9, 13, ..., and a ripple-carry
    adder across all 2n columns."""
    _require(spec, Family.DADDA)
    n = spec.width
    b = CircuitBuilder(spec.netlist_name)
    a = b.input("A", n)
    x = b.input("B", n)
    cols: list[Bits] = [[] for _ in range(2 * n)]
    with b.scope("pp"):
        for j in range(n):
            for i in range(n):
                cols[i + j].append(b.AND(a[i], x[j]))
    b.output("P", add_columns(b, cols, 2 * n))
    return b.build()


def dadda_stage_count(width: int) -> int:
    """Reduction stages a ``width``-bit Dadda multiplier needs (from the
    height sequence alone)."""
    return len(dadda_heights(width))


_STAGE = re.compile(r"reduce(\d+)")


def reduction_stages(netlist: Netlist) -> int:
    """Count the distinct top-level reduction stages present in a netlist."""
    found = set()
    for g in netlist.gates:
        parts = g.id.split("/")
        if len(parts) > 2 and _STAGE.fullmatch(parts[1]):
            found.add(parts[1])
    return len(found)


def gen_array(spec: MultiplierSpec) -> Netlist:
    """Unsigned schoolbook array multiplier with one ripple-carry adder per row."""
    _require(spec, Family.ARRAY)
    n = spec.width
    b = CircuitBuilder(spec.netlist_name)
    a = b.input("A", n)
    x = b.input("B", n)
    with b.scope("row0"):
        acc = [b.AND(a[i], x[0]) for i in range(n)]
    for j in range(1, n):
        with b.scope(f"row{j}"):
            row = [b.AND(a[i], x[j]) for i in range(n)]
            acc = acc[:j] + b.ripple_add(acc[j:j + n], row)
    b.output("P", acc[: 2 * n])
    return b.build()
