"""Shipped matrix-multiply resource tables and the per-multiplier unit costs
derived from them.

The data file holds one ``order,kind,field,value`` row per cell.  Every cell
is exactly ``unit_cost * order**3``; calibration divides the order-3 cells
by 27 and then demands that the other three orders agree to the unit.
"""

from __future__ import annotations

import csv
import enum
import io
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

from ..netlist.timing import FPGA_FIELDS, CostReport

ORDERS = (3, 5, 7, 11)
CALIBRATION_ORDER = 3
DATA_VERSION = 1


class CalibrationError(ValueError):
    pass


class MultiplierKind(str, enum.Enum):
    KOM16 = "KOM16"
    KOM32 = "KOM32"
    BW32 = "BW32"
    DADDA32 = "DADDA32"

    @classmethod
    def parse(cls, text: str) -> "MultiplierKind":
        try:
            return cls(text.upper())
        except ValueError:
            raise ValueError(f"unknown multiplier kind {text!r}; expected one of "
                             f"{[k.value.lower() for k in cls]}") from None


@dataclass(frozen=True)
class TableCell:
    order: int
    kind: MultiplierKind
    field: str
    value: int


@dataclass(frozen=True)
class UnitCost:
    kind: MultiplierKind
    slice_registers: int
    slice_luts: int
    lut_ff_pairs: int
    bonded_iobs: int

    def scaled(self, count: int) -> dict[str, int]:
        return {f: getattr(self, f) * count for f in FPGA_FIELDS}


def parse_tables(text: str) -> list[TableCell]:
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    cells = []
    for row in csv.DictReader(io.StringIO("\n".join(lines))):
        try:
            cell = TableCell(int(row["order"]), MultiplierKind(row["kind"]), row["field"], int(row["value"]))
        except (KeyError, ValueError, TypeError) as exc:
            raise CalibrationError(f"malformed table row {row}: {exc}") from None
        if cell.field not in FPGA_FIELDS:
            raise CalibrationError(f"unknown field {cell.field!r} in table row {row}")
        cells.append(cell)
    return cells


def load_tables(path: str | Path | None = None) -> list[TableCell]:
    """Read the shipped table file, or ``path`` when given."""
    if path is None:
        text = (Path(__file__).resolve().parent.parent / "data" / "tables.csv").read_text()
    else:
        text = Path(path).read_text()
    return parse_tables(text)


def calibrate_unit_costs(cells: Iterable[TableCell]) -> dict[MultiplierKind, UnitCost]:
    """Derive unit costs from the order-3 cells and verify every other cell.

    Raises :class:`CalibrationError` on a missing or duplicate cell, a
    non-integer division, or any cell that disagrees with ``unit * n**3``.
    """
    grid: dict[tuple[int, MultiplierKind, str], int] = {}
    for c in cells:
        key = (c.order, c.kind, c.field)
        if key in grid:
            raise CalibrationError(f"duplicate table cell order={c.order} {c.kind.value} {c.field}")
        grid[key] = c.value
    missing = [(o, k.value, f) for o in ORDERS for k in MultiplierKind for f in FPGA_FIELDS
               if (o, k, f) not in grid]
    if missing:
        raise CalibrationError(f"missing table cells: {missing}")

    base = CALIBRATION_ORDER ** 3
    costs = {}
    for kind in MultiplierKind:
        unit = {}
        for f in FPGA_FIELDS:
            value = grid[(CALIBRATION_ORDER, kind, f)]
            if value % base:
                raise CalibrationError(
                    f"{kind.value} {f}: order-{CALIBRATION_ORDER} cell {value} is not divisible by {base}")
            unit[f] = value // base
        costs[kind] = UnitCost(kind, **unit)

    for (order, kind, f), value in sorted(grid.items(), key=lambda kv: (kv[0][0], kv[0][1].value, kv[0][2])):
        expected = getattr(costs[kind], f) * order ** 3
        if value != expected:
            raise CalibrationError(
                f"order {order} {kind.value} {f}: table has {value}, unit cost predicts {expected}")
    return costs


_DEFAULT: dict[MultiplierKind, UnitCost] | None = None


def default_unit_costs() -> dict[MultiplierKind, UnitCost]:
    """Unit costs calibrated from the shipped data (computed once)."""
    global _DEFAULT
    if _DEFAULT is None:
        _DEFAULT = calibrate_unit_costs(load_tables())
    return _DEFAULT


def multiplier_count(n: int) -> int:
    """Scalar multipliers needed to multiply two ``n x n`` matrices."""
    if n < 1:
        raise ValueError("matrix order must be at least 1")
    return n ** 3


def estimate_matrix_mult_resources(n: int, kind: MultiplierKind | str,
                                   costs: dict[MultiplierKind, UnitCost] | None = None) -> CostReport:
    """FPGA columns for an ``n x n`` matrix product built from ``n**3``
    multipliers of ``kind``.  Structural fields are not modelled and are 0."""
    kind = kind if isinstance(kind, MultiplierKind) else MultiplierKind.parse(kind)
    costs = costs or default_unit_costs()
    return CostReport(**costs[kind].scaled(multiplier_count(n)), gate_count=0, register_count=0, depth=0)


@dataclass(frozen=True)
class CellDiff:
    order: int
    kind: MultiplierKind
    field: str
    shipped: int
    predicted: int


def diff_tables(cells: Iterable[TableCell], costs: dict[MultiplierKind, UnitCost]) -> list[CellDiff]:
    """Every cell with the value the unit-cost model predicts for it."""
    out = []
    for c in cells:
        predicted = getattr(estimate_matrix_mult_resources(c.order, c.kind, costs), c.field)
        out.append(CellDiff(c.order, c.kind, c.field, c.value, predicted))
    return out
