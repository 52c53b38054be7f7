"""Multiply-accumulate cell and the linear chain built from it."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

ACC_BITS = 64
ACC_MIN = -(1 << (ACC_BITS - 1))
ACC_MAX = (1 << (ACC_BITS - 1)) - 1


class AccumulatorOverflow(OverflowError):
    """A partial sum left the signed 64-bit accumulator range."""


def check_acc(value: int, where: str = "accumulator") -> int:
    if not ACC_MIN <= value <= ACC_MAX:
        raise AccumulatorOverflow(f"{where}: {value} outside the signed {ACC_BITS}-bit range")
    return value


@dataclass
class SystolicCell:
    """Weight-stationary MAC cell: ``y_reg <- y_prev + h * x`` on each clock."""

    h: int
    y_reg: int = 0

    def step(self, y_prev: int, x: int) -> int:
        self.y_reg = check_acc(y_prev + self.h * x, f"cell(h={self.h})")
        return self.y_reg


def cell_step(cell: SystolicCell, y_prev: int, x: int) -> int:
    return cell.step(y_prev, x)


@dataclass
class SystolicArray:
    """A chain of MAC cells.  Partial sums move one cell to the right per
    clock; each cell also receives its own ``x`` input every clock.

    Partial sums travel as tokens with a valid bit.  A cell only multiplies
    when the token arriving from its left is valid, so ``multiplications``
    counts useful MAC operations.
    """

    cells: list[SystolicCell]
    cycle: int = 0
    multiplications: int = 0
    valid: list[bool] = field(default_factory=list)

    def __post_init__(self):
        if not self.cells:
            raise ValueError("a systolic array needs at least one cell")
        self.valid = [False] * len(self.cells)

    @classmethod
    def from_weights(cls, weights: Sequence[int]) -> "SystolicArray":
        return cls([SystolicCell(int(h)) for h in weights])

    @property
    def length(self) -> int:
        return len(self.cells)

    @property
    def output(self) -> tuple[int, bool]:
        """Value and valid bit currently held by the rightmost register."""
        return self.cells[-1].y_reg, self.valid[-1]

    def clock(self, xs: Sequence[int], inject: bool) -> tuple[int, bool]:
        """Advance one clock.  ``inject`` starts a fresh zero partial sum at
        the left edge.  Returns the rightmost register after the edge."""
        if len(xs) != len(self.cells):
            raise ValueError(f"expected {len(self.cells)} cell inputs, got {len(xs)}")
        # Read every left-hand register before any cell updates.
        y_left = [0] + [c.y_reg for c in self.cells[:-1]]
        v_left = [inject] + self.valid[:-1]
        for j, cell in enumerate(self.cells):
            if v_left[j]:
                cell.step(y_left[j], xs[j])
                self.multiplications += 1
            else:
                cell.y_reg = 0
            self.valid[j] = v_left[j]
        self.cycle += 1
        return self.output
