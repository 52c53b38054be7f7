"""Gate-level multiplier generators."""

from ..netlist.core import Netlist
from .arrays import dadda_stage_count, gen_array, gen_baugh_wooley, gen_dadda, reduction_stages
from .builder import CircuitBuilder, dadda_heights
from .check import Mismatch, SweepResult, exhaustive_operands, products, random_operands, sweep
from .kom import base_2x2, count_base_multipliers, gen_kom
from .spec import SUPPORTED_WIDTHS, Family, KomVariant, MultiplierSpec, SpecError

_GENERATORS = {
    Family.KOM: gen_kom,
    Family.BAUGH_WOOLEY: gen_baugh_wooley,
    Family.DADDA: gen_dadda,
    Family.ARRAY: gen_array,
}


def generate(spec: MultiplierSpec) -> Netlist:
    return _GENERATORS[spec.family](spec)


def gen_ripple_adder(width: int) -> Netlist:
    """``S = A + B`` over ``width`` bits with a separate carry-out bus ``C``."""
    b = CircuitBuilder(f"ripple_adder{width}")
    a = b.input("A", width)
    x = b.input("B", width)
    total = b.ripple_add(a, x)
    b.output("S", total[:width])
    b.output("C", total[width:])
    return b.build()


def gen_base_multiplier() -> Netlist:
    """The fixed 2-bit x 2-bit base circuit on its own."""
    b = CircuitBuilder("base2x2")
    b.output("P", base_2x2(b, b.input("A", 2), b.input("B", 2)))
    return b.build()


__all__ = [
    "SUPPORTED_WIDTHS", "Family", "KomVariant", "MultiplierSpec", "SpecError",
    "CircuitBuilder", "dadda_heights", "dadda_stage_count", "reduction_stages",
    "gen_kom", "gen_baugh_wooley", "gen_dadda", "gen_array", "generate",
    "count_base_multipliers", "gen_ripple_adder", "gen_base_multiplier",
    "Mismatch", "SweepResult", "exhaustive_operands", "products", "random_operands", "sweep",
]
