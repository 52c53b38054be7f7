from __future__ import annotations

import enum
from dataclasses import dataclass

SUPPORTED_WIDTHS = (2, 4, 8, 16, 32, 64)


class Family(str, enum.Enum):
    KOM = "kom"
    BAUGH_WOOLEY = "bw"
    DADDA = "dadda"
    ARRAY = "array"


class KomVariant(str, enum.Enum):
    THREE_PRODUCT = "three-product"
    FOUR_PRODUCT = "four-product"


class SpecError(ValueError):
    pass


@dataclass(frozen=True)
class MultiplierSpec:
    """Parameters of one generated multiplier.

    Baugh-Wooley multipliers are signed two's complement; every other family
    is unsigned.  ``kom_variant`` only matters for KOM, and only KOM can be
    generated pipelined.
    """

    family: Family
    width: int
    kom_variant: KomVariant = KomVariant.THREE_PRODUCT
    pipelined: bool = False

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        object.__setattr__(self, "kom_variant", KomVariant(self.kom_variant))
        if self.width not in SUPPORTED_WIDTHS:
            raise SpecError(f"unsupported width {self.width}; expected one of {SUPPORTED_WIDTHS}")
        if self.pipelined and self.family is not Family.KOM:
            raise SpecError(f"pipelining is only defined for KOM, not {self.family.value}")

    @property
    def signed(self) -> bool:
        return self.family is Family.BAUGH_WOOLEY

    @property
    def netlist_name(self) -> str:
        name = f"{self.family.value}{self.width}"
        if self.family is Family.KOM:
            name += "_" + self.kom_variant.value.replace("-", "_")
            if self.pipelined:
                name += "_pipelined"
        return name

    @classmethod
    def from_netlist_name(cls, name: str) -> "MultiplierSpec | None":
        """Recover the spec a generator used, or None for foreign netlists."""
        for spec in _all_specs():
            if spec.netlist_name == name:
                return spec
        return None

    def oracle(self, a: int, b: int) -> int:
        """Exact product of two operands given as raw unsigned bit patterns,
        returned as the raw unsigned pattern of the 2n-bit result."""
        n = self.width
        if self.signed:
            a = a - (1 << n) if a >> (n - 1) else a
            b = b - (1 << n) if b >> (n - 1) else b
        return (a * b) % (1 << (2 * n))


def _all_specs():
    for w in SUPPORTED_WIDTHS:
        for fam in (Family.BAUGH_WOOLEY, Family.DADDA, Family.ARRAY):
            yield MultiplierSpec(fam, w)
        for v in KomVariant:
            yield MultiplierSpec(Family.KOM, w, v)
            yield MultiplierSpec(Family.KOM, w, v, pipelined=True)
