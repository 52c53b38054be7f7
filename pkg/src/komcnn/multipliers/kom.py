"""Karatsuba-Ofman multiplier generator.

Operands are split into high (``l``) and low (``r``) halves,
``A = A_l * 2**(n/2) + A_r``, recursively down to 2-bit segments.

* four-product: ``A*B = A_l B_l 2**n + (A_r B_l + A_l B_r) 2**(n/2) + A_r B_r``
* three-product: the middle term is ``(A_l+A_r)(B_l+B_r) - A_l B_l - A_r B_r``.
  The pre-sums are ``n/2 + 1`` bits wide; only their low ``n/2`` bits go
  through the recursive multiplier and the carry bits ``ca, cb`` are folded
  back in as ``ca*sb*2**(n/2) + cb*sa*2**(n/2) + ca*cb*2**n``.

Each combine step sums all of its terms in one carry-save reduction
followed by a ripple-carry adder, modulo ``2**(2n)``.  Subtracted terms
enter as inverted bits plus a constant, which is exact because the true
product always fits in ``2n`` bits.

Stage markers: 2-bit base multipliers and operand pre-adders sit in
segment 0, and the combine step of the recursion level for width ``w``
sits in segment ``log2(w) - 1``.
"""

from __future__ import annotations

from ..netlist.core import CONST1, Netlist, instance_scopes
from ..netlist.pipeline import insert_pipeline
from .builder import Bits, CircuitBuilder, add_columns
from .spec import Family, KomVariant, MultiplierSpec, SpecError


def base_2x2(b: CircuitBuilder, a: Bits, x: Bits) -> Bits:
    """Fixed 2-bit x 2-bit multiplier: 4 AND partial products, 2 half adders."""
    with b.scope("base"), b.stage(0):
        p0 = b.AND(a[0], x[0])
        t10 = b.AND(a[1], x[0])
        t01 = b.AND(a[0], x[1])
        t11 = b.AND(a[1], x[1])
        p1, c1 = b.half_adder(t10, t01)
        p2, p3 = b.half_adder(t11, c1)
    return [p0, p1, p2, p3]


def _level(n: int) -> int:
    return n.bit_length() - 2


def _combine(b: CircuitBuilder, n: int, terms: list[tuple[Bits, int]],
             negated: list[tuple[Bits, int]]) -> Bits:
    width = 2 * n
    cols: list[Bits] = [[] for _ in range(width)]
    const = 0
    for bits, shift in terms:
        for i, w in enumerate(bits):
            if shift + i < width:
                cols[shift + i].append(w)
    for bits, shift in negated:
        # -X*2**s == (~X)*2**s + 2**width - 2**(s+len) + 2**s   (mod 2**width)
        for i, w in enumerate(bits):
            if shift + i < width:
                cols[shift + i].append(b.NOT(w))
        const += (1 << width) - (1 << (shift + len(bits))) + (1 << shift)
    const %= 1 << width
    for i in range(width):
        if (const >> i) & 1:
            cols[i].append(CONST1)
    return add_columns(b, cols, width)


def _kom(b: CircuitBuilder, a: Bits, x: Bits, variant: KomVariant) -> Bits:
    n = len(a)
    if n == 2:
        return base_2x2(b, a, x)
    h = n // 2
    a_r, a_l = a[:h], a[h:]
    x_r, x_l = x[:h], x[h:]
    level = _level(n)

    if variant is KomVariant.FOUR_PRODUCT:
        with b.scope("hh"):
            p_hh = _kom(b, a_l, x_l, variant)
        with b.scope("rl"):
            p_rl = _kom(b, a_r, x_l, variant)
        with b.scope("lr"):
            p_lr = _kom(b, a_l, x_r, variant)
        with b.scope("ll"):
            p_ll = _kom(b, a_r, x_r, variant)
        with b.scope("comb"), b.stage(level):
            return _combine(b, n, [(p_ll + p_hh, 0), (p_rl, h), (p_lr, h)], [])

    with b.scope("pre"), b.stage(0):
        sa = b.ripple_add(a_l, a_r)
        sx = b.ripple_add(x_l, x_r)
    sa, ca = sa[:h], sa[h]
    sx, cx = sx[:h], sx[h]
    with b.scope("hh"):
        p_hh = _kom(b, a_l, x_l, variant)
    with b.scope("ll"):
        p_ll = _kom(b, a_r, x_r, variant)
    with b.scope("mid"):
        p_mid = _kom(b, sa, sx, variant)
    with b.scope("comb"), b.stage(level):
        fix_a = [b.AND(ca, w) for w in sx]
        fix_x = [b.AND(cx, w) for w in sa]
        top = b.AND(ca, cx)
        return _combine(
            b, n,
            [(p_ll + p_hh, 0), (p_mid, h), (fix_a, n), (fix_x, n), ([top], n + h)],
            [(p_hh, h), (p_ll, h)],
        )


def gen_kom(spec: MultiplierSpec) -> Netlist:
    """Unsigned Karatsuba-Ofman multiplier ``P = A * B`` (``P`` is 2n bits)."""
    if spec.family is not Family.KOM:
        raise SpecError(f"gen_kom needs a KOM spec, got {spec.family.value}")
    b = CircuitBuilder(spec.netlist_name)
    a = b.input("A", spec.width)
    x = b.input("B", spec.width)
    b.output("P", _kom(b, a, x, spec.kom_variant))
    netlist = b.build()
    if spec.pipelined and spec.width > 2:
        netlist = insert_pipeline(netlist)
    return netlist


def count_base_multipliers(spec: MultiplierSpec) -> int:
    """Number of 2-bit base multipliers instantiated, found by inspecting the
    generated netlist rather than by formula."""
    if spec.family is not Family.KOM:
        raise SpecError(f"count_base_multipliers needs a KOM spec, got {spec.family.value}")
    return len(instance_scopes(gen_kom(spec), "base"))
