"""End-to-end acceptance checks.

Each test prints a single ``PASS``/``FAIL`` line and records it so the
terminal summary (see ``conftest.py``) repeats all verdicts together.  Run
with ``pytest tests/test_acceptance.py -s`` to see the lines inline.
"""

import random

import pytest

from komcnn.multipliers import (
    Family,
    KomVariant,
    MultiplierSpec,
    count_base_multipliers,
    exhaustive_operands,
    generate,
    random_operands,
    sweep,
)
from komcnn.multipliers.check import products
from komcnn.netlist import UNIT_DELAYS, critical_path, evaluate_many, simulate_pipelined
from komcnn.netlist.io import dumps, loads
from komcnn.netlist.timing import FPGA_FIELDS
from komcnn.systolic import Tensor, conv2d_oracle, matmul_oracle, run_conv2d, run_fir, run_matmul
from komcnn.workload import (
    ORDERS,
    MultiplierKind,
    builtin_arch,
    default_unit_costs,
    estimate_matrix_mult_resources,
    load_tables,
    workload_report,
)

VERDICTS: dict[str, tuple[bool, str]] = {}


def verdict(name: str, failures: list[str], summary: str) -> None:
    ok = not failures
    detail = summary if ok else "; ".join(failures[:5])
    VERDICTS[name] = (ok, detail)
    print(f"\n{'PASS' if ok else 'FAIL'} {name}: {detail}")
    assert ok, detail


def direct_fir(h, x):
    return [sum(h[k] * x[n - k] for k in range(len(h)) if n - k >= 0) for n in range(len(x))]


def triple_loop(a, b):
    n = len(a)
    return [[sum(a[i][k] * b[k][j] for k in range(n)) for j in range(n)] for i in range(n)]


def sliding_window(img, ker):
    (h, w, c), (kh, kw, _) = img.dims, ker.dims
    out = []
    for i in range(h - kh + 1):
        for j in range(w - kw + 1):
            out.append(sum(img[i + u, j + v, ch] * ker[u, v, ch]
                           for u in range(kh) for v in range(kw) for ch in range(c)))
    return Tensor((h - kh + 1, w - kw + 1, 1), out)


# -- 1. resource tables -----------------------------------------------------------------

def test_resource_tables_reproduced():
    cells = load_tables()
    failures = []
    seen = set()
    for c in cells:
        seen.add((c.order, c.kind, c.field))
        got = getattr(estimate_matrix_mult_resources(c.order, c.kind), c.field)
        if got != c.value:
            failures.append(f"order {c.order} {c.kind.value} {c.field}: {got} != {c.value}")
    expected = {(o, k, f) for o in ORDERS for k in MultiplierKind for f in FPGA_FIELDS}
    if seen != expected:
        failures.append(f"table covers {len(seen)} cells, expected {len(expected)}")
    for kind, unit in default_unit_costs().items():
        for f in FPGA_FIELDS:
            order3 = next(c.value for c in cells if (c.order, c.kind, c.field) == (3, kind, f))
            if order3 != 27 * getattr(unit, f):
                failures.append(f"{kind.value} {f}: order-3 cell is not 27 x unit")
    verdict("resource tables", failures, f"{len(cells)}/64 cells exact")


# -- 2. multiplier correctness ----------------------------------------------------------

def test_multiplier_correctness():
    failures, checked = [], 0
    specs = [MultiplierSpec(f, w) for f in Family for w in (2, 4, 8)]
    specs += [MultiplierSpec(Family.KOM, w, KomVariant.FOUR_PRODUCT) for w in (2, 4, 8)]
    for spec in specs:
        a, b = exhaustive_operands(spec.width)
        r = sweep(generate(spec), spec, a, b)
        checked += r.total
        if not r.ok:
            failures.append(f"{spec.netlist_name} exhaustive: {len(r.mismatches)}+ mismatches")
    for f in Family:
        for width in (16, 32):
            spec = MultiplierSpec(f, width)
            a, b = random_operands(width, 100_000, seed=width)
            r = sweep(generate(spec), spec, a, b)
            checked += r.total
            if not r.ok or r.total < 100_000:
                failures.append(f"{spec.netlist_name} random: {r.passed}/{r.total}")
    # The most negative operand pair must come out positive.
    for width in (2, 4, 8, 16, 32):
        spec = MultiplierSpec(Family.BAUGH_WOOLEY, width)
        lo = 1 << (width - 1)
        got = evaluate_many(generate(spec), {"A": [lo], "B": [lo]})["P"][0]
        if got != 1 << (2 * width - 2):
            failures.append(f"bw{width}: min x min gave {got:#x}")
    verdict("multiplier correctness", failures, f"{checked} operand pairs, 0 mismatches")


# -- 3. Karatsuba structure ---------------------------------------------------------------

def test_karatsuba_structure():
    failures, rows = [], []
    for n in (4, 8, 16, 32):
        levels = n.bit_length() - 2
        three = count_base_multipliers(MultiplierSpec(Family.KOM, n))
        four = count_base_multipliers(MultiplierSpec(Family.KOM, n, KomVariant.FOUR_PRODUCT))
        rows.append(f"n={n}: {three}/{four}")
        if three != 3 ** levels:
            failures.append(f"n={n} three-product: {three} != {3 ** levels}")
        if four != 4 ** levels:
            failures.append(f"n={n} four-product: {four} != {4 ** levels}")
        if not three < four:
            failures.append(f"n={n}: three-product not strictly fewer")
    verdict("karatsuba structure", failures, ", ".join(rows))


# -- 4. systolic equivalence --------------------------------------------------------------

def test_systolic_equivalence():
    rng = random.Random(2024)
    failures = []
    for i in range(100):
        k = rng.randint(1, 12)
        h = [rng.randint(-1000, 1000) for _ in range(k)]
        x = [rng.randint(-1000, 1000) for _ in range(rng.randint(1, 80))]
        r = run_fir(h, x)
        if r.outputs != direct_fir(h, x):
            failures.append(f"fir instance {i} (K={k}) differs")
        if r.latency != k:
            failures.append(f"fir instance {i}: latency {r.latency} != K={k}")

    for n in (1, 3, 5, 7, 11):
        a = [[rng.randint(-999, 999) for _ in range(n)] for _ in range(n)]
        b = [[rng.randint(-999, 999) for _ in range(n)] for _ in range(n)]
        r = run_matmul(a, b)
        if r.product != triple_loop(a, b) or r.product != matmul_oracle(a, b):
            failures.append(f"matmul n={n} differs")
        if r.multiplications != n ** 3:
            failures.append(f"matmul n={n}: {r.multiplications} multiplications != {n ** 3}")

    ones = run_conv2d(Tensor((5, 5, 3), [1] * 75), Tensor((3, 3, 3), [1] * 27)).feature_map
    if ones.dims[:2] != (3, 3) or set(ones.data) != {27}:
        failures.append(f"all-ones convolution gave {ones.dims} {set(ones.data)}")
    for i in range(49):
        c = rng.randint(1, 4)
        hgt, wid = rng.randint(1, 9), rng.randint(1, 9)
        kh, kw = rng.randint(1, hgt), rng.randint(1, wid)
        img = Tensor((hgt, wid, c), [rng.randint(-50, 50) for _ in range(hgt * wid * c)])
        ker = Tensor((kh, kw, c), [rng.randint(-50, 50) for _ in range(kh * kw * c)])
        got = run_conv2d(img, ker).feature_map
        if got != sliding_window(img, ker) or got != conv2d_oracle(img, ker):
            failures.append(f"conv instance {i} {img.dims} * {ker.dims} differs")
    verdict("systolic equivalence", failures, "100 FIR, 5 matmul, 50 convolution instances exact")


# -- 5. pipelining --------------------------------------------------------------------------

def test_pipelining():
    failures, notes = [], []
    for width in (16, 32):
        comb = generate(MultiplierSpec(Family.KOM, width))
        piped = generate(MultiplierSpec(Family.KOM, width, pipelined=True))
        a, b = random_operands(width, 10_000, seed=100 + width)
        want = evaluate_many(comb, {"A": a, "B": b})["P"]
        run = simulate_pipelined(piped, [{"A": x, "B": y} for x, y in zip(a, b)])
        shift = piped.stage_count
        got = [run.cycles[t + shift]["P"] for t in range(len(a))]
        if run.latency != shift or got != want:
            bad = sum(g != w for g, w in zip(got, want))
            failures.append(f"kom{width}: {bad} of 10000 differ at shift {shift}")
        notes.append(f"kom{width} shift {shift}")

    kom = critical_path(generate(MultiplierSpec(Family.KOM, 32, pipelined=True)), UNIT_DELAYS).max_stage_delay
    bw = critical_path(generate(MultiplierSpec(Family.BAUGH_WOOLEY, 32)), UNIT_DELAYS).total_unpipelined_delay
    dadda = critical_path(generate(MultiplierSpec(Family.DADDA, 32)), UNIT_DELAYS).total_unpipelined_delay
    notes.append(f"depths kom32 stage {kom:g} / bw32 {bw:g} / dadda32 {dadda:g}")
    if not kom < bw:
        failures.append(f"pipelined kom32 stage depth {kom:g} is not below bw32 depth {bw:g}")
    if not bw < dadda:
        failures.append(f"bw32 depth {bw:g} is not below dadda32 depth {dadda:g}")
    if failures:
        failures.append(notes[-1])
    verdict("pipelining", failures, ", ".join(notes))


# -- 6. workload model ------------------------------------------------------------------------

def test_workload_model():
    failures = []
    stated = {
        "ALEXNET": ((227, 227, 3), {11: 96, 5: 256, 3: 1024}),
        "VGG16": ((224, 224, 3), {3: 3968}),
        "VGG19": ((224, 224, 3), {3: 4992}),
    }
    for name, (dims, inventory) in stated.items():
        arch = builtin_arch(name)
        if arch.input_dims != dims or dict(arch.kernel_inventory) != inventory:
            failures.append(f"{name} inventory {arch.kernel_inventory} != {inventory}")
        for kind in MultiplierKind:
            r = workload_report(arch, kind)
            for row in r.rows:
                if row.instances != row.kernel_count * row.kernel_size ** 3:
                    failures.append(f"{name}/{kind.value} {row.kernel_size}x{row.kernel_size}: bad instances")
            if r.total_instances != sum(row.instances for row in r.rows):
                failures.append(f"{name}/{kind.value}: instance total not conserved")
            for f in FPGA_FIELDS:
                if r.totals[f] != sum(row.cost[f] for row in r.rows):
                    failures.append(f"{name}/{kind.value} {f}: total not conserved")
    verdict("workload model", failures, "3 inventories exact, 12 reports conserve row sums")


# -- 7. netlist interchange ---------------------------------------------------------------------

def interchange_specs():
    specs = [MultiplierSpec(f, w) for f in Family for w in (2, 4, 8, 16, 32)]
    specs += [MultiplierSpec(Family.KOM, w, KomVariant.FOUR_PRODUCT) for w in (2, 4, 8, 16, 32)]
    specs += [MultiplierSpec(Family.KOM, w, v, pipelined=True) for w in (4, 8, 16, 32) for v in KomVariant]
    return specs


def test_netlist_interchange():
    failures, specs = [], interchange_specs()
    for spec in specs:
        original = generate(spec)
        back = loads(dumps(original))
        a, b = random_operands(spec.width, 100, seed=spec.width * 7)
        if products(original, a, b) != products(back, a, b):
            failures.append(f"{spec.netlist_name}: results changed after round trip")
        if back.gates != original.gates or back.registers != original.registers:
            failures.append(f"{spec.netlist_name}: structure changed after round trip")
    verdict("netlist interchange", failures, f"{len(specs)} multipliers x 100 assignments preserved")


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-s", "-q"]))
