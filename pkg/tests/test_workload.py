import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from komcnn.netlist.timing import FPGA_FIELDS
from komcnn.workload import (
    ORDERS,
    CalibrationError,
    CnnArchSpec,
    MultiplierKind,
    TableCell,
    builtin_arch,
    builtin_names,
    calibrate_unit_costs,
    default_unit_costs,
    diff_tables,
    estimate_matrix_mult_resources,
    load_tables,
    multiplier_count,
    parse_tables,
    workload_report,
)

KINDS = list(MultiplierKind)


def columns(report):
    return tuple(getattr(report, f) for f in FPGA_FIELDS)


def perturbed(cells, order, kind, field, delta):
    return [TableCell(c.order, c.kind, c.field, c.value + delta)
            if (c.order, c.kind, c.field) == (order, kind, field) else c for c in cells]


# -- calibration ------------------------------------------------------------------------

def test_shipped_tables_complete():
    cells = load_tables()
    assert len(cells) == len(ORDERS) * len(KINDS) * len(FPGA_FIELDS) == 64


def test_unit_costs():
    costs = default_unit_costs()
    got = {k.value: (u.slice_registers, u.slice_luts, u.lut_ff_pairs, u.bonded_iobs)
           for k, u in costs.items()}
    assert got == {
        "KOM16": (192, 616, 160, 65),
        "KOM32": (948, 1973, 948, 129),
        "BW32": (227, 2609, 67, 137),
        "DADDA32": (0, 2040, 0, 128),
    }


@pytest.mark.parametrize("order, kind, expected", [
    (3, "kom16", (5184, 16632, 4320, 1755)),
    (5, "kom32", (118500, 246625, 118500, 16125)),
    (7, "bw32", (77861, 894887, 22981, 46991)),
    (11, "dadda32", (0, 2715240, 0, 170368)),
    (11, "kom16", (255552, 819896, 212960, 86515)),
])
def test_table_examples(order, kind, expected):
    assert columns(estimate_matrix_mult_resources(order, kind)) == expected


def test_every_cell_reproduced():
    assert all(d.shipped == d.predicted for d in diff_tables(load_tables(), default_unit_costs()))


def test_multiplier_count():
    assert multiplier_count(3) == 27
    assert multiplier_count(1) == 1
    assert multiplier_count(11) == 1331
    with pytest.raises(ValueError):
        multiplier_count(0)


def test_unknown_kind():
    with pytest.raises(ValueError):
        estimate_matrix_mult_resources(3, "wallace16")


@given(st.integers(1, 40), st.sampled_from(KINDS))
def test_cubic_scaling(n, kind):
    small = estimate_matrix_mult_resources(n, kind)
    big = estimate_matrix_mult_resources(2 * n, kind)
    assert columns(big) == tuple(8 * v for v in columns(small))


def test_perturbed_cell_is_named():
    cells = perturbed(load_tables(), 7, MultiplierKind.BW32, "slice_luts", 1)
    with pytest.raises(CalibrationError, match="order 7 BW32 slice_luts"):
        calibrate_unit_costs(cells)


def test_non_divisible_calibration_cell():
    cells = perturbed(load_tables(), 3, MultiplierKind.KOM16, "bonded_iobs", 1)
    with pytest.raises(CalibrationError, match="not divisible"):
        calibrate_unit_costs(cells)


def test_missing_and_duplicate_cells():
    cells = load_tables()
    with pytest.raises(CalibrationError, match="missing"):
        calibrate_unit_costs(cells[1:])
    with pytest.raises(CalibrationError, match="duplicate"):
        calibrate_unit_costs(cells + cells[:1])


def test_malformed_table_text():
    with pytest.raises(CalibrationError):
        parse_tables("order,kind,field,value\n3,KOM16,slice_luts,many\n")
    with pytest.raises(CalibrationError, match="unknown field"):
        parse_tables("order,kind,field,value\n3,KOM16,dsp_blocks,1\n")


# -- architectures ----------------------------------------------------------------------------

def test_builtin_inventories():
    alex = builtin_arch("alexnet")
    assert alex.input_dims == (227, 227, 3) and alex.conv_layers == 5
    assert dict(alex.kernel_inventory) == {11: 96, 5: 256, 3: 1024}
    assert builtin_arch("VGG16").kernel_inventory == ((3, 3968),)
    assert builtin_arch("vgg19").kernel_inventory == ((3, 4992),)
    assert (builtin_arch("vgg16").conv_layers, builtin_arch("vgg19").conv_layers) == (12, 14)
    assert builtin_arch("vgg19").total_kernels - builtin_arch("vgg16").total_kernels == 1024
    assert set(builtin_names()) == {"ALEXNET", "VGG16", "VGG19"}


def test_unknown_arch():
    with pytest.raises(ValueError):
        builtin_arch("resnet50")


def test_arch_validation():
    with pytest.raises(ValueError):
        CnnArchSpec("even", (8, 8, 1), 1, ((4, 1),))
    with pytest.raises(ValueError):
        CnnArchSpec("empty", (8, 8, 1), 1, ((3, 0),))


def test_vgg16_kom16_totals():
    r = workload_report(builtin_arch("vgg16"), "kom16")
    assert r.total_instances == 107136
    assert r.totals["slice_luts"] == 65995776


def test_alexnet_11x11_row():
    for kind in KINDS:
        row = workload_report(builtin_arch("alexnet"), kind).rows[0]
        assert (row.kernel_size, row.instances) == (11, 127776)


def test_single_pointwise_kernel_is_unit_cost():
    arch = CnnArchSpec("one", (1, 1, 1), 1, ((1, 1),), source="test")
    for kind, unit in default_unit_costs().items():
        assert workload_report(arch, kind).totals == unit.scaled(1)


@given(st.lists(st.tuples(st.sampled_from([1, 3, 5, 7, 11]), st.integers(1, 5000)), min_size=1, max_size=6),
       st.sampled_from(KINDS))
def test_row_conservation(inventory, kind):
    arch = CnnArchSpec("random", (32, 32, 3), 3, tuple(inventory), source="test")
    r = workload_report(arch, kind)
    assert r.total_instances == sum(c * k ** 3 for k, c in inventory)
    for f in FPGA_FIELDS:
        assert r.totals[f] == sum(row.cost[f] for row in r.rows)
    assert r.total_kernels == sum(c for _, c in inventory)


def test_report_exports():
    r = workload_report(builtin_arch("alexnet"), "bw32")
    doc = json.loads(r.to_json())
    assert doc["total_instances"] == r.total_instances
    assert [row["instances"] for row in doc["rows"]] == [row.instances for row in r.rows]
    lines = r.to_csv().splitlines()
    assert lines[0].split(",")[:3] == ["kernel", "kernel_count", "instances"]
    assert lines[-1].startswith("total,")
    assert len(lines) == 2 + len(r.rows)
