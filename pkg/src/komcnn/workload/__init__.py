"""CNN kernel inventories and the calibrated ``n**3`` resource model."""

from .arch import CnnArchSpec, WorkloadReport, WorkloadRow, builtin_arch, builtin_names, workload_report
from .tables import (
    ORDERS,
    CalibrationError,
    CellDiff,
    MultiplierKind,
    TableCell,
    UnitCost,
    calibrate_unit_costs,
    default_unit_costs,
    diff_tables,
    estimate_matrix_mult_resources,
    load_tables,
    multiplier_count,
    parse_tables,
)

__all__ = [
    "CnnArchSpec", "WorkloadReport", "WorkloadRow", "builtin_arch", "builtin_names",
    "workload_report", "ORDERS", "CalibrationError", "CellDiff", "MultiplierKind", "TableCell",
    "UnitCost", "calibrate_unit_costs", "default_unit_costs", "diff_tables",
    "estimate_matrix_mult_resources", "load_tables", "multiplier_count", "parse_tables",
]
