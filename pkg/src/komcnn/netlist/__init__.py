from .core import (
    CONST0,
    CONST1,
    BitVec,
    Defect,
    Gate,
    GateKind,
    Netlist,
    NetlistError,
    Port,
    Register,
    bus_wire,
    flatten,
    instance_scopes,
    validate,
)
from .io import FormatError, export_netlist, from_dict, import_netlist, to_dict
from .pipeline import PipelineError, insert_pipeline
from .sim import ClockedSimulator, PipelineRun, evaluate, evaluate_many, simulate_pipelined
from .timing import (
    UNIT_DELAYS,
    CostReport,
    CriticalPath,
    DelayTable,
    TimingError,
    cost_report,
    critical_path,
)

__all__ = [
    "CONST0", "CONST1", "BitVec", "Defect", "Gate", "GateKind", "Netlist", "NetlistError",
    "Port", "Register", "bus_wire", "flatten", "instance_scopes", "validate",
    "FormatError", "export_netlist", "from_dict", "import_netlist", "to_dict",
    "PipelineError", "insert_pipeline",
    "ClockedSimulator", "PipelineRun", "evaluate", "evaluate_many", "simulate_pipelined",
    "UNIT_DELAYS", "CostReport", "CriticalPath", "DelayTable", "TimingError",
    "cost_report", "critical_path",
]
