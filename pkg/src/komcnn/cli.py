"""Command-line front end: ``komcnn <subcommand> ...``.

Exit status is 0 on success, 1 on any oracle mismatch, validation defect,
calibration failure or malformed input, and 2 on bad usage.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Any, Callable

from .multipliers import Family, KomVariant, MultiplierSpec, SpecError, generate
from .multipliers.check import DEFAULT_SEED, exhaustive_operands, products, random_operands, sweep
from .netlist import (
    DelayTable,
    NetlistError,
    export_netlist,
    flatten,
    import_netlist,
    insert_pipeline,
    validate,
)
from .netlist.timing import FPGA_FIELDS, cost_report, critical_path
from .systolic import ConfigurationError, EngineConfig, Instruction, execute, read_tensor, write_tensor
from .systolic.ops import ShapeError
from .systolic.tensor import TensorFormatError
from .workload import (
    ORDERS,
    CalibrationError,
    MultiplierKind,
    builtin_arch,
    calibrate_unit_costs,
    diff_tables,
    load_tables,
    workload_report,
)


class CliFailure(Exception):
    """A check failed; the message is printed and the exit status is 1."""


def parse_int(text: str) -> int:
    """Decimal or 0x-prefixed hexadecimal, optionally negative."""
    try:
        return int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a decimal or 0x-hex integer: {text!r}") from None


def _emit(args, text: str, machine: Any) -> None:
    if args.format == "machine":
        print(json.dumps(machine, indent=2, sort_keys=True))
    else:
        print(text)


# -- netlist loading ------------------------------------------------------------

def _checked(netlist):
    defects = validate(netlist)
    if defects:
        lines = "\n".join(f"  {d.code}: {d.message} ({d.where})" for d in defects[:20])
        raise CliFailure(f"netlist {netlist.name!r} has {len(defects)} defect(s):\n{lines}")
    return netlist


def _spec_from_args(args) -> MultiplierSpec:
    return MultiplierSpec(Family(args.family), args.width, KomVariant(args.variant),
                          pipelined=args.pipelined)


def _load_target(args):
    """Return (netlist, spec or None) from ``--netlist`` or ``--family/--width``."""
    if args.netlist:
        netlist = _checked(import_netlist(args.netlist))
        return netlist, MultiplierSpec.from_netlist_name(netlist.name)
    if not (args.family and args.width):
        raise CliFailure("give either --netlist PATH or --family F --width N")
    spec = _spec_from_args(args)
    return generate(spec), spec


# -- subcommands ------------------------------------------------------------------

def cmd_gen(args) -> int:
    spec = _spec_from_args(args)
    netlist = _checked(generate(spec))
    export_netlist(netlist, args.out)
    info = {"name": netlist.name, "gates": len(netlist.gates), "registers": len(netlist.registers),
            "stage_count": netlist.stage_count, "out": str(args.out)}
    _emit(args, f"wrote {netlist.name}: {info['gates']} gates, {info['registers']} registers, "
                f"{info['stage_count']} stages -> {args.out}", info)
    return 0


def _to_pattern(value: int, width: int, signed: bool) -> int:
    lo = -(1 << (width - 1)) if signed else 0
    if not (lo <= value < (1 << width)) or (value < 0 and not signed):
        raise CliFailure(f"operand {value} does not fit in {width} bits")
    return value % (1 << width)


def _from_pattern(value: int, width: int, signed: bool) -> int:
    if signed and value >> (width - 1):
        return value - (1 << width)
    return value


def cmd_eval(args) -> int:
    netlist, spec = _load_target(args)
    width = next(p.width for p in netlist.inputs if p.name == "A")
    out_width = next(p.width for p in netlist.outputs if p.name == "P")
    signed = bool(spec and spec.signed)

    if args.a is not None or args.b is not None:
        if args.a is None or args.b is None:
            raise CliFailure("--a and --b must be given together")
        a = _to_pattern(args.a, width, signed)
        b = _to_pattern(args.b, width, signed)
        got = products(netlist, [a], [b])[0]
        value = _from_pattern(got, out_width, signed)
        report = {"netlist": netlist.name, "a": args.a, "b": args.b, "product": value}
        if spec is not None:
            want = _from_pattern(spec.oracle(a, b), out_width, signed)
            report.update(expected=want, match=value == want)
        _emit(args, str(value), report)
        if spec is not None and value != report["expected"]:
            print(f"mismatch: A={args.a} B={args.b} got {value} expected {report['expected']}",
                  file=sys.stderr)
            return 1
        return 0

    if spec is None:
        raise CliFailure(f"no oracle known for netlist {netlist.name!r}; only --a/--b evaluation is possible")
    if args.exhaustive:
        a_vals, b_vals = exhaustive_operands(width)
        mode = "exhaustive"
    else:
        a_vals, b_vals = random_operands(width, args.random, args.seed)
        mode = f"random seed={args.seed}"
    result = sweep(netlist, spec, a_vals, b_vals)
    text = [f"{netlist.name} {mode}: {result.passed}/{result.total} pass"]
    for m in result.mismatches:
        text.append(f"  mismatch: A={m.a:#x} B={m.b:#x} got {m.got:#x} expected {m.expected:#x}")
    machine = {"netlist": netlist.name, "mode": mode, "total": result.total, "passed": result.passed,
               "mismatches": [m.__dict__ for m in result.mismatches]}
    _emit(args, "\n".join(text), machine)
    return 0 if result.ok else 1


def cmd_timing(args) -> int:
    netlist = _checked(import_netlist(args.netlist))
    delays = DelayTable()
    if args.delays:
        delays = DelayTable.from_mapping(json.loads(Path(args.delays).read_text()))
    cp = critical_path(netlist, delays)
    cost = cost_report(netlist)
    path = list(cp.witness_path)
    shown = path if len(path) <= 6 else [*path[:3], "...", *path[-2:]]
    machine = {
        "netlist": netlist.name,
        "stage_count": netlist.stage_count,
        "per_stage_delay": list(cp.per_stage_delay),
        "max_stage_delay": cp.max_stage_delay,
        "total_unpipelined_delay": cp.total_unpipelined_delay,
        "witness_path": list(cp.witness_path),
        "cost": cost.as_dict(),
    }
    text = "\n".join([
        f"netlist: {netlist.name}",
        f"gates: {cost.gate_count}  registers: {cost.register_count}  stages: {netlist.stage_count}",
        "per-stage delay: " + " ".join(f"{d:g}" for d in cp.per_stage_delay),
        f"max stage delay: {cp.max_stage_delay:g}",
        f"total unpipelined delay: {cp.total_unpipelined_delay:g}",
        f"critical path ({len(path)} gates): " + " -> ".join(shown),
    ])
    _emit(args, text, machine)
    return 0


def cmd_pipeline(args) -> int:
    netlist = _checked(import_netlist(args.netlist))
    if not netlist.is_combinational:
        netlist = flatten(netlist)
    piped = _checked(insert_pipeline(netlist, args.max_depth))
    export_netlist(piped, args.out)
    cp = critical_path(piped)
    info = {"name": piped.name, "stage_count": piped.stage_count, "registers": len(piped.registers),
            "max_stage_delay": cp.max_stage_delay, "out": str(args.out)}
    _emit(args, f"wrote {piped.name}: {piped.stage_count} stages, {len(piped.registers)} registers, "
                f"max stage delay {cp.max_stage_delay:g} -> {args.out}", info)
    return 0


def cmd_systolic(args) -> int:
    program = EngineConfig.parse(Path(args.config).read_text())
    instructions = list(program.instructions)
    if args.weights:
        weights = read_tensor(args.weights)
        first_run = next((i for i, ins in enumerate(instructions) if ins.op == "RUN"), None)
        if first_run is None:
            raise CliFailure("--weights given but the script has no RUN")
        instructions.insert(first_run, Instruction("LOAD_WEIGHTS", weights.data))
    data = read_tensor(args.input)
    results = execute(instructions, data)
    if not results:
        raise CliFailure("script contains no RUN")
    write_tensor(results[-1], args.out)
    machine = {"runs": [{"dims": list(r.dims), "data": list(r.data)} for r in results], "out": str(args.out)}
    text = "\n".join(f"run {i}: {'x'.join(map(str, r.dims))} -> {' '.join(map(str, r.data[:16]))}"
                     + (" ..." if len(r.data) > 16 else "") for i, r in enumerate(results))
    _emit(args, text + f"\nwrote {args.out}", machine)
    return 0


def _calibrated(args):
    cells = load_tables(args.data)
    return cells, calibrate_unit_costs(cells)


def cmd_tables(args) -> int:
    cells, costs = _calibrated(args)
    diffs = diff_tables(cells, costs)
    matched = sum(d.shipped == d.predicted for d in diffs)
    lines = []
    machine: dict[str, Any] = {"tables": {}, "cells": len(diffs), "matched": matched,
                               "unit_costs": {k.value: {f: getattr(u, f) for f in FPGA_FIELDS}
                                              for k, u in costs.items()}}
    predicted = {(d.order, d.kind, d.field): d.predicted for d in diffs}
    for order in ORDERS:
        lines.append(f"order {order} ({order ** 3} multipliers): {' '.join(FPGA_FIELDS)}")
        table = {}
        for kind in MultiplierKind:
            vals = [predicted[(order, kind, f)] for f in FPGA_FIELDS]
            lines.append(f"{order}×{order}, {kind.value}: {' '.join(map(str, vals))}")
            table[kind.value] = dict(zip(FPGA_FIELDS, vals))
        machine["tables"][str(order)] = table
    for d in diffs:
        if d.shipped != d.predicted:
            lines.append(f"DIFF order {d.order} {d.kind.value} {d.field}: shipped {d.shipped}, "
                         f"model {d.predicted}")
    lines.append(f"{matched}/{len(diffs)} cells match")
    _emit(args, "\n".join(lines), machine)
    return 0 if matched == len(diffs) else 1


def cmd_workload(args) -> int:
    _, costs = _calibrated(args)
    report = workload_report(builtin_arch(args.arch), MultiplierKind.parse(args.multiplier), costs)
    if args.format == "csv":
        print(report.to_csv(), end="")
        return 0
    lines = [f"{report.arch} with {report.kind.value}: {report.total_kernels} kernels, "
             f"{report.total_instances} multiplier instances"]
    for r in report.rows:
        lines.append(f"  {r.kernel_size}x{r.kernel_size} x {r.kernel_count}: {r.instances} instances, "
                     + ", ".join(f"{f}={r.cost[f]}" for f in FPGA_FIELDS))
    lines.append("  total: " + ", ".join(f"{f}={report.totals[f]}" for f in FPGA_FIELDS))
    _emit(args, "\n".join(lines), report.as_dict())
    return 0


# -- parser ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    fmt = argparse.ArgumentParser(add_help=False)
    fmt.add_argument("--format", choices=("text", "machine"), default="text",
                     help="human-readable text or JSON")

    def target_flags(p: argparse.ArgumentParser, required: bool) -> None:
        p.add_argument("--family", choices=[f.value for f in Family], required=required)
        p.add_argument("--width", type=int, required=required)
        p.add_argument("--variant", choices=[v.value for v in KomVariant],
                       default=KomVariant.THREE_PRODUCT.value)
        p.add_argument("--pipelined", action="store_true")

    parser = argparse.ArgumentParser(prog="komcnn", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", parents=[fmt], help="generate a multiplier netlist")
    target_flags(p, required=True)
    p.add_argument("--out", required=True, type=Path)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("eval", parents=[fmt], help="evaluate a multiplier or sweep it against the oracle")
    p.add_argument("--netlist", type=Path)
    target_flags(p, required=False)
    mode = p.add_mutually_exclusive_group(required=True)
    mode.add_argument("--a", type=parse_int)
    mode.add_argument("--exhaustive", action="store_true")
    mode.add_argument("--random", type=int, metavar="COUNT")
    p.add_argument("--b", type=parse_int)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("timing", parents=[fmt], help="critical-path report")
    p.add_argument("--netlist", required=True, type=Path)
    p.add_argument("--delays", type=Path, help="JSON object mapping gate kind to delay")
    p.set_defaults(func=cmd_timing)

    p = sub.add_parser("pipeline", parents=[fmt], help="insert registers by a per-stage depth limit")
    p.add_argument("--netlist", required=True, type=Path)
    p.add_argument("--max-depth", required=True, type=float)
    p.add_argument("--out", required=True, type=Path)
    p.set_defaults(func=cmd_pipeline)

    p = sub.add_parser("systolic", parents=[fmt], help="run a configuration script on the systolic engine")
    p.add_argument("--config", required=True, type=Path)
    p.add_argument("--input", required=True, type=Path)
    p.add_argument("--weights", type=Path)
    p.add_argument("--out", required=True, type=Path)
    p.set_defaults(func=cmd_systolic)

    p = sub.add_parser("tables", parents=[fmt], help="reproduce the resource tables and diff them")
    p.add_argument("--data", type=Path, help="table file to use instead of the shipped one")
    p.set_defaults(func=cmd_tables)

    p = sub.add_parser("workload", help="multiplier resources for a built-in CNN")
    p.add_argument("--arch", required=True, choices=("alexnet", "vgg16", "vgg19"))
    p.add_argument("--multiplier", required=True, choices=[k.value.lower() for k in MultiplierKind])
    p.add_argument("--format", choices=("text", "machine", "csv"), default="text")
    p.add_argument("--data", type=Path, help="table file to use instead of the shipped one")
    p.set_defaults(func=cmd_workload)
    return parser


_FAILURES = (CliFailure, NetlistError, SpecError, CalibrationError, ConfigurationError,
             TensorFormatError, ShapeError, ValueError, OSError)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    handler: Callable[[Any], int] = args.func
    try:
        return handler(args)
    except _FAILURES as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
