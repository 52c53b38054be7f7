"""JSON interchange format for netlists.

Document shape (field names are fixed, unknown fields are rejected)::

    {"name": "...",
     "inputs":  [{"name": "A", "width": 8}, ...],
     "outputs": [{"name": "P", "width": 16}, ...],
     "gates":   [{"id": "...", "kind": "AND", "in": ["A[0]", "B[0]"], "out": "P[0]"}, ...],
     "registers": [{"in": "n12", "out": "n12@1", "stage": 1}, ...]}
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

from .core import Gate, GateKind, Netlist, NetlistError, Port, Register

_TOP = {"name", "inputs", "outputs", "gates", "registers"}
_PORT = {"name", "width"}
_GATE = {"id", "kind", "in", "out"}
_REG = {"in", "out", "stage"}


class FormatError(NetlistError):
    pass


def to_dict(netlist: Netlist) -> dict[str, Any]:
    return {
        "name": netlist.name,
        "inputs": [{"name": p.name, "width": p.width} for p in netlist.inputs],
        "outputs": [{"name": p.name, "width": p.width} for p in netlist.outputs],
        "gates": [
            {"id": g.id, "kind": g.kind.value, "in": list(g.inputs), "out": g.output}
            for g in netlist.gates
        ],
        "registers": [{"in": r.input, "out": r.output, "stage": r.stage} for r in netlist.registers],
    }


def _fields(obj: Any, allowed: set[str], where: str, required: set[str] | None = None) -> dict:
    if not isinstance(obj, dict):
        raise FormatError(f"{where}: expected an object, got {type(obj).__name__}")
    if unknown := set(obj) - allowed:
        raise FormatError(f"{where}: unknown field(s) {sorted(unknown)}")
    if missing := (allowed if required is None else required) - set(obj):
        raise FormatError(f"{where}: missing field(s) {sorted(missing)}")
    return obj


def _str(value: Any, where: str) -> str:
    if not isinstance(value, str):
        raise FormatError(f"{where}: expected a string")
    return value


def _int(value: Any, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise FormatError(f"{where}: expected an integer")
    return value


def from_dict(doc: Any) -> Netlist:
    """Parse an interchange document.  The netlist is not validated here."""
    doc = _fields(doc, _TOP, "netlist", required=_TOP - {"registers"})
    ports = {}
    for key in ("inputs", "outputs"):
        if not isinstance(doc[key], list):
            raise FormatError(f"{key}: expected a list")
        parsed = []
        for i, p in enumerate(doc[key]):
            where = f"{key}[{i}]"
            p = _fields(p, _PORT, where)
            parsed.append(Port(_str(p["name"], where + ".name"), _int(p["width"], where + ".width")))
        ports[key] = tuple(parsed)
    gates = []
    if not isinstance(doc["gates"], list):
        raise FormatError("gates: expected a list")
    for i, g in enumerate(doc["gates"]):
        where = f"gates[{i}]"
        g = _fields(g, _GATE, where)
        try:
            kind = GateKind(_str(g["kind"], where + ".kind"))
        except ValueError:
            raise FormatError(f"{where}: unknown gate kind {g['kind']!r}") from None
        if not isinstance(g["in"], list):
            raise FormatError(f"{where}.in: expected a list")
        gates.append(Gate(_str(g["id"], where + ".id"), kind,
                          tuple(_str(w, where + ".in") for w in g["in"]),
                          _str(g["out"], where + ".out")))
    registers = []
    for i, r in enumerate(doc.get("registers", [])):
        where = f"registers[{i}]"
        r = _fields(r, _REG, where)
        registers.append(Register(_str(r["in"], where + ".in"), _str(r["out"], where + ".out"),
                                  _int(r["stage"], where + ".stage")))
    return Netlist(_str(doc["name"], "name"), ports["inputs"], ports["outputs"],
                   tuple(gates), tuple(registers))


def dumps(netlist: Netlist) -> str:
    return json.dumps(to_dict(netlist), indent=1)


def loads(text: str) -> Netlist:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"not a JSON document: {exc}") from None
    return from_dict(doc)


def export_netlist(netlist: Netlist, path: str | Path) -> None:
    Path(path).write_text(dumps(netlist) + "\n")


def import_netlist(path: str | Path) -> Netlist:
    return loads(Path(path).read_text())
