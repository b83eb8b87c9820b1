"""OpenQASM 2.0 emission and parsing for the gate set used here.

Angles are printed with 17 significant digits so a parameterised gate
round-trips to the identical float. The parser accepts the emitted subset
plus simple multiples of pi (pi/2, -3*pi/4, ...).
"""
from __future__ import annotations

import math
import re

from .circuit import Circuit, Gate

_HEADER = 'OPENQASM 2.0;\ninclude "qelib1.inc";\n'

_PLAIN_GATES = ("x", "sx", "sxdg", "h", "s", "sdg")
_PARAM_GATES = ("rx", "rz", "u1")

_GATE_RE = re.compile(
    r"^(?P<name>[a-z0-9]+)\s*(?:\((?P<param>[^)]*)\))?\s*(?P<args>.*)$"
)
_QARG_RE = re.compile(r"^q\[(\d+)\]$")
_MEASURE_RE = re.compile(r"^measure\s+q\[(\d+)\]\s*->\s*c\[(\d+)\]$")
_PI_RE = re.compile(
    r"^(?P<sign>-?)(?:(?P<coef>\d+(?:\.\d+)?)\s*\*\s*)?pi(?:\s*/\s*(?P<div>\d+(?:\.\d+)?))?$"
)


def _format_angle(value: float) -> str:
    return format(value, ".17g")


def _parse_angle(text: str) -> float:
    text = text.strip()
    try:
        return float(text)
    except ValueError:
        pass
    m = _PI_RE.match(text)
    if not m:
        raise ValueError(f"cannot parse angle {text!r}")
    value = math.pi
    if m.group("coef"):
        value *= float(m.group("coef"))
    if m.group("div"):
        value /= float(m.group("div"))
    if m.group("sign"):
        value = -value
    return value


def emit(circuit: Circuit) -> str:
    lines = [_HEADER + f"qreg q[{circuit.n_qubits}];"]
    cbits = [g.cbit for g in circuit.gates if g.kind == "measure"]
    if cbits:
        lines.append(f"creg c[{max(cbits) + 1}];")
    for g in circuit.gates:
        if g.kind == "measure":
            lines.append(f"measure q[{g.qubits[0]}] -> c[{g.cbit}];")
        elif g.kind == "cx":
            lines.append(f"cx q[{g.qubits[0]}],q[{g.qubits[1]}];")
        elif g.kind in _PARAM_GATES:
            lines.append(f"{g.kind}({_format_angle(g.param)}) q[{g.qubits[0]}];")
        else:
            lines.append(f"{g.kind} q[{g.qubits[0]}];")
    return "\n".join(lines) + "\n"


def parse(text: str) -> Circuit:
    """Parse the subset of OpenQASM 2.0 that emit() produces."""
    n_qubits = None
    gates: list[Gate] = []
    body = re.sub(r"//[^\n]*", "", text)
    for raw in body.split(";"):
        stmt = raw.strip()
        if not stmt:
            continue
        if stmt.startswith("OPENQASM"):
            if stmt.split()[1] != "2.0":
                raise ValueError(f"unsupported version in {stmt!r}")
            continue
        if stmt.startswith("include"):
            continue
        m = re.match(r"^qreg\s+q\[(\d+)\]$", stmt)
        if m:
            n_qubits = int(m.group(1))
            continue
        if re.match(r"^creg\s+c\[(\d+)\]$", stmt):
            continue
        if n_qubits is None:
            raise ValueError("gate before qreg declaration")
        m = _MEASURE_RE.match(stmt)
        if m:
            gates.append(Gate("measure", (int(m.group(1)),), cbit=int(m.group(2))))
            continue
        m = _GATE_RE.match(stmt)
        if not m:
            raise ValueError(f"cannot parse statement {stmt!r}")
        name = m.group("name")
        args = [a.strip() for a in m.group("args").split(",") if a.strip()]
        qubits = []
        for arg in args:
            qm = _QARG_RE.match(arg)
            if not qm:
                raise ValueError(f"bad qubit argument {arg!r} in {stmt!r}")
            qubits.append(int(qm.group(1)))
        if name == "cx":
            if len(qubits) != 2:
                raise ValueError(f"cx needs two qubits in {stmt!r}")
            gates.append(Gate("cx", tuple(qubits)))
        elif name in _PLAIN_GATES:
            if m.group("param") is not None or len(qubits) != 1:
                raise ValueError(f"malformed {name} statement {stmt!r}")
            gates.append(Gate(name, tuple(qubits)))
        elif name in _PARAM_GATES:
            if m.group("param") is None or len(qubits) != 1:
                raise ValueError(f"malformed {name} statement {stmt!r}")
            gates.append(Gate(name, tuple(qubits), param=_parse_angle(m.group("param"))))
        else:
            raise ValueError(f"unsupported gate {name!r}")
    if n_qubits is None:
        raise ValueError("missing qreg declaration")
    return Circuit(n_qubits, tuple(gates))
