"""OpenQASM 2.0 and JSON serialization of circuits.

The QASM writer uses one flat register ``q`` and records named registers as
``// @reg`` comment lines. The reader accepts exactly the emitted subset.
"""

from __future__ import annotations

import json
import re
from typing import Mapping

from . import __version__
from .circuit_ir import CNOT, TOFFOLI, X, Circuit, Gate, metrics
from .qubit_alloc import RegisterHandle, register

QASM_HEADER = 'OPENQASM 2.0;\ninclude "qelib1.inc";\n'
_QASM_NAME = {X: "x", CNOT: "cx", TOFFOLI: "ccx"}
_KIND_OF = {v: k for k, v in _QASM_NAME.items()}


class FormatError(ValueError):
    pass


def _ranges(qubits) -> str:
    """Compress an ordered index list, e.g. [0,1,2,7] -> '0-2,7'."""
    parts = []
    qs = list(qubits)
    i = 0
    while i < len(qs):
        j = i
        while j + 1 < len(qs) and qs[j + 1] == qs[j] + 1:
            j += 1
        parts.append(str(qs[i]) if i == j else f"{qs[i]}-{qs[j]}")
        i = j + 1
    return ",".join(parts)


def _unranges(text: str) -> list[int]:
    out: list[int] = []
    for part in text.split(","):
        if "-" in part:
            lo, hi = part.split("-")
            out.extend(range(int(lo), int(hi) + 1))
        else:
            out.append(int(part))
    return out


def to_qasm(c: Circuit, registers: Mapping[str, RegisterHandle] | None = None) -> str:
    lines = [QASM_HEADER.rstrip("\n"), f"// generated by qmul {__version__}"]
    for name, reg in (registers or {}).items():
        lines.append(f"// @reg {name} {reg.role} {_ranges(reg.qubits)}")
    lines.append(f"qreg q[{c.qubit_count}];")
    for g in c.gates:
        args = ",".join(f"q[{q}]" for q in g.operands)
        lines.append(f"{_QASM_NAME[g.kind]} {args};")
    return "\n".join(lines) + "\n"


_GATE_RE = re.compile(r"^(x|cx|ccx)\s+(q\[\d+\](?:\s*,\s*q\[\d+\])*)\s*;$")
_QREG_RE = re.compile(r"^qreg\s+q\[(\d+)\]\s*;$")
_REG_RE = re.compile(r"^//\s*@reg\s+(\S+)\s+(\S+)\s+([\d,\-]+)$")


def parse_qasm(text: str) -> tuple[Circuit, dict[str, RegisterHandle]]:
    """Parse QASM written by :func:`to_qasm` (x, cx, ccx over one register)."""
    if not text.startswith("OPENQASM 2.0;"):
        raise FormatError("missing 'OPENQASM 2.0;' header")
    count = None
    gates: list[Gate] = []
    regs: dict[str, RegisterHandle] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line == "OPENQASM 2.0;" or line == 'include "qelib1.inc";':
            continue
        if line.startswith("//"):
            m = _REG_RE.match(line)
            if m:
                regs[m.group(1)] = register(m.group(1), _unranges(m.group(3)), m.group(2))
            continue
        m = _QREG_RE.match(line)
        if m:
            if count is not None:
                raise FormatError(f"line {lineno}: only one qreg is supported")
            count = int(m.group(1))
            continue
        m = _GATE_RE.match(line)
        if not m:
            raise FormatError(f"line {lineno}: unsupported statement {line!r}")
        if count is None:
            raise FormatError(f"line {lineno}: gate before qreg declaration")
        ops = tuple(int(q) for q in re.findall(r"\[(\d+)\]", m.group(2)))
        gates.append(Gate(_KIND_OF[m.group(1)], ops))
    if count is None:
        raise FormatError("no qreg declaration")
    return Circuit(count, tuple(gates), "qasm"), regs


def to_json(
    c: Circuit,
    registers: Mapping[str, RegisterHandle] | None = None,
    extra: Mapping | None = None,
    ancilla_high_water: int = 0,
) -> str:
    m = metrics(c, ancilla_high_water=ancilla_high_water)
    doc = {
        "generator": f"qmul {__version__}",
        **(extra or {}),
        "qubit_count": c.qubit_count,
        "registers": {
            name: {"role": reg.role, "qubits": list(reg.qubits)}
            for name, reg in (registers or {}).items()
        },
        "metrics": m.to_dict(),
        "gates": [[_QASM_NAME[g.kind], *g.operands] for g in c.gates],
    }
    return json.dumps(doc, separators=(",", ":")) + "\n"


def from_json(text: str) -> tuple[Circuit, dict[str, RegisterHandle]]:
    try:
        doc = json.loads(text)
        gates = tuple(Gate(_KIND_OF[g[0]], tuple(g[1:])) for g in doc["gates"])
        regs = {
            name: register(name, r["qubits"], r["role"])
            for name, r in doc.get("registers", {}).items()
        }
        return Circuit(doc["qubit_count"], gates, "json"), regs
    except (KeyError, TypeError, IndexError, json.JSONDecodeError) as exc:
        raise FormatError(f"malformed circuit JSON: {exc}") from exc
