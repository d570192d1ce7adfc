import json

import numpy as np
import pytest

from conftest import plan_for, random_states
from qmul.circuit_ir import metrics
from qmul.serialize import FormatError, from_json, parse_qasm, to_json, to_qasm
from qmul.sim import simulate_batch


def test_qasm_header_and_registers(plan4):
    text = to_qasm(plan4.circuit, plan4.registers)
    lines = text.splitlines()
    assert lines[0] == "OPENQASM 2.0;"
    assert lines[1] == 'include "qelib1.inc";'
    assert f"qreg q[{plan4.circuit.qubit_count}];" in lines
    assert "// @reg x input_x 0-3" in lines


def test_qasm_round_trip(plan4):
    c2, regs = parse_qasm(to_qasm(plan4.circuit, plan4.registers))
    assert c2.gates == plan4.circuit.gates
    assert metrics(c2) == metrics(plan4.circuit)
    assert regs["output"].qubits == plan4.output.qubits
    s = random_states(c2.qubit_count, 100, seed=4)
    assert np.array_equal(simulate_batch(c2, s), simulate_batch(plan4.circuit, s))


def test_qasm_deterministic():
    a = to_qasm(plan_for(3).circuit, plan_for(3).registers)
    from qmul.builders import build_multiplier

    p = build_multiplier(3)
    assert to_qasm(p.circuit, p.registers) == a


@pytest.mark.parametrize("text", [
    "qreg q[2];\n",
    "OPENQASM 2.0;\nqreg q[2];\nh q[0];\n",
    "OPENQASM 2.0;\ncx q[0],q[1];\n",
    "OPENQASM 2.0;\nqreg q[2];\nqreg r[2];\n",
    "OPENQASM 2.0;\n",
])
def test_qasm_rejects_unsupported(text):
    with pytest.raises(FormatError):
        parse_qasm(text)


def test_json_round_trip(plan4):
    text = to_json(plan4.circuit, plan4.registers, {"n": 4}, plan4.high_water)
    doc = json.loads(text)
    assert len(doc["gates"]) == plan4.metrics.total_gates
    assert doc["metrics"]["ancilla_high_water"] == 48
    c2, regs = from_json(text)
    assert c2.gates == plan4.circuit.gates
    assert regs["x"].role == "input_x"
    with pytest.raises(FormatError):
        from_json("{}")
