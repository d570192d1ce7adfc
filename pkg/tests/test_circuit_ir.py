import pytest
from hypothesis import given, strategies as st

from qmul.circuit_ir import (
    Circuit,
    CircuitError,
    CNOT,
    Gate,
    ResourceMetrics,
    X,
    append,
    cnot,
    compose,
    inverted,
    metrics,
    schedule,
    t_estimate,
    toffoli,
    x,
)


def test_append_to_empty():
    c = append(Circuit(2), cnot(0, 1))
    assert c.gates == (cnot(0, 1),)


def test_duplicate_operand_rejected():
    with pytest.raises(CircuitError):
        append(Circuit(6), Gate(CNOT, (5, 5)))


def test_out_of_range_rejected():
    with pytest.raises(CircuitError):
        append(Circuit(2), toffoli(0, 1, 2))


def test_bad_arity_and_kind():
    with pytest.raises(CircuitError):
        Gate(X, (0, 1))
    with pytest.raises(CircuitError):
        Gate("H", (0,))
    with pytest.raises(CircuitError):
        Gate(CNOT, (-1, 0))


def test_gate_parts():
    g = toffoli(3, 4, 5)
    assert g.target == 5 and g.controls == (3, 4)


def test_compose_identity_and_order():
    c = Circuit(3, (cnot(0, 1), toffoli(0, 1, 2)))
    assert compose(c, Circuit(3)).gates == c.gates
    a, b = Circuit(2, (x(0),)), Circuit(2, (cnot(0, 1),))
    assert compose(a, b).gates == (x(0), cnot(0, 1))


def test_compose_mismatch_needs_map():
    with pytest.raises(CircuitError):
        compose(Circuit(3), Circuit(2, (cnot(0, 1),)))
    c = compose(Circuit(4), Circuit(2, (cnot(0, 1),)), qubit_map=[2, 3])
    assert c.gates == (cnot(2, 3),)


def test_inverted():
    assert inverted(Circuit(0)).gates == ()
    c = Circuit(3, (cnot(0, 1), toffoli(0, 1, 2)))
    assert inverted(c).gates == (toffoli(0, 1, 2), cnot(0, 1))


def test_schedule_examples():
    assert schedule(Circuit(4, (cnot(0, 1), cnot(2, 3)))).depth == 1
    assert schedule(Circuit(3, (cnot(0, 1), cnot(1, 2)))).depth == 2


def test_shared_control_conflicts():
    # gates are never commuted, even when they only share a control
    assert schedule(Circuit(3, (cnot(0, 1), cnot(0, 2)))).depth == 2


def test_metrics_empty():
    m = metrics(Circuit(0))
    assert m == ResourceMetrics()
    assert m.total_gates == 0


def test_toffoli_depth_chain_through_cnot():
    c = Circuit(7, (cnot(0, 1), toffoli(1, 2, 3), cnot(3, 4), toffoli(4, 5, 6)))
    m = metrics(c)
    assert m.toffoli_depth == 2
    assert m.depth == 4


def test_toffoli_depth_parallel():
    c = Circuit(6, (toffoli(0, 1, 2), toffoli(3, 4, 5)))
    assert metrics(c).toffoli_depth == 1


def test_t_estimate():
    m = t_estimate(ResourceMetrics(count_toffoli=16, toffoli_depth=1, depth=1))
    assert (m.t_count_estimate, m.t_depth_estimate) == (112, 3)
    z = t_estimate(ResourceMetrics())
    assert (z.t_count_estimate, z.t_depth_estimate) == (0, 0)


def test_t_estimate_multiplier():
    from conftest import plan_for

    m = t_estimate(plan_for(4).metrics)
    assert m.t_count_estimate == 7 * plan_for(4).metrics.count_toffoli


@st.composite
def circuits(draw, max_qubits=6, max_gates=30):
    w = draw(st.integers(3, max_qubits))
    gates = []
    for _ in range(draw(st.integers(0, max_gates))):
        k = draw(st.integers(1, 3))
        ops = draw(st.permutations(range(w)))[:k]
        gates.append(Gate({1: X, 2: CNOT, 3: "Toffoli"}[k], tuple(ops)))
    return Circuit(w, tuple(gates))


@given(circuits())
def test_schedule_invariants(c):
    sched = schedule(c)
    seen = sorted(i for layer in sched.layers for i in layer)
    assert seen == list(range(len(c.gates)))
    for layer in sched.layers:
        qs = [q for i in layer for q in c.gates[i].operands]
        assert len(qs) == len(set(qs))
    last = {}
    for i, g in enumerate(c.gates):
        expected = max((last[q] + 1 for q in g.operands if q in last), default=0)
        assert sched.layer_of[i] == expected
        for q in g.operands:
            last[q] = sched.layer_of[i]
    assert schedule(c) == sched


@given(circuits(), st.data())
def test_append_monotone(c, data):
    w = c.qubit_count
    ops = data.draw(st.permutations(range(w)))[:3]
    before, after = metrics(c), metrics(append(c, toffoli(*ops)))
    assert after.depth >= before.depth
    assert after.toffoli_depth >= before.toffoli_depth
    assert after.count_toffoli == before.count_toffoli + 1
    assert after.toffoli_depth <= after.depth
