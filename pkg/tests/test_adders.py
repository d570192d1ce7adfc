import math
import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qmul.builders import BuildError, CircuitBuilder, build_carry_increment, build_qcla_add
from qmul.circuit_ir import metrics
from qmul.qubit_alloc import register
from qmul.sim import read_register_batch, simulate_batch, write_register_batch


def _adder(w):
    b = CircuitBuilder()
    a = b.allocate("a", w)
    bb = b.allocate("b", w)
    out = b.allocate("out", w + 1)
    build_qcla_add(a, bb, out, b)
    return b, a, bb, out


def run_adder(w, pairs):
    b, a, bb, out = _adder(w)
    c = b.circuit()
    states = np.zeros((c.qubit_count, len(pairs)), dtype=bool)
    write_register_batch(states, a, [p[0] for p in pairs])
    write_register_batch(states, bb, [p[1] for p in pairs])
    states = simulate_batch(c, states)
    scratch = [q for q in range(c.qubit_count) if q not in set(a) | set(bb) | set(out)]
    return (
        read_register_batch(states, a),
        read_register_batch(states, bb),
        read_register_batch(states, out),
        states[scratch].any(axis=0) if scratch else np.zeros(len(pairs), bool),
    )


def test_small_example():
    _, _, out, dirty = run_adder(4, [(13, 11), (0, 0)])
    assert out == [24, 0]
    assert not dirty.any()


@pytest.mark.parametrize("w", [1, 2, 3, 4, 5, 6, 7])
def test_exhaustive_small_widths(w):
    pairs = [(p, q) for p in range(1 << w) for q in range(1 << w)]
    a, b, out, dirty = run_adder(w, pairs)
    assert a == [p[0] for p in pairs]
    assert b == [p[1] for p in pairs]
    assert out == [p + q for p, q in pairs]
    assert not dirty.any()


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 40), st.data())
def test_random_widths(w, data):
    pairs = [(data.draw(st.integers(0, (1 << w) - 1)), data.draw(st.integers(0, (1 << w) - 1)))
             for _ in range(8)]
    _, _, out, dirty = run_adder(w, pairs)
    assert out == [p + q for p, q in pairs]
    assert not dirty.any()


@pytest.mark.parametrize("w", [2, 4, 8, 16, 32, 64])
def test_cost_bounds(w):
    b, *_ = _adder(w)
    m = metrics(b.circuit())
    lg = math.log2(w)
    assert m.depth <= 2 * lg + 7
    assert m.toffoli_depth <= 2 * lg + 4
    assert m.count_toffoli <= 5 * w - 3 * lg
    assert m.total_gates <= 8 * w - 3 * lg


def test_w8_example_bounds():
    b, *_ = _adder(8)
    m = metrics(b.circuit())
    assert m.depth <= 13 and m.count_toffoli <= 31


@pytest.mark.parametrize("w", [1, 4, 8, 13, 16, 32])
def test_scratch_count(w):
    b, *_ = _adder(w)
    expected = w - bin(w).count("1") - int(math.floor(math.log2(w)))
    assert b.alloc.pool_size - (3 * w + 1) == expected
    assert b.alloc.live_count == 3 * w + 1


def test_adder_errors():
    b = CircuitBuilder()
    a, bb = b.allocate("a", 4), b.allocate("b", 3)
    with pytest.raises(BuildError):
        build_qcla_add(a, bb, b.allocate("o", 5), b)
    c = b.allocate("c", 4)
    with pytest.raises(BuildError):
        build_qcla_add(a, c, b.allocate("o2", 4), b)
    with pytest.raises(BuildError):
        build_qcla_add(a, c, register("o3", a.qubits + (99,)), b)


def _incrementer(m):
    b = CircuitBuilder()
    prefix = b.allocate("p", m)
    c = b.allocate("c", 1)
    out = b.allocate("o", m)
    build_carry_increment(prefix, c, out, b)
    return b, prefix, c, out


def run_increment(m, cases):
    b, prefix, carry, out = _incrementer(m)
    circ = b.circuit()
    states = np.zeros((circ.qubit_count, len(cases)), dtype=bool)
    write_register_batch(states, prefix, [p for p, _ in cases])
    write_register_batch(states, carry, [c for _, c in cases])
    states = simulate_batch(circ, states)
    rest = [q for q in range(circ.qubit_count) if q not in set(prefix) | set(carry) | set(out)]
    assert read_register_batch(states, prefix) == [p for p, _ in cases]
    assert read_register_batch(states, carry) == [c for _, c in cases]
    if rest:
        assert not states[rest].any()
    return read_register_batch(states, out)


def test_increment_examples():
    assert run_increment(4, [(5, 1), (5, 0), (0, 0)]) == [6, 5, 0]


@pytest.mark.parametrize("m", [1, 2, 3, 4, 5, 8])
def test_increment_exhaustive(m):
    cases = [(p, c) for p in range(1 << m) for c in (0, 1) if p + c < 1 << m]
    assert run_increment(m, cases) == [p + c for p, c in cases]


def test_increment_wide_random():
    rng = random.Random(3)
    m = 32
    cases = [(rng.getrandbits(m) >> 1, rng.randint(0, 1)) for _ in range(200)]
    cases += [((1 << m) - 2, 1), ((1 << 31) - 1, 1)]
    assert run_increment(m, cases) == [p + c for p, c in cases]


@pytest.mark.parametrize("d", range(1, 9))
def test_increment_level_bounds(d):
    m = 1 << (d - 1)
    b, *_ = _incrementer(m)
    met = metrics(b.circuit())
    assert met.depth <= 2 * d + 5
    assert met.toffoli_depth <= 2 * d + 2
    assert met.count_toffoli <= 5 * m - 3 * (d - 1)


def test_increment_errors():
    b = CircuitBuilder()
    p, c2, o = b.allocate("p", 4), b.allocate("c", 2), b.allocate("o", 4)
    with pytest.raises(BuildError):
        build_carry_increment(p, c2, o, b)
    with pytest.raises(BuildError):
        build_carry_increment(p, c2.slice(0, 1), b.allocate("o5", 5), b)
