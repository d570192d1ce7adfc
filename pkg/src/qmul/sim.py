"""Basis-state simulator for X/CNOT/Toffoli circuits.

Circuits in this gate set are permutations of basis states, so a state is a
plain bit vector. Batches are stored as a (width, batch) boolean array and
every gate acts on whole rows, which runs many inputs at once.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .circuit_ir import CNOT, TOFFOLI, X, Circuit, schedule
from .qubit_alloc import RegisterHandle


class SimulationError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class BasisState:
    bits: np.ndarray  # 1-D bool array indexed by qubit

    @classmethod
    def zeros(cls, width: int) -> "BasisState":
        return cls(np.zeros(width, dtype=bool))

    @classmethod
    def from_bits(cls, bits: Iterable[int]) -> "BasisState":
        return cls(np.array([bool(b) for b in bits], dtype=bool))

    @property
    def width(self) -> int:
        return int(self.bits.shape[0])

    def __getitem__(self, q: int) -> int:
        return int(self.bits[q])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BasisState):
            return NotImplemented
        return self.width == other.width and bool(np.array_equal(self.bits, other.bits))

    def __hash__(self) -> int:
        return hash(self.bits.tobytes())

    def to_int(self) -> int:
        return sum(1 << i for i in np.flatnonzero(self.bits).tolist())


def _apply(gates, rows: Sequence[np.ndarray]) -> None:
    tmp = np.empty_like(rows[0]) if len(rows) else None
    for g in gates:
        ops = g.operands
        if g.kind == TOFFOLI:
            np.logical_and(rows[ops[0]], rows[ops[1]], out=tmp)
            rows[ops[2]] ^= tmp
        elif g.kind == CNOT:
            rows[ops[1]] ^= rows[ops[0]]
        elif g.kind == X:
            np.logical_not(rows[ops[0]], out=rows[ops[0]])
        else:  # pragma: no cover - Gate validates kinds
            raise SimulationError(f"unknown gate kind {g.kind!r}")


def _check_width(c: Circuit, width: int) -> None:
    if width != c.qubit_count:
        raise SimulationError(f"state width {width} != circuit qubit count {c.qubit_count}")


def simulate_batch(c: Circuit, states: np.ndarray) -> np.ndarray:
    """Run ``c`` on a (width, batch) bool array; returns a new array."""
    states = np.array(states, dtype=bool, copy=True)
    if states.ndim != 2:
        raise SimulationError("batch must be a 2-D (width, batch) array")
    _check_width(c, states.shape[0])
    _apply(c.gates, list(states))
    return states


def simulate(c: Circuit, s: BasisState) -> BasisState:
    _check_width(c, s.width)
    out = simulate_batch(c, s.bits.reshape(-1, 1))
    return BasisState(out[:, 0].copy())


def read_register(s: BasisState, reg: RegisterHandle) -> int:
    for q in reg.qubits:
        if q >= s.width:
            raise SimulationError(f"register {reg.name!r} qubit {q} outside state width {s.width}")
    return sum(int(s.bits[q]) << k for k, q in enumerate(reg.qubits))


def write_register(s: BasisState, reg: RegisterHandle, v: int) -> BasisState:
    if v < 0 or v >= 1 << reg.width:
        raise SimulationError(f"value {v} does not fit in {reg.width}-qubit register {reg.name!r}")
    bits = s.bits.copy()
    for k, q in enumerate(reg.qubits):
        bits[q] = (v >> k) & 1
    return BasisState(bits)


def read_register_batch(states: np.ndarray, reg: RegisterHandle) -> list[int]:
    """Per-column register values of a batch, as exact Python ints."""
    acc = np.zeros(states.shape[1], dtype=object)
    for k, q in enumerate(reg.qubits):
        acc += states[q].astype(object) * (1 << k)
    return [int(v) for v in acc]


def write_register_batch(states: np.ndarray, reg: RegisterHandle, values: Sequence[int]) -> None:
    """Write one value per column into ``reg``, in place."""
    vals = np.array([int(v) for v in values], dtype=object)
    if len(vals) != states.shape[1]:
        raise SimulationError("one value per batch column required")
    if len(vals) and (min(vals) < 0 or max(vals) >= 1 << reg.width):
        raise SimulationError(f"value out of range for {reg.width}-qubit register {reg.name!r}")
    for k, q in enumerate(reg.qubits):
        states[q] = ((vals >> k) & 1).astype(bool)


def trace_simulate(
    c: Circuit,
    s: BasisState,
    probes: Sequence[tuple[int, RegisterHandle]],
) -> list[int]:
    """Register values after the first ``k`` schedule layers, one per probe.

    Layer 0 is the initial state and ``depth`` is the final state.
    """
    _check_width(c, s.width)
    sched = schedule(c)
    depth = sched.depth
    for layer, _ in probes:
        if not 0 <= layer <= depth:
            raise SimulationError(f"unknown layer {layer}; schedule has layers 0..{depth}")
    wanted: dict[int, list[int]] = {}
    for i, (layer, _) in enumerate(probes):
        wanted.setdefault(layer, []).append(i)
    results: list[int] = [0] * len(probes)
    state = s.bits.reshape(-1, 1).copy()
    rows = list(state)

    def capture(layer: int) -> None:
        snap = BasisState(state[:, 0])
        for i in wanted.get(layer, ()):
            results[i] = read_register(snap, probes[i][1])

    capture(0)
    for k, layer in enumerate(sched.layers, start=1):
        _apply([c.gates[i] for i in layer], rows)
        capture(k)
    return results


def safe_layer(c: Circuit, split: int, qubits: Iterable[int]) -> int | None:
    """A probe layer that sees exactly the first ``split`` gates' effect on ``qubits``.

    Returns the smallest k such that every gate before ``split`` targeting one
    of ``qubits`` lies in a layer < k and every later gate targeting one lies
    in a layer >= k. Returns None when the ASAP schedule interleaves them.
    """
    qs = set(qubits)
    layer_of = schedule(c).layer_of
    before = [layer_of[i] for i in range(split) if c.gates[i].target in qs]
    after = [layer_of[i] for i in range(split, len(c.gates)) if c.gates[i].target in qs]
    k = max(before, default=-1) + 1
    if after and min(after) < k:
        return None
    return k


def probe_gate_prefix(
    c: Circuit,
    s: BasisState,
    probes: Sequence[tuple[int, RegisterHandle]],
) -> list[int]:
    """Like :func:`trace_simulate` but probes after the first ``k`` gates."""
    _check_width(c, s.width)
    order = sorted(range(len(probes)), key=lambda i: probes[i][0])
    results: list[int] = [0] * len(probes)
    state = s.bits.reshape(-1, 1).copy()
    rows = list(state)
    done = 0
    for i in order:
        k = probes[i][0]
        if not 0 <= k <= len(c.gates):
            raise SimulationError(f"gate prefix {k} outside 0..{len(c.gates)}")
        _apply(c.gates[done:k], rows)
        done = k
        results[i] = read_register(BasisState(state[:, 0]), probes[i][1])
    return results


# -- parallel sweeps -------------------------------------------------------

def _sweep_chunk(args):
    c, x_reg, y_reg, out_reg, keep, pairs = args
    states = np.zeros((c.qubit_count, len(pairs)), dtype=bool)
    write_register_batch(states, x_reg, [p[0] for p in pairs])
    write_register_batch(states, y_reg, [p[1] for p in pairs])
    states = simulate_batch(c, states)
    xs = read_register_batch(states, x_reg)
    ys = read_register_batch(states, y_reg)
    outs = read_register_batch(states, out_reg)
    rest = np.ones(c.qubit_count, dtype=bool)
    rest[list(keep)] = False
    dirty = states[rest].any(axis=0) if rest.any() else np.zeros(len(pairs), dtype=bool)
    return [
        (p[0], p[1], xs[j], ys[j], outs[j], not bool(dirty[j]))
        for j, p in enumerate(pairs)
    ]


@dataclass(frozen=True)
class PairResult:
    x: int
    y: int
    x_out: int
    y_out: int
    product: int
    clean: bool

    @property
    def ok(self) -> bool:
        return self.x_out == self.x and self.y_out == self.y and self.product == self.x * self.y and self.clean


def default_jobs() -> int:
    env = os.environ.get("QMUL_JOBS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise SimulationError(f"QMUL_JOBS must be an integer, got {env!r}") from None
    return 1


def run_pairs(
    c: Circuit,
    x_reg: RegisterHandle,
    y_reg: RegisterHandle,
    out_reg: RegisterHandle,
    pairs: Sequence[tuple[int, int]],
    jobs: int | None = None,
    chunk: int = 4096,
) -> list[PairResult]:
    """Simulate the multiplier on every (x, y) pair.

    Results come back sorted by input pair regardless of ``jobs``.
    """
    jobs = default_jobs() if jobs is None else max(1, jobs)
    keep = set(x_reg.qubits) | set(y_reg.qubits) | set(out_reg.qubits)
    pairs = sorted((int(a), int(b)) for a, b in pairs)
    chunks = [pairs[i:i + chunk] for i in range(0, len(pairs), chunk)]
    tasks = [(c, x_reg, y_reg, out_reg, keep, ch) for ch in chunks]
    if jobs == 1 or len(tasks) <= 1:
        raw = [r for t in tasks for r in _sweep_chunk(t)]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            raw = [r for part in pool.map(_sweep_chunk, tasks) for r in part]
    return sorted((PairResult(*r) for r in raw), key=lambda r: (r.x, r.y))
