"""Gate-level IR for reversible X/CNOT/Toffoli circuits, plus ASAP scheduling.

Depth is measured with an as-soon-as-possible layering over the qubit-sharing
conflict relation: two gates conflict when they touch a common qubit, whether
as control or target. Gate commutation is never exploited, so metrics depend
only on the emitted gate order.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, Sequence

X = "X"
CNOT = "CNOT"
TOFFOLI = "Toffoli"

ARITY = {X: 1, CNOT: 2, TOFFOLI: 3}


class CircuitError(ValueError):
    """Raised for malformed gates or circuits."""


@dataclass(frozen=True, slots=True)
class Gate:
    """A reversible gate. The last operand is always the target."""

    kind: str
    operands: tuple[int, ...]

    def __post_init__(self) -> None:
        arity = ARITY.get(self.kind)
        if arity is None:
            raise CircuitError(f"unknown gate kind {self.kind!r}")
        if len(self.operands) != arity:
            raise CircuitError(
                f"{self.kind} takes {arity} operand(s), got {len(self.operands)}"
            )
        if len(set(self.operands)) != arity:
            raise CircuitError(f"duplicate operand in {self.kind}{self.operands}")
        if any(q < 0 for q in self.operands):
            raise CircuitError(f"negative qubit index in {self.kind}{self.operands}")

    @property
    def target(self) -> int:
        return self.operands[-1]

    @property
    def controls(self) -> tuple[int, ...]:
        return self.operands[:-1]

    def remapped(self, qubit_map: Mapping[int, int] | Sequence[int]) -> "Gate":
        return Gate(self.kind, tuple(qubit_map[q] for q in self.operands))

    def __str__(self) -> str:
        return f"{self.kind}({', '.join(map(str, self.operands))})"


def x(t: int) -> Gate:
    return Gate(X, (t,))


def cnot(c: int, t: int) -> Gate:
    return Gate(CNOT, (c, t))


def toffoli(c1: int, c2: int, t: int) -> Gate:
    return Gate(TOFFOLI, (c1, c2, t))


@dataclass(frozen=True)
class Circuit:
    """An ordered, immutable sequence of gates over ``qubit_count`` qubits."""

    qubit_count: int
    gates: tuple[Gate, ...] = ()
    label: str = ""

    def __post_init__(self) -> None:
        if self.qubit_count < 0:
            raise CircuitError("qubit_count must be non-negative")
        if not isinstance(self.gates, tuple):
            object.__setattr__(self, "gates", tuple(self.gates))
        for g in self.gates:
            _check_range(g, self.qubit_count)

    def __len__(self) -> int:
        return len(self.gates)

    def __iter__(self):
        return iter(self.gates)

    def with_qubit_count(self, qubit_count: int) -> "Circuit":
        """Same gates viewed inside a (possibly larger) qubit pool."""
        return Circuit(qubit_count, self.gates, self.label)


def _check_range(gate: Gate, qubit_count: int) -> None:
    for q in gate.operands:
        if q >= qubit_count:
            raise CircuitError(
                f"operand {q} of {gate} out of range for {qubit_count} qubits"
            )


def append(circuit: Circuit, gate: Gate) -> Circuit:
    _check_range(gate, circuit.qubit_count)
    return replace(circuit, gates=circuit.gates + (gate,))


def compose(
    a: Circuit,
    b: Circuit,
    qubit_map: Mapping[int, int] | Sequence[int] | None = None,
) -> Circuit:
    """Circuit running ``a`` then ``b``.

    Without ``qubit_map`` both circuits must have the same qubit count. With a
    map, qubit ``q`` of ``b`` is placed on ``qubit_map[q]`` of ``a``.
    """
    if qubit_map is None:
        if a.qubit_count != b.qubit_count:
            raise CircuitError(
                f"qubit count mismatch: {a.qubit_count} vs {b.qubit_count}"
            )
        tail = b.gates
    else:
        tail = tuple(g.remapped(qubit_map) for g in b.gates)
    return Circuit(a.qubit_count, a.gates + tail, a.label)


def inverted(c: Circuit) -> Circuit:
    # every gate in the set is an involution
    return Circuit(c.qubit_count, c.gates[::-1], c.label)


@dataclass(frozen=True)
class LayerSchedule:
    """ASAP layering; ``layer_of[i]`` is the layer of gate ``i``."""

    layer_of: tuple[int, ...]
    layers: tuple[tuple[int, ...], ...]

    @property
    def depth(self) -> int:
        return len(self.layers)


def asap_layers(gates: Sequence[Gate]) -> list[int]:
    """Layer index of each gate under ASAP scheduling (0-based)."""
    ready: dict[int, int] = {}
    out = []
    for g in gates:
        layer = max((ready.get(q, 0) for q in g.operands), default=0)
        out.append(layer)
        nxt = layer + 1
        for q in g.operands:
            ready[q] = nxt
    return out


def schedule(c: Circuit) -> LayerSchedule:
    layer_of = asap_layers(c.gates)
    depth = max(layer_of, default=-1) + 1
    buckets: list[list[int]] = [[] for _ in range(depth)]
    for i, layer in enumerate(layer_of):
        buckets[layer].append(i)
    return LayerSchedule(tuple(layer_of), tuple(tuple(b) for b in buckets))


def toffoli_depth(gates: Sequence[Gate]) -> int:
    """Longest chain of Toffolis in the qubit-sharing dependency DAG.

    Non-Toffoli gates have weight zero but still carry dependencies.
    """
    ready: dict[int, int] = {}
    best = 0
    for g in gates:
        level = max((ready.get(q, 0) for q in g.operands), default=0)
        if g.kind == TOFFOLI:
            level += 1
            if level > best:
                best = level
        for q in g.operands:
            ready[q] = level
    return best


@dataclass(frozen=True)
class ResourceMetrics:
    depth: int = 0
    toffoli_depth: int = 0
    count_x: int = 0
    count_cnot: int = 0
    count_toffoli: int = 0
    ancilla_high_water: int = 0
    # Standard 7-T / T-depth-3 Toffoli decomposition; an estimate, not synthesized.
    t_count_estimate: int | None = None
    t_depth_estimate: int | None = None

    @property
    def total_gates(self) -> int:
        return self.count_x + self.count_cnot + self.count_toffoli

    def to_dict(self) -> dict:
        d = {
            "depth": self.depth,
            "toffoli_depth": self.toffoli_depth,
            "count_x": self.count_x,
            "count_cnot": self.count_cnot,
            "count_toffoli": self.count_toffoli,
            "total_gates": self.total_gates,
            "ancilla_high_water": self.ancilla_high_water,
        }
        if self.t_count_estimate is not None:
            d["t_count_estimate"] = self.t_count_estimate
            d["t_depth_estimate"] = self.t_depth_estimate
        return d


def gate_counts(gates: Iterable[Gate]) -> dict[str, int]:
    counts = {X: 0, CNOT: 0, TOFFOLI: 0}
    for g in gates:
        counts[g.kind] += 1
    return counts


def metrics(c: Circuit, ancilla_high_water: int = 0) -> ResourceMetrics:
    counts = gate_counts(c.gates)
    layers = asap_layers(c.gates)
    return ResourceMetrics(
        depth=max(layers, default=-1) + 1,
        toffoli_depth=toffoli_depth(c.gates),
        count_x=counts[X],
        count_cnot=counts[CNOT],
        count_toffoli=counts[TOFFOLI],
        ancilla_high_water=ancilla_high_water,
    )


def t_estimate(m: ResourceMetrics) -> ResourceMetrics:
    return replace(
        m,
        t_count_estimate=7 * m.count_toffoli,
        t_depth_estimate=3 * m.toffoli_depth,
    )
