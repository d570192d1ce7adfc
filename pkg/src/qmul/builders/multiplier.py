"""The full out-of-place multiplier |x>|y>|0> -> |x>|y>|xy>."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..circuit_ir import Circuit, ResourceMetrics, metrics
from ..qubit_alloc import RegisterHandle, register
from .base import CircuitBuilder
from .copying import BuildError, build_fast_copy, build_partial_products
from .tree import AdderTree, PartialSumNode, build_adder_tree

STEPS = (
    "fast_copy",
    "partial_products",
    "undo_fast_copy",
    "parallel_adder_tree",
    "redo_fast_copy",
    "undo_partial_products",
    "undo_fast_copy_final",
)


@dataclass
class StepRecord:
    name: str
    start: int
    stop: int
    pool_growth: int  # qubits added to the pool beyond the previous high-water


@dataclass
class MultiplierPlan:
    n: int
    registers: dict[str, RegisterHandle]
    tree: AdderTree
    circuit: Circuit
    steps: list[StepRecord]
    high_water: int  # peak live qubits excluding the x and y inputs
    builder: CircuitBuilder = field(repr=False)
    fused: bool = True
    _metrics: ResourceMetrics | None = field(default=None, repr=False)

    @property
    def root(self) -> PartialSumNode:
        return self.tree.root

    @property
    def output(self) -> RegisterHandle:
        return self.registers["output"]

    @property
    def metrics(self) -> ResourceMetrics:
        if self._metrics is None:
            self._metrics = metrics(self.circuit, ancilla_high_water=self.high_water)
        return self._metrics

    def step_circuit(self, name: str) -> Circuit:
        for s in self.steps:
            if s.name == name:
                return Circuit(self.circuit.qubit_count, self.circuit.gates[s.start:s.stop], name)
        raise KeyError(name)

    def ancilla_qubits(self) -> list[int]:
        keep = set(self.registers["x"]) | set(self.registers["y"]) | set(self.output)
        return [q for q in range(self.circuit.qubit_count) if q not in keep]


def _alloc_copies(bld: CircuitBuilder, n: int, tag: str):
    xs = [bld.allocate(f"x^({i}){tag}", n, "x_copy") for i in range(1, n)]
    ys = [bld.allocate(f"y^({i}){tag}", n, "y_fanout") for i in range(1, n)]
    return xs, ys


def _copy_circuits(bld, x, y, xs, ys) -> tuple[Circuit, Circuit]:
    return build_fast_copy(x, xs), build_fast_copy(y, ys)


def build_multiplier(n: int, fused: bool = True) -> MultiplierPlan:
    """Emit all seven steps of the multiplier for n-bit operands."""
    if n < 1:
        raise BuildError(f"operand width must be >= 1, got {n}")
    bld = CircuitBuilder()
    x = bld.allocate("x", n, "input_x")
    y = bld.allocate("y", n, "input_y")
    # the zeroed product register is part of the initial state
    out = bld.allocate("product", 2 * n, "output")
    regs: dict[str, RegisterHandle] = {"x": x, "y": y, "output": out}
    steps: list[StepRecord] = []
    hw = [bld.alloc.high_water]

    def record(name: str, start: int) -> None:
        steps.append(StepRecord(name, start, len(bld.gates), bld.alloc.high_water - hw[0]))
        hw[0] = bld.alloc.high_water

    def fan_out(tag: str):
        xs, ys = _alloc_copies(bld, n, tag)
        cx_, cy_ = _copy_circuits(bld, x, y, xs, ys)
        return xs, ys, cx_.gates + cy_.gates

    def views(xs, ys):
        xcopies = [x, *xs]
        ycopies = [y, *ys]
        yfan = [register(f"y_{i}^n", (c[i] for c in ycopies), "y_fanout") for i in range(n)]
        return xcopies, yfan

    # 1
    start = len(bld.gates)
    xs, ys, copy_gates = fan_out("")
    bld.gates.extend(copy_gates)
    record(STEPS[0], start)
    # 2
    start = len(bld.gates)
    leaves_regs = [bld.allocate(f"alpha(0,{i})", n, "partial_sum") for i in range(n)]
    xcopies, yfan = views(xs, ys)
    pp = build_partial_products(n, yfan, xcopies, leaves_regs)
    bld.gates.extend(pp.gates)
    record(STEPS[1], start)
    # 3
    start = len(bld.gates)
    bld.gates.extend(reversed(copy_gates))
    for r in (*xs, *ys):
        bld.free(r)
    record(STEPS[2], start)
    # 4
    start = len(bld.gates)
    leaves = [PartialSumNode(0, i, reg, n, 1) for i, reg in enumerate(leaves_regs)]
    tree, _ = build_adder_tree(leaves, bld, fused=fused, output=out if n > 1 else None)
    if not tree.root.is_adder:
        # single leaf (n = 1): copy it out so the leaf can be uncomputed
        bld.cx(tree.root.reg[0], out[0])
    record(STEPS[3], start)
    # 5
    start = len(bld.gates)
    xs, ys, copy_gates = fan_out("'")
    bld.gates.extend(copy_gates)
    record(STEPS[4], start)
    # 6
    start = len(bld.gates)
    xcopies, yfan = views(xs, ys)
    bld.gates.extend(reversed(build_partial_products(n, yfan, xcopies, leaves_regs).gates))
    for reg in leaves_regs:
        bld.free(reg)
    record(STEPS[5], start)
    # 7
    start = len(bld.gates)
    bld.gates.extend(reversed(copy_gates))
    for r in (*xs, *ys):
        bld.free(r)
    record(STEPS[6], start)

    circuit = bld.circuit(f"multiplier(n={n})")
    return MultiplierPlan(
        n=n,
        registers=regs,
        tree=tree,
        circuit=circuit,
        steps=steps,
        high_water=bld.alloc.high_water - 2 * n,
        builder=bld,
        fused=fused,
    )
