"""Partial-sum adder tree.

Node (d, r) holds the weighted sum of the 2**d consecutive partial products
starting at index r * 2**d. A parent at level d combines its children as
``left + 2**(2**(d-1)) * right``; the low 2**(d-1) bits come straight from the
left child and only the remaining span needs an adder.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..circuit_ir import Circuit
from ..qubit_alloc import RegisterHandle
from .adders import _emit_carry_increment, _emit_lookahead
from .base import CircuitBuilder
from .copying import BuildError


def node_width(n: int, terms: int) -> int:
    """Bits needed for a sum of ``terms`` consecutive weighted partial products."""
    return n if terms == 1 else n + terms


@dataclass(eq=False)
class PartialSumNode:
    d: int
    r: int
    reg: RegisterHandle
    n: int
    terms: int  # partial products covered (2**d except at the ragged right edge)
    left: "PartialSumNode | None" = None
    right: "PartialSumNode | None" = None
    carry: RegisterHandle | None = None
    fused: bool = True
    # for nodes carried up unchanged from an odd-length level
    source: "PartialSumNode | None" = None

    @property
    def children(self) -> "tuple[PartialSumNode, PartialSumNode] | None":
        if self.left is None:
            return None
        return (self.left, self.right)

    @property
    def is_adder(self) -> bool:
        return self.left is not None

    def expected(self, x: int, y: int) -> int:
        """Classical value this node must hold for inputs x, y."""
        lo = self.r << self.d
        chunk = (y >> lo) & ((1 << self.terms) - 1)
        return chunk * x


def _emit_modified_add(
    bld: CircuitBuilder,
    d: int,
    left: PartialSumNode,
    right: PartialSumNode,
    out: RegisterHandle,
    fused: bool,
) -> RegisterHandle | None:
    shift = 1 << (d - 1)
    n = left.n
    # suffix: low bits of the left child pass straight through
    for k in range(shift):
        bld.cx(left.reg[k], out[k])
    a = left.reg.qubits[shift:]
    hi = out.qubits[shift:]
    if fused:
        _emit_lookahead(bld, a, right.reg.qubits, hi, name=f"add{d}({out.name})")
        return None
    # overlapping sum over the n low bits of the right child, carry-out kept
    b_lo = right.reg.qubits[:n]
    _emit_lookahead(bld, a, b_lo, hi[: n + 1], name=f"add{d}({out.name}).overlap")
    carry = hi[n] if len(hi) > n else None
    prefix = right.reg.qubits[n:]
    if prefix:
        _emit_carry_increment(bld, prefix, hi[n:], name=f"add{d}({out.name}).inc")
    return carry


def build_modified_add(
    d: int,
    left: PartialSumNode,
    right: PartialSumNode,
    builder: CircuitBuilder,
    fused: bool = True,
    r: int | None = None,
    role: str = "partial_sum",
    out: RegisterHandle | None = None,
) -> tuple[PartialSumNode, Circuit]:
    """Allocate the level-d parent of ``left`` and ``right`` and compute it.

    With ``fused`` the overlap sum and the carry propagation into the right
    child's high bits run as one lookahead pass. Otherwise the overlap adder
    writes its carry-out into the parent and a separate incrementer adds it
    to the high bits. Both leave the children unchanged. A preallocated,
    zeroed ``out`` register of the parent width may be supplied.
    """
    if d < 1:
        raise BuildError(f"adder level must be >= 1, got {d}")
    if left.n != right.n:
        raise BuildError("children built for different operand widths")
    n = left.n
    shift = 1 << (d - 1)
    if left.terms != shift:
        raise BuildError(f"left child covers {left.terms} terms, expected {shift}")
    if left.reg.width != node_width(n, left.terms):
        raise BuildError(f"left child width {left.reg.width} != {node_width(n, left.terms)}")
    if not 1 <= right.terms <= shift or right.reg.width != node_width(n, right.terms):
        raise BuildError(f"right child {right.terms} terms / width {right.reg.width} invalid")
    terms = shift + right.terms
    r = left.r // 2 if r is None else r
    width = node_width(n, terms)
    if out is None:
        out = builder.allocate(f"alpha({d},{r})", width, role)
    elif out.width != width:
        raise BuildError(f"supplied output width {out.width} != node width {width}")
    mark = builder.mark()
    carry_q = _emit_modified_add(builder, d, left, right, out, fused)
    node = PartialSumNode(d, r, out, n, terms, left, right, fused=fused)
    if carry_q is not None:
        k = out.qubits.index(carry_q)
        node.carry = out.slice(k, k + 1)
    return node, builder.since(mark, f"add_{d}")


def uncompute_node(node: PartialSumNode, builder: CircuitBuilder) -> Circuit:
    """Clear ``node.reg`` by running its adder backwards (children must be intact)."""
    if not node.is_adder:
        raise BuildError("leaf and promoted nodes are not produced by an adder")
    mark = builder.mark()
    with builder.inverse_block():
        _emit_modified_add(builder, node.d, node.left, node.right, node.reg, node.fused)
    return builder.since(mark, f"undo_add_{node.d}")


@dataclass
class AdderTree:
    root: PartialSumNode
    levels: list[list[PartialSumNode]]
    # gate-index ranges (into the builder) of each forward level and each undo level
    forward_spans: dict[int, tuple[int, int]] = field(default_factory=dict)
    undo_spans: dict[int, tuple[int, int]] = field(default_factory=dict)
    peak_ancilla: int = 0


def build_adder_tree(
    leaves: list[PartialSumNode],
    builder: CircuitBuilder,
    fused: bool = True,
    output_role: str = "output",
    output: RegisterHandle | None = None,
) -> tuple[AdderTree, Circuit]:
    """Sum the leaves with a binary tree of modified adders, then clean up.

    Levels are built bottom-up; all adders of one level are emitted with
    deferred scratch frees so they can share layers. Afterwards every
    intermediate (non-root adder) register is uncomputed top-down, level by
    level, since clearing a level-k node needs its level-(k-1) children intact.
    Leaves are left in place. If ``output`` is given, the root sum is
    written into it instead of a freshly allocated register.
    """
    if not leaves:
        raise BuildError("adder tree needs at least one leaf")
    n = leaves[0].n
    start_event = len(builder.alloc.events)
    mark = builder.mark()
    levels = [list(leaves)]
    tree = AdderTree(root=leaves[0], levels=levels)
    d = 0
    while len(levels[-1]) > 1:
        d += 1
        prev = levels[-1]
        cur: list[PartialSumNode] = []
        lo = len(builder.gates)
        last = len(prev) <= 2
        with builder.alloc.deferred_free():
            role = output_role if last else "partial_sum"
            for r in range(0, len(prev) - 1, 2):
                dest = output if last else None
                node, _ = build_modified_add(
                    d, prev[r], prev[r + 1], builder, fused, r // 2, role, dest
                )
                cur.append(node)
            if len(prev) % 2:
                odd = prev[-1]
                cur.append(PartialSumNode(d, len(prev) // 2, odd.reg, n, odd.terms,
                                          fused=fused, source=odd))
        tree.forward_spans[d] = (lo, len(builder.gates))
        levels.append(cur)
    tree.root = levels[-1][0]

    # top-down cleanup of every adder output except the root
    for lvl in range(len(levels) - 2, 0, -1):
        lo = len(builder.gates)
        with builder.alloc.deferred_free():
            for node in levels[lvl]:
                if node.is_adder:
                    uncompute_node(node, builder)
                    builder.free(node.reg)
        tree.undo_spans[lvl] = (lo, len(builder.gates))

    tree.peak_ancilla = _peak(builder.alloc.events[start_event:], exclude_roles={output_role})
    return tree, builder.since(mark, "parallel_adder_tree")


def _peak(events, exclude_roles=frozenset()) -> int:
    live = peak = 0
    for e in events:
        if e.role in exclude_roles:
            continue
        live += len(e.qubits) if e.kind == "alloc" else -len(e.qubits)
        peak = max(peak, live)
    return peak
