"""Register fan-out and indicator-controlled copying."""

from __future__ import annotations

from typing import Sequence

from ..circuit_ir import Circuit, cnot, toffoli
from ..qubit_alloc import RegisterHandle
from .base import CircuitBuilder


class BuildError(ValueError):
    pass


def _check_disjoint(regs: Sequence[RegisterHandle]) -> None:
    seen: set[int] = set()
    for r in regs:
        for q in r.qubits:
            if q in seen:
                raise BuildError(f"register {r.name!r} overlaps another register at qubit {q}")
            seen.add(q)


def _finish(gates, builder: CircuitBuilder | None, label: str) -> Circuit:
    if builder is not None:
        builder.sink.extend(gates)
        return Circuit(builder.alloc.pool_size, tuple(gates), label)
    count = 1 + max((q for g in gates for q in g.operands), default=-1)
    return Circuit(count, tuple(gates), label)


def build_fast_copy(
    src: RegisterHandle,
    targets: Sequence[RegisterHandle],
    builder: CircuitBuilder | None = None,
) -> Circuit:
    """Copy ``src`` onto every (zeroed) target by repeated doubling.

    At each round every filled register fans out to one unfilled register
    with width-many disjoint CNOTs, so the depth is ceil(log2(1 + len(targets))).
    """
    for t in targets:
        if t.width != src.width:
            raise BuildError(f"target {t.name!r} width {t.width} != source width {src.width}")
    _check_disjoint([src, *targets])
    gates = []
    filled = [src]
    pending = list(targets)
    while pending:
        fresh = []
        for f in filled:
            if not pending:
                break
            t = pending.pop(0)
            gates.extend(cnot(a, b) for a, b in zip(f.qubits, t.qubits))
            fresh.append(t)
        filled.extend(fresh)
    return _finish(gates, builder, "fast_copy")


def build_conditional_copy(
    ind: RegisterHandle,
    ctrl: RegisterHandle,
    targ: RegisterHandle,
    builder: CircuitBuilder | None = None,
) -> Circuit:
    """targ[k] ^= ind[k] & ctrl[k]; one Toffoli layer."""
    if not ind.width == ctrl.width == targ.width:
        raise BuildError(
            f"width mismatch: ind={ind.width} ctrl={ctrl.width} targ={targ.width}"
        )
    _check_disjoint([ind, ctrl, targ])
    gates = [toffoli(i, c, t) for i, c, t in zip(ind.qubits, ctrl.qubits, targ.qubits)]
    return _finish(gates, builder, "conditional_copy")


def build_partial_products(
    n: int,
    yfan: Sequence[RegisterHandle],
    xcopies: Sequence[RegisterHandle],
    targs: Sequence[RegisterHandle],
    builder: CircuitBuilder | None = None,
) -> Circuit:
    """Leaf i receives y_i * x, using fanned-out bit i of y and copy i of x."""
    if not len(yfan) == len(xcopies) == len(targs) == n:
        raise BuildError(
            f"expected {n} registers per list, got {len(yfan)}, {len(xcopies)}, {len(targs)}"
        )
    _check_disjoint([*yfan, *xcopies, *targs])
    gates = []
    for ind, ctrl, targ in zip(yfan, xcopies, targs):
        gates.extend(build_conditional_copy(ind, ctrl, targ).gates)
    return _finish(gates, builder, "partial_products")
