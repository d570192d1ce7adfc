"""Out-of-place carry-lookahead adders.

All adders here share one engine: a Brent-Kung style prefix network in the
layout of Draper, Kutin, Rains and Svore. Generates land directly in the
output register, propagates are formed in place on the second operand, and
block propagates live in scratch qubits that are restored to zero. Positions
where one operand is logically zero get no generate and reuse the other
operand's qubit as their propagate, so zero padding is never allocated.
"""

from __future__ import annotations

from typing import Sequence

from ..circuit_ir import Circuit
from ..qubit_alloc import RegisterHandle
from .base import CircuitBuilder
from .copying import BuildError, _check_disjoint


def _bit_length(v: int) -> int:
    return v.bit_length()


def _emit_lookahead(
    bld: CircuitBuilder,
    a_bits: Sequence[int],
    b_bits: Sequence[int],
    z: Sequence[int],
    carry_in: bool = False,
    name: str = "qcla",
) -> None:
    """z ^= a + b, with z logically zero on entry.

    ``len(z)`` may be one more than the operand span (carry-out kept) or equal
    to it (carry-out dropped; caller guarantees no overflow). With
    ``carry_in`` the single a-bit is ``z[0]`` itself, holding the carry-in.
    """
    span = max(len(a_bits), len(b_bits))
    zw = len(z)
    if not span <= zw <= span + 1:
        raise BuildError(f"output width {zw} incompatible with operand span {span}")
    top = zw - 1  # highest carry index that must be produced
    a = list(a_bits) + [None] * (span - len(a_bits))
    b = list(b_bits) + [None] * (span - len(b_bits))
    full = [i for i in range(span) if a[i] is not None and b[i] is not None]
    full_hi = [i for i in full if i >= 1]

    # qubit holding propagate p_i (position 0 never needs one)
    prop: dict[tuple[int, int], int] = {}
    for i in range(1, span):
        prop[(0, i)] = b[i] if b[i] is not None else a[i]

    g_rounds: list[list[tuple[int, int, tuple[int, int]]]] = []
    t = 1
    while (1 << t) <= top:
        step = 1 << t
        half = step >> 1
        rnd = []
        m = 0
        while step * (m + 1) <= top:
            j = step * (m + 1)
            rnd.append((j, j - half, (t - 1, 2 * m + 1)))
            m += 1
        g_rounds.append(rnd)
        t += 1

    c_rounds: dict[int, list[tuple[int, int, tuple[int, int]]]] = {}
    t = 1
    while (1 << t) + (1 << (t - 1)) <= top:
        step = 1 << t
        half = step >> 1
        rnd = []
        m = 1
        while step * m + half <= top:
            rnd.append((step * m + half, step * m, (t - 1, 2 * m)))
            m += 1
        c_rounds[t] = rnd
        t += 1

    needed: set[tuple[int, int]] = set()
    for rnd in g_rounds:
        needed.update(key for _, _, key in rnd if key[0] >= 1)
    for rnd in c_rounds.values():
        needed.update(key for _, _, key in rnd if key[0] >= 1)
    depth_p = max((k[0] for k in needed), default=0)
    for lvl in range(depth_p, 1, -1):
        for (tt, m) in [k for k in needed if k[0] == lvl]:
            needed.add((lvl - 1, 2 * m))
            needed.add((lvl - 1, 2 * m + 1))
    p_rounds = [sorted(m for (tt, m) in needed if tt == lvl) for lvl in range(1, depth_p + 1)]

    nscratch = len(needed)
    scratch = bld.allocate(f"{name}.scratch", nscratch) if nscratch else None
    if scratch is not None:
        it = iter(scratch.qubits)
        for lvl, ms in enumerate(p_rounds, start=1):
            for m in ms:
                prop[(lvl, m)] = next(it)

    # generates
    for i in full:
        if i + 1 <= top:
            bld.ccx(a[i], b[i], z[i + 1])
    # sum bit 0
    if carry_in:
        if b[0] is not None:
            bld.cx(b[0], z[0])
    else:
        for q in (a[0], b[0]):
            if q is not None:
                bld.cx(q, z[0])
    # propagates in place on b
    for i in full_hi:
        bld.cx(a[i], b[i])

    def p_round(lvl: int) -> None:
        for m in p_rounds[lvl - 1]:
            bld.ccx(prop[(lvl - 1, 2 * m)], prop[(lvl - 1, 2 * m + 1)], prop[(lvl, m)])

    if depth_p >= 1:
        p_round(1)
    for t, rnd in enumerate(g_rounds, start=1):
        for j, src, key in rnd:
            bld.ccx(z[src], prop[key], z[j])
        if t + 1 <= depth_p:
            p_round(t + 1)
    for t in range(max(depth_p, max(c_rounds, default=0)), 0, -1):
        for j, src, key in c_rounds.get(t, ()):
            bld.ccx(z[src], prop[key], z[j])
        if t <= depth_p:
            p_round(t)  # self-inverse: clears level t

    for i in range(1, span):
        bld.cx(prop[(0, i)], z[i])
    for i in full_hi:
        bld.cx(a[i], b[i])
    if scratch is not None:
        bld.free(scratch)


def build_qcla_add(
    a: RegisterHandle,
    b: RegisterHandle,
    out: RegisterHandle,
    builder: CircuitBuilder,
) -> Circuit:
    """out = a + b (w + 1 bits); a and b are left unchanged.

    Uses ``w - popcount(w) - floor(log2 w)`` scratch qubits from ``builder``,
    all returned to zero and freed.
    """
    if a.width != b.width:
        raise BuildError(f"operand widths differ: {a.width} vs {b.width}")
    if out.width != a.width + 1:
        raise BuildError(f"output width {out.width} must be {a.width + 1}")
    _check_disjoint([a, b, out])
    mark = builder.mark()
    _emit_lookahead(builder, a.qubits, b.qubits, out.qubits, name=f"qcla({out.name})")
    return builder.since(mark, "qcla_add")


def build_carry_increment(
    prefix: RegisterHandle,
    c: RegisterHandle,
    out: RegisterHandle,
    builder: CircuitBuilder,
) -> Circuit:
    """out = prefix + c for a single carry bit ``c``; caller ensures no overflow."""
    if c.width != 1:
        raise BuildError(f"carry register must have width 1, got {c.width}")
    if out.width != prefix.width:
        raise BuildError(f"output width {out.width} != prefix width {prefix.width}")
    _check_disjoint([prefix, c, out])
    mark = builder.mark()
    builder.cx(c[0], out[0])
    _emit_carry_increment(builder, prefix.qubits, out.qubits, name=f"inc({out.name})")
    return builder.since(mark, "carry_increment")


def _emit_carry_increment(bld, prefix, out, name="inc") -> None:
    # carry-in already sits in out[0]
    _emit_lookahead(bld, [out[0]], prefix, out, carry_in=True, name=name)
