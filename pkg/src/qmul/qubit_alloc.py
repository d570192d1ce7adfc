"""Named registers over a growable qubit pool with free/reuse accounting."""

from __future__ import annotations

import heapq
from contextlib import contextmanager
from dataclasses import dataclass
from typing import Callable, Iterator

ROLES = frozenset(
    {
        "input_x",
        "input_y",
        "y_fanout",
        "x_copy",
        "partial_sum",
        "carry",
        "workspace",
        "output",
    }
)


class AllocationError(RuntimeError):
    pass


@dataclass(frozen=True)
class RegisterHandle:
    """An ordered list of qubit indices; ``qubits[k]`` holds the 2**k bit."""

    name: str
    qubits: tuple[int, ...]
    role: str = "workspace"
    # id of the allocation this handle belongs to; slices share it
    alloc_id: int = -1

    def __len__(self) -> int:
        return len(self.qubits)

    def __getitem__(self, k: int) -> int:
        return self.qubits[k]

    def __iter__(self) -> Iterator[int]:
        return iter(self.qubits)

    @property
    def width(self) -> int:
        return len(self.qubits)

    def slice(self, lo: int, hi: int) -> "RegisterHandle":
        return slice_register(self, lo, hi)


def slice_register(reg: RegisterHandle, lo: int, hi: int) -> RegisterHandle:
    """View over ``reg.qubits[lo:hi]``; does not affect liveness."""
    if not 0 <= lo < hi <= reg.width:
        raise AllocationError(
            f"slice [{lo}, {hi}) invalid for {reg.name!r} of width {reg.width}"
        )
    return RegisterHandle(f"{reg.name}[{lo}:{hi}]", reg.qubits[lo:hi], reg.role, reg.alloc_id)


def register(name: str, qubits, role: str = "workspace") -> RegisterHandle:
    """A handle over explicit qubits, outside any allocator."""
    return RegisterHandle(name, tuple(qubits), role)


@dataclass(frozen=True)
class AllocEvent:
    kind: str  # "alloc" or "free"
    name: str
    qubits: tuple[int, ...]
    role: str
    clock: int
    live_after: int


class QubitAllocator:
    """Qubit pool with lowest-index-first reuse and a high-water mark.

    ``clock`` is an optional callable returning the current gate count, so the
    event log can be replayed against a simulation.
    """

    def __init__(self, clock: Callable[[], int] | None = None):
        self._clock = clock or (lambda: 0)
        self._free: list[int] = []  # min-heap
        self._size = 0
        self._live: dict[int, RegisterHandle] = {}
        self._owner: dict[int, int] = {}
        self._next_id = 0
        self._deferred: list[list[RegisterHandle]] = []
        self._pending: set[int] = set()
        self.high_water = 0
        self.events: list[AllocEvent] = []

    @property
    def pool_size(self) -> int:
        return self._size

    @property
    def live_count(self) -> int:
        return self._size - len(self._free)

    @property
    def free_list(self) -> frozenset[int]:
        return frozenset(self._free)

    def live_registers(self) -> list[RegisterHandle]:
        return list(self._live.values())

    def alloc(self, name: str, width: int, role: str = "workspace") -> RegisterHandle:
        if width < 1:
            raise AllocationError(f"cannot allocate register {name!r} of width {width}")
        if role not in ROLES:
            raise AllocationError(f"unknown role {role!r}")
        qubits = []
        while len(qubits) < width and self._free:
            qubits.append(heapq.heappop(self._free))
        while len(qubits) < width:
            qubits.append(self._size)
            self._size += 1
        qubits.sort()
        rid = self._next_id
        self._next_id += 1
        reg = RegisterHandle(name, tuple(qubits), role, rid)
        for q in qubits:
            if q in self._owner:
                raise AllocationError(f"qubit {q} already owned")  # pragma: no cover
            self._owner[q] = rid
        self._live[rid] = reg
        self.high_water = max(self.high_water, self.live_count)
        self._log("alloc", reg)
        return reg

    def free(self, reg: RegisterHandle) -> None:
        live = self._live.get(reg.alloc_id)
        if live is None or reg.alloc_id in self._pending:
            raise AllocationError(f"register {reg.name!r} is not live (double free?)")
        if live.qubits != reg.qubits:
            raise AllocationError(f"{reg.name!r} is a slice; free the whole register")
        if self._deferred:
            self._pending.add(reg.alloc_id)
            self._deferred[-1].append(live)
            return
        self._release(live)

    def _release(self, reg: RegisterHandle) -> None:
        del self._live[reg.alloc_id]
        for q in reg.qubits:
            del self._owner[q]
            heapq.heappush(self._free, q)
        self._log("free", reg)

    def begin_defer(self) -> None:
        self._deferred.append([])

    def end_defer(self) -> None:
        pending = self._deferred.pop()
        for reg in pending:
            if self._deferred:
                self._deferred[-1].append(reg)
            else:
                self._pending.discard(reg.alloc_id)
                self._release(reg)

    @contextmanager
    def deferred_free(self):
        """Queue frees raised inside the block and apply them on exit.

        Used when building sub-circuits meant to run in parallel, so they do
        not pick up each other's scratch qubits.
        """
        self.begin_defer()
        try:
            yield
        finally:
            self.end_defer()

    def is_live(self, reg: RegisterHandle) -> bool:
        return reg.alloc_id in self._live

    def _log(self, kind: str, reg: RegisterHandle) -> None:
        self.events.append(
            AllocEvent(kind, reg.name, reg.qubits, reg.role, self._clock(), self.live_count)
        )


def replay_high_water(events: list[AllocEvent]) -> int:
    live = peak = 0
    for e in events:
        live += len(e.qubits) if e.kind == "alloc" else -len(e.qubits)
        peak = max(peak, live)
    return peak
