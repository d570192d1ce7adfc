from __future__ import annotations

from contextlib import contextmanager
from dataclasses import dataclass

from ..circuit_ir import Circuit, Gate, cnot, toffoli, x
from ..qubit_alloc import QubitAllocator, RegisterHandle


@dataclass(frozen=True)
class Segment:
    name: str
    start: int
    stop: int


class CircuitBuilder:
    """Gate sink plus qubit allocator shared by all circuit builders.

    Gates go to ``self.gates`` unless an :meth:`inverse_block` is open, in
    which case they are buffered and emitted in reverse when the block closes.
    """

    def __init__(self) -> None:
        self.gates: list[Gate] = []
        self.alloc = QubitAllocator(clock=lambda: len(self.gates))
        self.segments: list[Segment] = []
        self._sinks: list[list[Gate]] = []

    @property
    def sink(self) -> list[Gate]:
        return self._sinks[-1] if self._sinks else self.gates

    def emit(self, gate: Gate) -> None:
        self.sink.append(gate)

    def x(self, t: int) -> None:
        self.sink.append(x(t))

    def cx(self, c: int, t: int) -> None:
        self.sink.append(cnot(c, t))

    def ccx(self, c1: int, c2: int, t: int) -> None:
        self.sink.append(toffoli(c1, c2, t))

    def allocate(self, name: str, width: int, role: str = "workspace") -> RegisterHandle:
        return self.alloc.alloc(name, width, role)

    def free(self, reg: RegisterHandle) -> None:
        self.alloc.free(reg)

    @contextmanager
    def inverse_block(self):
        """Emit the gates produced inside the block in reverse order.

        Scratch registers freed inside the block are only released after the
        reversed gates are emitted.
        """
        buf: list[Gate] = []
        self._sinks.append(buf)
        self.alloc.begin_defer()
        try:
            yield
        finally:
            self._sinks.pop()
            self.sink.extend(reversed(buf))
            self.alloc.end_defer()

    @contextmanager
    def segment(self, name: str):
        if self._sinks:
            raise RuntimeError("segments cannot open inside an inverse block")
        start = len(self.gates)
        yield
        self.segments.append(Segment(name, start, len(self.gates)))

    def mark(self) -> tuple[list[Gate], int]:
        sink = self.sink
        return sink, len(sink)

    def since(self, mark: tuple[list[Gate], int], label: str = "") -> Circuit:
        sink, start = mark
        return Circuit(self.alloc.pool_size, tuple(sink[start:]), label)

    def circuit(self, label: str = "") -> Circuit:
        return Circuit(self.alloc.pool_size, tuple(self.gates), label)
