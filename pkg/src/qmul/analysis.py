"""Closed-form resource bounds and the measured-versus-bound report."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .builders.multiplier import STEPS, MultiplierPlan
from .circuit_ir import ResourceMetrics, metrics, t_estimate

BOUNDS_SOURCE = "published per-step cost table"
COLUMNS = ("Step", "Depth", "Toffoli depth", "Toffoli count", "Gate count", "Ancilla")
FIELDS = ("depth", "toffoli_depth", "toffoli_count", "gate_count", "ancilla")


def ceil_log2(n: int) -> int:
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    return (n - 1).bit_length()


def is_power_of_two(n: int) -> bool:
    return n >= 1 and n & (n - 1) == 0


@dataclass(frozen=True)
class StepBound:
    depth: int
    toffoli_depth: int
    toffoli_count: int
    gate_count: int
    ancilla: int

    def as_dict(self) -> dict[str, int]:
        return {f: getattr(self, f) for f in FIELDS}


@dataclass(frozen=True)
class BoundSet:
    n: int
    L: int
    steps: dict[str, StepBound]
    total: StepBound
    # gate-count bound before the explicit suffix-copy allowance
    total_gate_count_raw: int
    adder_tree_ancilla: int

    @property
    def total_depth(self) -> int:
        return self.total.depth

    @property
    def total_toffoli_depth(self) -> int:
        return self.total.toffoli_depth

    @property
    def adder_tree(self) -> StepBound:
        return self.steps["parallel_adder_tree"]


def cost_bounds(n: int) -> BoundSet:
    """All per-step and total bounds with log n read as ceil(log2 n).

    The ancilla column counts qubits a step adds to the pool; steps that only
    reuse freed qubits are bounded by 0.
    """
    L = ceil_log2(n)
    nn = n * n
    slack = 2 * n * L  # extra CNOTs from copying the left-child suffix bits
    copy = StepBound(L, 0, 0, 2 * nn, 0)
    steps = {
        "fast_copy": StepBound(L, 0, 0, 2 * nn, 2 * nn),
        "partial_products": StepBound(1, 1, nn, nn, nn),
        "undo_fast_copy": copy,
        "parallel_adder_tree": StepBound(
            3 * L * L + 13 * L + 18,
            3 * L * L + 7 * L + 12,
            10 * nn - n * L,
            16 * nn + 2 * n * L + slack,
            2 * nn,
        ),
        "redo_fast_copy": copy,
        "undo_partial_products": StepBound(1, 1, nn, nn, 0),
        "undo_fast_copy_final": copy,
    }
    raw_gates = 26 * nn + 2 * n * L
    total = StepBound(
        3 * L * L + 17 * L + 20,
        3 * L * L + 7 * L + 14,
        12 * nn - n * L,
        raw_gates + slack,
        3 * nn + (16 if n < 6 else 0),
    )
    return BoundSet(n, L, steps, total, raw_gates, 2 * nn + (16 if n < 6 else 0))


@dataclass
class ComparisonRow:
    step: str
    measured: ResourceMetrics
    ancilla: int
    bound: StepBound | None
    passed: bool | None  # None when bounds are not checked for this n
    note: str = ""
    failures: list[str] = field(default_factory=list)

    def values(self) -> dict[str, int]:
        m = self.measured
        return {
            "depth": m.depth,
            "toffoli_depth": m.toffoli_depth,
            "toffoli_count": m.count_toffoli,
            "gate_count": m.total_gates,
            "ancilla": self.ancilla,
        }

    def to_dict(self) -> dict:
        d: dict = {"step": self.step, **self.values(), "bound_pass": self.passed}
        if self.bound is not None:
            d["bound"] = self.bound.as_dict()
        if self.note:
            d["note"] = self.note
        return d


def _compare(step, measured, ancilla, bound, check) -> ComparisonRow:
    row = ComparisonRow(step, measured, ancilla, bound, None)
    if not check:
        row.note = "correctness-only"
        return row
    vals = row.values()
    row.failures = [f for f in FIELDS if vals[f] > getattr(bound, f)]
    row.passed = not row.failures
    return row


def check_bounds(plan: MultiplierPlan) -> list[ComparisonRow]:
    """One row per multiplier step plus a final ``total`` row."""
    bounds = cost_bounds(plan.n)
    check = is_power_of_two(plan.n)
    rows = []
    for rec in plan.steps:
        m = metrics(plan.step_circuit(rec.name))
        rows.append(_compare(rec.name, m, rec.pool_growth, bounds.steps[rec.name], check))
    total = metrics(plan.circuit, ancilla_high_water=plan.high_water)
    rows.append(_compare("total", total, plan.high_water, bounds.total, check))
    return rows


def _cell(row: ComparisonRow, f: str) -> str:
    v = row.values()[f]
    if row.bound is None:
        return str(v)
    return f"{v} / {getattr(row.bound, f)}"


def _status(row: ComparisonRow) -> str:
    if row.passed is None:
        return row.note or "-"
    return "pass" if row.passed else "FAIL"


def render_table(rows: list[ComparisonRow], format: str = "markdown", n: int | None = None) -> str:
    """Render rows as a markdown table or a JSON report. Output is deterministic."""
    if format == "markdown":
        head = "| " + " | ".join(COLUMNS + ("Status",)) + " |"
        sep = "|" + "|".join("---" for _ in range(len(COLUMNS) + 1)) + "|"
        lines = [head, sep]
        for r in rows:
            cells = [r.step, *(_cell(r, f) for f in FIELDS), _status(r)]
            lines.append("| " + " | ".join(cells) + " |")
        return "\n".join(lines) + "\n"
    if format == "json":
        steps = [r for r in rows if r.step != "total"]
        totals = next((r for r in rows if r.step == "total"), None)
        doc: dict = {
            "n": n,
            "rows": [r.to_dict() for r in steps],
            "totals": {},
            "bounds_source": BOUNDS_SOURCE,
        }
        if totals is not None:
            t = totals.to_dict()
            t.pop("step")
            est = t_estimate(totals.measured)
            t["t_count_estimate"] = est.t_count_estimate
            t["t_depth_estimate"] = est.t_depth_estimate
            doc["totals"] = t
            if n is not None:
                doc["gate_count_bound_raw"] = cost_bounds(n).total_gate_count_raw
        return json.dumps(doc, indent=2, sort_keys=False) + "\n"
    raise ValueError(f"unknown format {format!r}; expected 'markdown' or 'json'")


def report_passes(rows: list[ComparisonRow]) -> bool:
    """True unless some checked row failed."""
    return all(r.passed is not False for r in rows)


__all__ = [
    "BOUNDS_SOURCE",
    "BoundSet",
    "ComparisonRow",
    "STEPS",
    "StepBound",
    "ceil_log2",
    "check_bounds",
    "is_power_of_two",
    "cost_bounds",
    "render_table",
    "report_passes",
]
