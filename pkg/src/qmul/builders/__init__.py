from .adders import build_carry_increment, build_qcla_add
from .base import CircuitBuilder, Segment
from .copying import BuildError, build_conditional_copy, build_fast_copy, build_partial_products
from .multiplier import STEPS, MultiplierPlan, StepRecord, build_multiplier
from .tree import (
    AdderTree,
    PartialSumNode,
    build_adder_tree,
    build_modified_add,
    node_width,
    uncompute_node,
)

__all__ = [
    "AdderTree",
    "BuildError",
    "CircuitBuilder",
    "MultiplierPlan",
    "PartialSumNode",
    "STEPS",
    "Segment",
    "StepRecord",
    "build_adder_tree",
    "build_carry_increment",
    "build_conditional_copy",
    "build_fast_copy",
    "build_modified_add",
    "build_multiplier",
    "build_partial_products",
    "build_qcla_add",
    "node_width",
    "uncompute_node",
]
