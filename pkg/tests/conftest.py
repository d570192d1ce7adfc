import sys

import numpy as np
import pytest

from qmul.builders import build_multiplier
from qmul.sim import BasisState, write_register

_PLANS = {}


def plan_for(n, fused=True):
    """Multiplier plans are immutable once built, so tests share them."""
    key = (n, fused)
    if key not in _PLANS:
        _PLANS[key] = build_multiplier(n, fused=fused)
    return _PLANS[key]


def input_state(plan, x, y):
    s = BasisState.zeros(plan.circuit.qubit_count)
    s = write_register(s, plan.registers["x"], x)
    return write_register(s, plan.registers["y"], y)


def random_states(width, count, seed=0):
    rng = np.random.default_rng(seed)
    return rng.integers(0, 2, size=(width, count)).astype(bool)


@pytest.fixture
def plan4():
    return plan_for(4)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
