from __future__ import annotations

import random

import pytest
from hypothesis import HealthCheck, settings, strategies as st

from modsat.boolfn import AND, CONST0, CONST1, NOT, OR, XOR
from modsat.generate import random_circuit

settings.register_profile(
    "modsat", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("modsat")

BASES = {
    "and-not": (AND, NOT),
    "or-0": (OR, CONST0),
    "and-0": (AND, CONST0),
    "xor-1": (XOR, CONST1),
    "monotone": (AND, OR, CONST0, CONST1),
    "not-1": (NOT, CONST1),
    "xor": (XOR, CONST0, CONST1),
}


@st.composite
def circuits(draw, bases=tuple(BASES), max_gates: int = 8, k_max: int = 2, formula: bool | None = None):
    """Random small circuits, drawn through a seeded generator."""
    seed = draw(st.integers(0, 2**32 - 1))
    name = draw(st.sampled_from(bases))
    n = draw(st.integers(1, max_gates))
    k = draw(st.integers(1, k_max))
    tree = draw(st.booleans()) if formula is None else formula
    return random_circuit(random.Random(seed), BASES[name], ("x", "y"), n, k=k, max_md=2, formula=tree)


@pytest.fixture
def rng():
    return random.Random(20240611)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is not None and mod.REPORT:
        terminalreporter.section("acceptance criteria")
        for line in sorted(mod.REPORT, key=lambda l: int(l.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
