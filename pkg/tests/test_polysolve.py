from __future__ import annotations

import pytest
from hypothesis import given, strategies as st

from modsat.boolfn import D_GEN, NOT, Base
from modsat.errors import PreconditionError
from modsat.kripke import brute_force_sat, frame_in_class, holds
from modsat.parsing import parse_formula
from modsat.polysolve import (
    ENGINES,
    applicable,
    sat_and_recursion,
    sat_monotone_serial,
    sat_monotone_single_op,
    sat_or_recursion,
    sat_r1_or_d,
    sat_unary_chain,
)
from modsat.selftest import engine_suite

from conftest import circuits


def f(text, base=None):
    return parse_formula(text, base)


def check(verdict, c, frame, expected):
    assert verdict.answer == expected
    if verdict.witness is not None:
        assert frame_in_class(verdict.witness, frame)
        assert holds(verdict.witness, verdict.witness.root, c)


# -- frozen examples --------------------------------------------------------


def test_r1_or_d_examples():
    c = f("dia 1 and(x, y)")
    v = sat_r1_or_d(c, "K")
    check(v, c, "K", "SAT")
    base = Base.of(D_GEN, NOT)
    c = f("not(x)", base)
    check(sat_r1_or_d(c, "K"), c, "K", "SAT")
    c = f("dmaj(x, box 1 y, not(dia 1 x))", base)
    check(sat_r1_or_d(c, "S4"), c, "S4", "SAT")


@pytest.mark.parametrize(
    "text, frame, answer",
    [("and(dia 1 x, box 1 or(x, y))", "KD", "SAT"), ("and(0, x)", "KD", "UNSAT"), ("box 1 0", "KD", "UNSAT")],
)
def test_monotone_serial_examples(text, frame, answer):
    c = f(text)
    check(sat_monotone_serial(c, frame), c, frame, answer)


@pytest.mark.parametrize(
    "text, frame, answer",
    [("dia 1 0", "K", "UNSAT"), ("box 1 0", "K", "SAT"), ("not(dia 1 1)", "KD", "UNSAT"), ("not(not(x))", "T", "SAT")],
)
def test_unary_chain_examples(text, frame, answer):
    c = f(text)
    check(sat_unary_chain(c, frame), c, frame, answer)


@pytest.mark.parametrize(
    "text, frame, answer",
    [("box 1 x", "K", "SAT"), ("dia 1 0", "K", "UNSAT"), ("dia 1 0", "S5", "UNSAT"), ("or(0, dia 1 1)", "KD", "SAT")],
)
def test_or_recursion_examples(text, frame, answer):
    c = f(text)
    check(sat_or_recursion(c, frame), c, frame, answer)


@pytest.mark.parametrize(
    "text, answer", [("and(dia 1 x, box 1 0)", "UNSAT"), ("box 1 0", "SAT"), ("and(x, 1)", "SAT")]
)
def test_and_recursion_examples(text, answer):
    c = f(text)
    check(sat_and_recursion(c, "K"), c, "K", answer)


@pytest.mark.parametrize(
    "text, answer", [("dia 1 and(x, y)", "SAT"), ("and(box 1 0, x)", "SAT"), ("0", "UNSAT")]
)
def test_single_op_examples(text, answer):
    c = f(text)
    check(sat_monotone_single_op(c, "K"), c, "K", answer)


def test_preconditions_are_enforced():
    assert not applicable("and-recursion", f("and(x, 1)"), "KD")
    assert not applicable("monotone-serial", f("and(x, y)"), "K")
    assert not applicable("single-op-monotone", f("and(dia 1 x, box 1 y)"), "K")
    assert not applicable("or-recursion", f("and(x, y)"), "K")
    with pytest.raises(PreconditionError):
        sat_unary_chain(f("and(x, y)"), "K")
    with pytest.raises(PreconditionError):
        sat_and_recursion(f("and(x, y)"), "KD")


# -- randomized and exhaustive agreement ------------------------------------------

FAMILY_OF = {
    "r1/d": "monotone",
    "monotone-serial": "monotone",
    "unary-chain": "not-1",
    "or-recursion": "or-0",
    "and-recursion": "and-0",
    "xor": "xor",
}


@given(st.sampled_from(sorted(FAMILY_OF)), st.data(), st.sampled_from(["K", "KD", "T", "S4", "S5", "K4"]))
def test_engines_agree_with_oracle_on_random_circuits(engine, data, frame):
    c = data.draw(circuits(bases=(FAMILY_OF[engine],), max_gates=7))
    if not applicable(engine, c, frame):
        return
    v = ENGINES[engine](c, frame)
    truth = brute_force_sat(c, frame)
    if truth.answer != "UNKNOWN":
        assert v.answer == truth.answer
    if v.witness is not None:
        assert frame_in_class(v.witness, frame) and holds(v.witness, v.witness.root, c)


def test_engine_suite_small():
    for res in engine_suite(3):
        assert res.passed, res.failures
