from __future__ import annotations

import pytest
from hypothesis import given, strategies as st

from modsat.boolfn import AND, CONST1, NOT, XOR
from modsat.errors import PreconditionError, UnsupportedFrameError
from modsat.kripke import brute_force_sat, frame_in_class, holds
from modsat.parsing import parse_formula
from modsat.reductions import eliminate_dia, kd_to_k
from modsat.selftest import tableau_suite
from modsat.tableau import choose_engine, ksat_tableau, solve, verify_witness

from conftest import circuits


def f(text, k=None):
    return parse_formula(text, k=k)


# -- tableau ------------------------------------------------------------------


def test_tableau_examples():
    assert ksat_tableau(f("and(not(box 1 not(x)), box 1 not(x))")).answer == "UNSAT"
    v = ksat_tableau(f("box 1 0"))
    assert v.answer == "SAT" and v.witness.n_worlds == 1
    assert ksat_tableau(eliminate_dia(kd_to_k(f("box 1 0")))).answer == "UNSAT"
    assert ksat_tableau(f("box 1 0"), "KD").answer == "UNSAT"
    c = f("and(not(box 1 not(x)), not(box 2 x))")
    v = ksat_tableau(c)
    assert v.answer == "SAT"
    assert v.witness.n_worlds == 3 and holds(v.witness, 0, c)


def test_tableau_e_operator():
    c = f("and(E(x), not(box 2 y))", k=2)
    v = ksat_tableau(c)
    assert v.answer == "SAT" and holds(v.witness, 0, c)
    assert ksat_tableau(f("and(E(x), not(box 2 x))", k=2)).answer == "UNSAT"


def test_tableau_preconditions():
    with pytest.raises(PreconditionError):
        ksat_tableau(f("dia 1 x"))
    with pytest.raises(PreconditionError):
        ksat_tableau(f("or(x, y)"))
    with pytest.raises(UnsupportedFrameError):
        ksat_tableau(f("x"), "T")


@given(circuits(bases=("and-not",), max_gates=8, formula=True), st.sampled_from(["K", "KD"]))
def test_tableau_matches_oracle(c, frame):
    phi = eliminate_dia(c)
    v = ksat_tableau(phi, frame)
    assert v.answer == brute_force_sat(c, frame).answer
    if v.witness is not None:
        assert frame_in_class(v.witness, frame) and holds(v.witness, v.witness.root, c)


def test_tableau_suite_small():
    res = tableau_suite(4)
    assert res.passed, res.failures


# -- dispatcher ----------------------------------------------------------------


@pytest.mark.parametrize(
    "text, frame, engine",
    [
        ("xor(dia 1 x, 1)", "K", "xor"),
        ("and(not(x), box 1 y)", "K", "tableau"),
        ("and(not(x), box 1 y)", "S4", "oracle"),
        ("and(x, dia 1 y)", "K", "r1/d"),
        ("and(0, dia 1 y)", "KD", "monotone-serial"),
        ("not(box 1 0)", "K", "unary-chain"),
        ("or(0, box 1 x)", "K", "or-recursion"),
        ("and(0, dia 1 box 1 x)", "K", "and-recursion"),
    ],
)
def test_engine_choice(text, frame, engine):
    assert choose_engine(f(text), frame) == engine


def test_forced_engine_must_apply():
    with pytest.raises(PreconditionError):
        solve(f("and(not(x), y)"), "K", engine="xor")
    with pytest.raises(UnsupportedFrameError):
        solve(f("x"), "S5", engine="tableau")
    assert solve(f("x"), "S5", engine="oracle").answer == "SAT"


def test_validity_examples():
    assert solve(f("or(x, not(x))"), "K", "valid").answer == "VALID"
    v = solve(f("dia 1 1"), "K", "valid")
    assert v.answer == "INVALID" and verify_witness(f("dia 1 1"), "K", v)
    assert solve(f("dia 1 1"), "KD", "valid").answer == "VALID"


@given(circuits(max_gates=7), st.sampled_from(["K", "KD"]))
def test_solve_agrees_with_oracle_and_witnesses_verify(c, frame):
    v = solve(c, frame)
    assert v.answer == brute_force_sat(c, frame).answer
    if v.answer == "SAT" and v.witness is not None:
        assert verify_witness(c, frame, v)


@given(circuits(max_gates=7), st.sampled_from(["K", "KD"]))
def test_validity_is_unsat_of_the_dual(c, frame):
    sat = solve(c, frame, "sat")
    valid = solve(c.dualize(), frame, "valid")
    assert (sat.answer == "SAT") == (valid.answer == "INVALID")
    if valid.witness is not None:
        assert verify_witness(c.dualize(), frame, valid)


def test_unknown_is_reported_not_guessed():
    v = solve(f("and(box 1 x, dia 1 dia 1 not(x))"), "S4")
    assert v.answer == "UNKNOWN"
