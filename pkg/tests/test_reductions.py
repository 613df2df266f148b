from __future__ import annotations

import pytest
from hypothesis import given, strategies as st

from modsat.boolfn import AND, AND_NOT_Y, CONST1, NOT, OR, XOR, Base
from modsat.circuit import BOX, DIA, E
from modsat.errors import NotInCloneError, PreconditionError
from modsat.kripke import brute_force_sat, frame_in_class, holds, oracle_equivalent
from modsat.parsing import parse_formula
from modsat.reductions import (
    circuit_to_formula,
    eliminate_box,
    eliminate_dia,
    kd_to_k,
    lift_model,
    rewrite_base,
    s1_transform,
)
from modsat.tableau import ksat_tableau

from conftest import circuits


def sat(c, frame="K"):
    return brute_force_sat(c, frame).answer


# -- rewrite_base -----------------------------------------------------------


def test_rewrite_or_with_and_not():
    out = rewrite_base(parse_formula("or(x, y)"), (AND, NOT))
    assert {f.name for f in out.functions_used} <= {"and", "not"}
    assert oracle_equivalent(out, parse_formula("or(x, y)"), "K") == "EQUIVALENT"


def test_rewrite_keeps_modal_skeleton():
    c = parse_formula("dia 1 xor(x, y)")
    out = rewrite_base(c, (AND, OR, NOT))
    assert out.gates[out.out].kind == DIA
    assert XOR not in out.functions_used
    assert oracle_equivalent(out, c, "K") == "EQUIVALENT"


def test_rewrite_into_superset_is_identity():
    c = parse_formula("and(dia 1 x, y)")
    assert rewrite_base(c, (AND, OR, NOT)) == c


def test_rewrite_outside_clone():
    with pytest.raises(NotInCloneError):
        rewrite_base(parse_formula("not(x)"), (AND, OR))


@given(circuits(max_gates=6))
def test_rewrite_preserves_equivalence(c):
    out = rewrite_base(c, (AND, NOT))
    assert oracle_equivalent(out, c, "K") == "EQUIVALENT"


# -- circuit_to_formula -------------------------------------------------------


def test_formula_of_a_variable():
    out = circuit_to_formula(parse_formula("x"))
    assert out.is_formula() and out.modal_depth() == 0
    assert {f.name for f in out.functions_used} <= {"and", "not"}
    assert sat(out) == "SAT"


def test_formula_of_a_box_uses_two_levels():
    out = circuit_to_formula(parse_formula("box 1 x"))
    assert out.is_formula()
    assert E in out.modal_kinds_used
    assert sat(out) == "SAT"


@given(circuits(max_gates=5, bases=("and-not", "xor-1", "monotone")), st.sampled_from(["K", "KD"]))
def test_circuit_to_formula_is_equisatisfiable(c, frame):
    """Gate-variable formulas are too wide for the exhaustive oracle, so both
    directions go through witnesses: a model of C lifts to a model of the
    formula, and the tableau's model of the formula is a model of C."""
    rewritten = rewrite_base(c, (AND, NOT))
    out = circuit_to_formula(rewritten)
    assert out.is_formula()
    assert DIA not in out.modal_kinds_used
    truth = brute_force_sat(c, frame)
    if truth.answer == "SAT":
        lifted = lift_model(rewritten, truth.witness)
        assert holds(lifted, lifted.root, out)
    v = ksat_tableau(out, frame)
    assert v.answer == truth.answer
    if v.witness is not None:
        assert frame_in_class(v.witness, frame)
        assert holds(v.witness, v.witness.root, c)


# -- kd_to_k ----------------------------------------------------------------


def test_kd_to_k_examples():
    assert sat(kd_to_k(parse_formula("box 1 0"))) == "UNSAT"
    one = kd_to_k(parse_formula("1"))
    assert sat(one) == "SAT"


@given(circuits(max_gates=6))
def test_kd_to_k_reduces_kd_to_k(c):
    assert sat(kd_to_k(c), "K") == sat(c, "KD")


# -- modal eliminations ---------------------------------------------------------


@given(circuits(max_gates=6), st.sampled_from(["K", "KD"]))
def test_eliminations_preserve_meaning(c, frame):
    d = eliminate_dia(c)
    b = eliminate_box(c)
    assert DIA not in d.modal_kinds_used and BOX not in b.modal_kinds_used
    assert oracle_equivalent(d, c, frame) == "EQUIVALENT"
    assert oracle_equivalent(b, c, frame) == "EQUIVALENT"


# -- s1_transform -------------------------------------------------------------


def test_s1_transform_examples():
    base = Base.of(AND_NOT_Y)
    out = s1_transform(parse_formula("and(x, not(x))"), base, {"box", "dia"})
    assert sat(out) == "UNSAT"
    out = s1_transform(parse_formula("dia 1 x"), base, {"box", "dia"})
    assert sat(out) == "SAT"
    assert {f.name for f in out.functions_used} <= {"andnot"}


def test_s1_transform_requires_s1():
    with pytest.raises(NotInCloneError):
        s1_transform(parse_formula("x"), (AND, OR), {"box"})
    with pytest.raises(PreconditionError):
        s1_transform(parse_formula("xor(x, y)"), (AND_NOT_Y,), {"box"})


@given(
    circuits(max_gates=5, bases=("and-not", "monotone"), formula=True),
    st.sampled_from([frozenset({"box"}), frozenset({"dia"}), frozenset({"box", "dia"})]),
    st.sampled_from(["K", "KD"]),
)
def test_s1_transform_is_equisatisfiable(phi, ops, frame):
    out = s1_transform(phi, (AND_NOT_Y,), ops, frame)
    assert out.modal_kinds_used <= ops
    assert {f.name for f in out.functions_used} <= {"andnot"}
    assert sat(out, frame) == sat(phi, frame)
