from __future__ import annotations

import random

import pytest
from hypothesis import given, strategies as st

from modsat.boolfn import AND, CONST0, CONST1, XOR
from modsat.circuit import BOX, DIA
from modsat.errors import PreconditionError, UnsupportedFrameError
from modsat.generate import random_circuit
from modsat.kripke import brute_force_sat, oracle_equivalent
from modsat.parsing import parse_formula
from modsat.selftest import xor_completeness_suite, xor_minimality_suite
from modsat.xorsat import canonical_key, is_xor_circuit, xor_equivalent, xor_minimize, xor_normalize, xor_sat

from conftest import circuits


def f(text):
    return parse_formula(text)


def norm(text, frame="K"):
    return xor_normalize(f(text), frame).to_formula()


# -- frozen rewriting examples ---------------------------------------------------


@pytest.mark.parametrize(
    "text, frame, expected",
    [
        ("xor(x, x)", "K", "0"),
        ("dia 1 1", "KD", "1"),
        ("dia 1 1", "K", "dia 1 1"),
        ("dia 1 xor(x, x)", "K", "0"),
        ("xor(dia 1 x, dia 1 x)", "K", "0"),
        ("xor(xor(dia 1 x, 1), 1)", "K", "dia 1 x"),
        ("box 1 1", "K", "1"),
        ("box 1 0", "KD", "0"),
    ],
)
def test_normalize_examples(text, frame, expected):
    assert norm(text, frame) == expected


@pytest.mark.parametrize(
    "text, answer", [("dia 1 x", "SAT"), ("xor(dia 1 0, 0)", "UNSAT"), ("dia 1 1", "SAT")]
)
def test_xor_sat_examples(text, answer):
    assert xor_sat(f(text), "K").answer == answer


def test_equivalence_examples():
    assert xor_equivalent(f("xor(x, y)"), f("xor(y, x)"), "K")
    assert xor_equivalent(f("dia 1 1"), f("1"), "KD")
    assert not xor_equivalent(f("dia 1 1"), f("1"), "K")


def test_minimize_examples():
    m = xor_minimize(f("dia 1 xor(xor(x, x), y)"), "K")
    assert m.to_formula() == "dia 1 y"
    assert m.size == 2
    assert xor_minimize(f("xor(xor(1, 1), 1)")).to_formula() == "1"
    canon = xor_minimize(f("xor(x, dia 1 y)"), "K")
    assert xor_minimize(canon, "K") == canon


def test_minimize_shares_repeated_sums():
    m = xor_minimize(f("xor(x, xor(y, dia 1 xor(x, y)))"), "K")
    assert m.size == 5  # x, y, x xor y, the diamond, the top xor


def test_preconditions():
    with pytest.raises(PreconditionError):
        xor_normalize(f("and(x, y)"))
    with pytest.raises(UnsupportedFrameError):
        xor_normalize(f("xor(x, y)"), "T")
    assert is_xor_circuit(f("xor(box 1 x, 1)"))
    assert not is_xor_circuit(f("and(x, 1)"))


# -- properties -------------------------------------------------------------------


@given(circuits(bases=("xor", "xor-1"), max_gates=12), st.sampled_from(["K", "KD"]))
def test_normalize_is_idempotent(c, frame):
    n = xor_normalize(c, frame)
    assert xor_normalize(n, frame) == n


@given(st.integers(0, 2**32 - 1), st.integers(1, 30), st.sampled_from(["K", "KD"]), st.booleans())
def test_normalize_never_grows_dia_only_circuits(seed, n, frame, tree):
    c = random_circuit(random.Random(seed), (XOR, CONST0, CONST1), n_gates=n, modal_kinds=(DIA,), formula=tree)
    assert xor_normalize(c, frame).size <= c.size
    assert xor_minimize(c, frame).size <= c.size


def test_boxes_are_written_back_when_shorter():
    c = f("xor(box 1 x, box 1 y)")
    m = xor_normalize(c, "K")
    assert m.size == c.size
    assert BOX in m.modal_kinds_used


def test_box_or_diamond_spelling_gives_one_output():
    a = xor_normalize(f("box 1 x"), "K")
    b = xor_normalize(f("xor(1, dia 1 xor(1, x))"), "K")
    assert a == b
    assert a.size == 2


@given(circuits(bases=("xor", "xor-1"), max_gates=7), st.sampled_from(["K", "KD"]))
def test_normalize_is_sound(c, frame):
    assert oracle_equivalent(xor_normalize(c, frame), c, frame) == "EQUIVALENT"
    assert xor_sat(c, frame).answer == brute_force_sat(c, frame).answer


@given(circuits(bases=("xor", "xor-1"), max_gates=8, formula=True))
def test_formula_in_formula_out(c):
    assert xor_normalize(c, "K").is_formula()


@given(st.integers(0, 2**32 - 1), st.integers(1, 30), st.sampled_from(["K", "KD"]), st.integers(1, 4))
def test_normalize_never_grows_formulas(seed, n, frame, md):
    c = random_circuit(random.Random(seed), (XOR, CONST0, CONST1), n_gates=n, k=2, max_md=md, formula=True)
    assert xor_normalize(c, frame).size <= c.size


@given(
    circuits(bases=("xor", "xor-1"), max_gates=6),
    circuits(bases=("xor", "xor-1"), max_gates=6),
    st.sampled_from(["K", "KD"]),
)
def test_equivalence_matches_oracle(a, b, frame):
    same = oracle_equivalent(a, b, frame) == "EQUIVALENT"
    assert xor_equivalent(a, b, frame) == same
    assert (canonical_key(a, frame) == canonical_key(b, frame)) == same


def test_exhaustive_completeness_small():
    res = xor_completeness_suite(4)
    assert res.passed, res.failures


def test_exhaustive_minimality_small():
    res = xor_minimality_suite(4)
    assert res.passed, res.failures
