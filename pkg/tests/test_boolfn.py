from __future__ import annotations

import itertools
import random

import pytest
from hypothesis import given, strategies as st

from modsat.boolfn import (
    AND,
    AND_NOT_Y,
    CONST0,
    CONST1,
    NAMED_BASES,
    NOT,
    OR,
    XOR,
    Base,
    FunctionTable,
    clone_contains,
    clone_profile,
    dual_function,
    eval_fn,
    find_implementation,
    identify_clone,
    nary_closure,
    parse_base,
    property_profile,
)
from modsat.errors import ArityError, NotInCloneError, ParseError

PROJ_X = (0, 0, 1, 1)
PROJ_Y = (0, 1, 0, 1)


def tables(fs):
    return {f.bits for f in fs}


# -- evaluation -----------------------------------------------------------


@pytest.mark.parametrize(
    "f, args, expected",
    [(AND, [1, 1], 1), (XOR, [1, 1], 0), (CONST1, [], 1), (AND, [1, 0], 0), (OR, [0, 0], 0), (NOT, [0], 1)],
)
def test_eval_fn(f, args, expected):
    assert eval_fn(f, args) == expected


def test_eval_fn_arity_mismatch():
    with pytest.raises(ArityError):
        eval_fn(AND, [1])


def test_table_length_checked():
    with pytest.raises(ArityError):
        FunctionTable("bad", 2, (0, 1, 1))
    with pytest.raises(ArityError):
        FunctionTable.from_string("bad", "011")


def test_row_order_first_argument_is_high_bit():
    f = FunctionTable.from_string("f", "0010")  # x and not y
    assert f(1, 0) == 1 and f(0, 1) == 0


# -- properties -----------------------------------------------------------


def test_property_profile_examples():
    n = property_profile(NOT)
    assert (n.monotone, n.self_dual, n.affine) == (False, True, True)
    x = property_profile(XOR)
    assert (x.reproduces1, x.affine, x.self_dual) == (False, True, False)
    s = property_profile(AND_NOT_Y)
    assert (s.reproduces1, s.monotone, s.affine) == (False, False, False)


def test_property_profile_or_and_families():
    assert property_profile(OR).is_or_with_constants
    assert property_profile(CONST1).is_or_with_constants
    assert property_profile(AND).is_and_with_constants
    assert not property_profile(XOR).is_or_with_constants


@given(st.integers(0, 2), st.data())
def test_dual_is_involution(arity, data):
    bits = tuple(data.draw(st.lists(st.integers(0, 1), min_size=1 << arity, max_size=1 << arity)))
    f = FunctionTable("f", arity, bits)
    assert f.dual().dual().bits == f.bits
    for row in itertools.product((0, 1), repeat=arity):
        assert f.dual()(*row) == 1 - f(*(1 - a for a in row))


def test_dual_function_reuses_builtin_names():
    assert dual_function(AND) is OR
    assert dual_function(CONST0) is CONST1
    assert dual_function(NOT) is NOT


# -- closure --------------------------------------------------------------


def test_nary_closure_examples():
    assert tables(nary_closure([AND], 2)) == {PROJ_X, PROJ_Y, AND.bits}
    assert tables(nary_closure([XOR, CONST1], 1)) == {(0, 1), (1, 0), (0, 0), (1, 1)}
    assert tables(nary_closure([], 1)) == {(0, 1)}


def test_full_clone_has_all_binary_functions():
    assert len(nary_closure([AND, NOT], 2)) == 16
    assert len(nary_closure([XOR, CONST1], 2)) == 8  # affine functions


def test_clone_contains_examples():
    assert clone_contains([AND, NOT], OR)
    assert not clone_contains([AND], NOT)
    assert clone_contains([AND_NOT_Y], AND)
    assert clone_contains([AND_NOT_Y], CONST0)
    assert not clone_contains([AND_NOT_Y], CONST1)


def test_clone_profile_examples():
    p = clone_profile([AND, NOT])
    assert p.S1_sub and not p.in_M
    p = clone_profile([XOR, CONST1])
    assert p.in_L and not p.S1_sub
    p = clone_profile([OR, CONST0])
    assert p.V0_sub and p.in_V and p.in_M


@pytest.mark.parametrize("name", list(NAMED_BASES))
def test_identify_clone_round_trip(name):
    assert identify_clone(NAMED_BASES[name]) == name


# -- implementations -------------------------------------------------------


def test_find_implementation_de_morgan():
    f = find_implementation([AND, NOT], OR, True)
    assert f.table(2) == OR.bits
    assert f.occurrences() == {0: 1, 1: 1}
    assert str(f) == "not(and(not(x1), not(x2)))"


def test_find_implementation_identity():
    f = find_implementation([OR], OR, True)
    assert str(f) == "or(x1, x2)"


def test_find_implementation_negation_from_s1_with_one():
    f = find_implementation([AND_NOT_Y, CONST1], NOT, True)
    assert f.table(1) == NOT.bits
    assert f.occurrences() == {0: 1}


def test_find_implementation_not_in_clone():
    with pytest.raises(NotInCloneError):
        find_implementation([AND], NOT)


def test_random_s1_bases_yield_once_per_variable_implementations():
    rng = random.Random(3)
    done = 0
    while done < 5:
        f = FunctionTable("f", 2, tuple(rng.randint(0, 1) for _ in range(4)))
        g = FunctionTable("g", 3, tuple(rng.randint(0, 1) for _ in range(8)))
        base = (f, g)
        if not clone_profile(base).S1_sub:
            continue
        for target in (AND, OR, NOT):
            impl = find_implementation(base + (CONST1,), target, True)
            assert impl.table(target.arity) == target.bits
            assert all(impl.occurrences().get(j, 0) == 1 for j in range(target.arity))
        done += 1


# -- bases ----------------------------------------------------------------


def test_parse_base_formats():
    b = parse_base("# comment\nxor\nsel 2 0010\n")
    assert [f.name for f in b] == ["xor", "sel"]
    assert b.lookup("SEL").bits == (0, 0, 1, 0)


def test_parse_base_errors():
    with pytest.raises(ParseError):
        parse_base("f 2 010")
    with pytest.raises(ParseError):
        parse_base("nosuchfn")


def test_base_from_names_and_dual():
    b = Base.from_names("and", "0")
    assert [f.name for f in b] == ["and", "const0"]
    assert [f.name for f in b.dual()] == ["or", "const1"]
    assert Base.from_names(["xor", "1"]) == Base.of(XOR, CONST1)
    with pytest.raises(KeyError):
        Base.from_names("nand")
