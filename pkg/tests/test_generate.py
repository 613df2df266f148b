from __future__ import annotations

import random

import numpy as np
import pytest

from modsat.boolfn import AND, CONST0, CONST1, NOT, OR, XOR
from modsat.circuit import BOX, DIA
from modsat.generate import TermEnumerator, enumerate_circuits, random_circuit
from modsat.selftest import fingerprints, semantic_classes
from modsat.kripke import oracle_equivalent


def test_tree_counts_are_frozen():
    # x, y; not x, not y; and of two leaves (unordered, with repeats)
    assert len(enumerate_circuits((AND, NOT), ("x", "y"), 1, measure="tree")) == 2
    assert len(enumerate_circuits((AND, NOT), ("x", "y"), 2, modal_kinds=(), measure="tree")) == 4
    assert len(enumerate_circuits((AND, NOT), ("x", "y"), 3, modal_kinds=(), measure="tree")) == 9


def test_dag_counts_are_frozen():
    # gates include variables and constants. Size 1: the 4 leaves. Size 2: a^a for
    # each leaf. Size 3: a^b for 6 leaf pairs, (a^a)^(a^a) and (a^a)^a for each leaf.
    assert len(enumerate_circuits((XOR, CONST0, CONST1), ("x", "y"), 1, k=1, modal_kinds=())) == 4
    assert len(enumerate_circuits((XOR, CONST0, CONST1), ("x", "y"), 2, k=1, modal_kinds=())) == 8
    assert len(enumerate_circuits((XOR, CONST0, CONST1), ("x", "y"), 3, k=1, modal_kinds=())) == 22


def test_dag_enumeration_matches_brute_force_sizes():
    en = TermEnumerator((XOR, CONST0), ("x",), 1, 2, (DIA,), "dag")
    terms = en.generate(4)
    for t in terms:
        c = en.circuit(t.id)
        assert c.size == len(t.sub) <= 4
        assert c.modal_depth() <= 2
    # every circuit appears once
    assert len({en.circuit(t.id).to_netlist() for t in terms}) == len(terms)


def test_symmetric_arguments_taken_once():
    en = TermEnumerator((XOR,), ("x", "y"), 1, 0, (), "dag")
    formulas = {en.circuit(t.id).to_formula() for t in en.generate(3)}
    assert "xor(x, y)" in formulas and "xor(y, x)" not in formulas


def test_random_circuit_respects_bounds():
    rng = random.Random(0)
    for _ in range(200):
        c = random_circuit(rng, (AND, OR, NOT), n_gates=15, k=2, max_md=2, formula=rng.random() < 0.5)
        assert c.modal_depth() <= 2
        assert set(c.variables) <= {"x", "y"}
        assert max(c.indices_used, default=1) <= 2


def test_random_formula_mode_gives_trees():
    rng = random.Random(1)
    for _ in range(100):
        assert random_circuit(rng, (AND, NOT, CONST1), n_gates=10, formula=True).is_formula()


def test_semantic_classes_agree_with_oracle():
    en = TermEnumerator((XOR, CONST0, CONST1), ("x",), 1, 2, (BOX, DIA), "dag")
    en.generate(4)
    ids = list(range(len(en.terms)))
    for frame in ("K", "KD"):
        sem = semantic_classes(en, ids, frame)
        rng = random.Random(2)
        for _ in range(150):
            a, b = rng.choice(ids), rng.choice(ids)
            same = oracle_equivalent(en.circuit(a), en.circuit(b), frame) == "EQUIVALENT"
            assert (sem.cls[a] == sem.cls[b]) == same


def test_fingerprints_are_deterministic_and_jit_independent(monkeypatch):
    en = TermEnumerator((XOR, CONST1), ("x", "y"), 2, 2, (BOX, DIA), "dag")
    en.generate(3)
    pool = en.pool_circuit()
    a = fingerprints(pool, "K", 128)
    assert a == fingerprints(pool, "K", 128)
    from modsat import _kernels

    monkeypatch.setattr(_kernels, "use_jit", lambda: False)
    assert a == fingerprints(pool, "K", 128)
    with pytest.raises(ValueError):
        fingerprints(pool, "T", 8)
