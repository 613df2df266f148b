from __future__ import annotations

import itertools
import random

import pytest

from modsat.boolfn import AND, AND_NOT_Y, CONST0, CONST1, NOT, OR, XOR, Base, FunctionTable, clone_profile
from modsat.classify import (
    CONP,
    GOLDEN,
    NP,
    OPEN,
    P,
    PSPACE,
    ComplexityVerdict,
    Instance,
    class_rank,
    classify,
    classify_base,
    complement_class,
    parse_ops,
)
from modsat.errors import UnsupportedFrameError

FRAMES = ("K", "KD", "T", "S4", "S5")
OPS = ("", "box", "dia", "box,dia")


@pytest.mark.parametrize("row", GOLDEN, ids=lambda r: f"{'+'.join(f.name for f in r[0])}-{r[1]}-{r[2] or 'none'}-k{r[3]}-{r[4]}")
def test_golden_table(row):
    functions, frame, ops, k, task, expected = row
    assert classify_base(functions, frame, ops, k, task).cls == expected


def test_golden_table_size():
    assert len(GOLDEN) == 35


def test_representation_is_irrelevant():
    for functions, frame, ops, k, task, expected in GOLDEN:
        assert classify_base(functions, frame, ops, k, task, repr="formula").cls == expected


def test_k4_is_rejected():
    with pytest.raises(UnsupportedFrameError):
        classify_base((AND, NOT), "K4")


def test_verdict_json():
    v = classify_base((XOR, CONST1), "KD")
    assert v.to_dict() == {"class": P, "citation": v.citation, "engine_hint": "xor"}
    assert '"class": "P"' in v.to_json()


def test_parse_ops():
    assert parse_ops("box,dia") == frozenset({"box", "dia"})
    assert parse_ops("none") == frozenset()
    assert parse_ops(["◇"]) == frozenset({"dia"})
    with pytest.raises(ValueError):
        parse_ops("next")


def test_instance_validation():
    with pytest.raises(ValueError):
        Instance(Base.of(AND), "K", "box", 0)
    with pytest.raises(ValueError):
        Instance(Base.of(AND), "K", "box", 1, task="count")


def _random_bases(n, seed):
    rng = random.Random(seed)
    for _ in range(n):
        fs = []
        for j in range(rng.randint(1, 3)):
            arity = rng.randint(0, 3)
            fs.append(FunctionTable(f"f{j}", arity, tuple(rng.randint(0, 1) for _ in range(1 << arity))))
        yield Base(tuple(fs))


def test_ladders_never_fall_through():
    for base in _random_bases(500, 1):
        for frame, ops, k in itertools.product(FRAMES, OPS, (1, 2)):
            for task in ("sat", "valid"):
                v = classify_base(base, frame, ops, k, task)
                assert v.cls in (P, NP, CONP, PSPACE, OPEN)


def test_open_only_for_linear_bases_over_reflexive_frames():
    for base in _random_bases(300, 2):
        p = clone_profile(base)
        for frame, ops in itertools.product(FRAMES, OPS):
            if classify_base(base, frame, ops, 1).cls == OPEN:
                assert frame in ("T", "S4", "S5") and p.in_L and not p.S1_sub


def test_validity_is_the_complement_of_the_dual():
    for base in _random_bases(200, 3):
        for frame, ops, k in itertools.product(FRAMES, OPS, (1, 2)):
            inst = Instance(base, frame, ops, k, task="valid")
            assert classify(inst).cls == complement_class(classify(inst.dual()).cls)


def test_monotone_in_base_operators_and_k():
    extra = (AND, OR, NOT, XOR, CONST0, CONST1, AND_NOT_Y)
    for base in _random_bases(150, 4):
        for frame in FRAMES:
            for ops, k in itertools.product(OPS, (1, 2)):
                r = class_rank(classify_base(base, frame, ops, k).cls)
                if r is None:
                    continue
                bigger = [
                    classify_base(base.union(g), frame, ops, k).cls for g in extra
                ] + [classify_base(base, frame, "box,dia", k).cls]
                if ops:
                    bigger.append(classify_base(base, frame, ops, 2).cls)
                for cls in bigger:
                    rb = class_rank(cls)
                    if rb is not None:
                        assert rb >= r, (base, frame, ops, k, cls)


def test_complement_class():
    assert complement_class(NP) == CONP and complement_class(CONP) == NP
    assert complement_class(OPEN) == OPEN and complement_class(P) == P


def test_golden_is_fast():
    import time

    t = time.perf_counter()
    for functions, frame, ops, k, task, _ in GOLDEN:
        classify_base(functions, frame, ops, k, task)
    assert time.perf_counter() - t < 1.0


def test_verdict_is_frozen():
    v = ComplexityVerdict(P, "x", "y")
    with pytest.raises(AttributeError):
        v.cls = NP
