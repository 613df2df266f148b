"""Satisfiability-preserving rewrites between circuit languages."""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .boolfn import (
    AND,
    CONST0,
    CONST1,
    NOT,
    OR,
    Base,
    BFormula,
    FunctionTable,
    clone_contains,
    find_implementation,
)
from .circuit import BOX, DIA, E, FN, VAR, CircuitBuilder, Gate, ModalCircuit, conjoin
from .errors import CircuitError, NotInCloneError, PreconditionError, SearchExhaustedError
from .kripke import KripkeModel, evaluate_all


def fresh_name(taken, stem: str) -> str:
    taken = set(taken)
    name = stem
    n = 0
    while name in taken:
        n += 1
        name = f"{stem}{n}"
    return name


def _same(f: FunctionTable, g: FunctionTable) -> bool:
    return f.arity == g.arity and f.bits == g.bits


def _instantiate(b: CircuitBuilder, impl: BFormula, inputs: list[int]) -> int:
    if impl.fn is None:
        return inputs[impl.var]
    return b.fn(impl.fn, *[_instantiate(b, a, inputs) for a in impl.args])


@lru_cache(maxsize=1024)
def _implementation(fs: tuple[FunctionTable, ...], target: FunctionTable, once) -> BFormula:
    return find_implementation(fs, target, each_var_once=once)


def rewrite_base(circuit: ModalCircuit, target: Base | tuple[FunctionTable, ...]) -> ModalCircuit:
    """Replace each function gate by a subcircuit over ``target``.

    Gates whose table already occurs in ``target`` are kept (renamed to the
    target's function). A constant not in ``target`` is rebuilt as a unary
    constant function applied to a variable of the circuit.
    """
    fs = tuple(target)
    b = CircuitBuilder(share=False)
    ids: list[int] = []
    anchor: int | None = None
    for g in circuit.gates:
        if g.kind == VAR:
            ids.append(b.var(g.name))
            if anchor is None:
                anchor = ids[-1]
            continue
        if g.kind != FN:
            ids.append(b.add(Gate(g.kind, (ids[g.args[0]],), index=g.index)))
            continue
        same = next((f for f in fs if _same(f, g.fn)), None)
        if same is not None:
            ids.append(b.fn(same, *[ids[a] for a in g.args]))
            continue
        if g.fn.arity == 0:
            unary = FunctionTable(g.fn.name, 1, (g.fn.bits[0], g.fn.bits[0]))
            impl = _implementation(fs, unary, False)
            if anchor is None:
                anchor = b.var(fresh_name(circuit.variables, "_v"))
            ids.append(_instantiate(b, impl, [anchor]))
            continue
        impl = _implementation(fs, g.fn, False)
        ids.append(_instantiate(b, impl, [ids[a] for a in g.args]))
    return b.build(ids[circuit.out], circuit.k).pruned()


def eliminate_dia(circuit: ModalCircuit, neg: FunctionTable = NOT) -> ModalCircuit:
    """Rewrite every diamond as ``not box not``."""
    b = CircuitBuilder(share=False)
    ids: list[int] = []
    for g in circuit.gates:
        args = tuple(ids[a] for a in g.args)
        if g.kind == DIA:
            ids.append(b.fn(neg, b.box(g.index, b.fn(neg, args[0]))))
        else:
            ids.append(b.add(Gate(g.kind, args, g.name, g.fn, g.index)))
    return b.build(ids[circuit.out], circuit.k)


def eliminate_box(circuit: ModalCircuit, neg: FunctionTable = NOT) -> ModalCircuit:
    """Rewrite every box as ``not dia not``."""
    b = CircuitBuilder(share=False)
    ids: list[int] = []
    for g in circuit.gates:
        args = tuple(ids[a] for a in g.args)
        if g.kind == BOX:
            ids.append(b.fn(neg, b.dia(g.index, b.fn(neg, args[0]))))
        else:
            ids.append(b.add(Gate(g.kind, args, g.name, g.fn, g.index)))
    return b.build(ids[circuit.out], circuit.k)


def _iff(b: CircuitBuilder, x, y) -> int:
    """``not(x and not y) and not(not x and y)`` built as a tree over and/not.

    ``x`` and ``y`` are callables that build a fresh copy of each side, so
    the result has no shared gates.
    """
    left = b.fn(NOT, b.fn(AND, x(), b.fn(NOT, y())))
    right = b.fn(NOT, b.fn(AND, b.fn(NOT, x()), y()))
    return b.fn(AND, left, right)


def _gate_prefix(c: ModalCircuit) -> str:
    prefix = "_g"
    while any(v.startswith(prefix) for v in c.variables):
        prefix = "_" + prefix
    return prefix


def lift_model(circuit: ModalCircuit, model: KripkeModel) -> KripkeModel:
    """Extend a model of ``circuit`` to a model of ``circuit_to_formula(circuit)``.

    Each gate variable is made true exactly at the worlds where its gate is
    true, which satisfies every gate definition everywhere.
    """
    c = eliminate_dia(circuit.pruned())
    prefix = _gate_prefix(c)
    values = evaluate_all(c, model)
    val = {x: list(ws) for x, ws in model.valuation.items()}
    for gid in range(len(c.gates)):
        val[f"{prefix}{gid}"] = [int(w) for w in np.flatnonzero(values[gid])]
    return KripkeModel.make(model.n_worlds, model.relations, val, model.root)


def circuit_to_formula(circuit: ModalCircuit) -> ModalCircuit:
    """Equisatisfiable formula over {and, not, box, E} with one variable per gate.

    The formula asserts the output gate variable and, at every world up to
    the modal depth (via nested E), that each gate variable agrees with its
    gate's definition.
    """
    c = eliminate_dia(circuit.pruned())
    for f in c.functions_used:
        if not any(_same(f, g) for g in (AND, NOT, CONST0, CONST1)):
            raise PreconditionError(f"circuit_to_formula needs a circuit over and/not, found {f.name}")
    md = c.modal_depth()
    prefix = _gate_prefix(c)
    b = CircuitBuilder(share=False)

    def gv(gid: int) -> int:
        return b.add(Gate(VAR, name=f"{prefix}{gid}"))

    clauses: list[int] = []
    for level in range(md + 1):
        for gid, g in enumerate(c.gates):
            here = lambda gid=gid: gv(gid)  # noqa: E731
            if g.kind == VAR:
                clause = _iff(b, here, lambda g=g: b.var(g.name))
            elif g.kind == FN and g.fn.arity == 0:
                clause = gv(gid) if g.fn.bits[0] else b.fn(NOT, gv(gid))
            elif g.kind == FN and _same(g.fn, NOT):
                clause = _iff(b, here, lambda g=g: b.fn(NOT, gv(g.args[0])))
            elif g.kind == FN:
                clause = _iff(b, here, lambda g=g: b.fn(AND, gv(g.args[0]), gv(g.args[1])))
            elif g.kind == BOX:
                clause = _iff(b, here, lambda g=g: b.box(g.index, gv(g.args[0])))
            else:
                clause = _iff(b, here, lambda g=g: b.E(gv(g.args[0])))
            for _ in range(level):
                clause = b.E(clause)
            clauses.append(clause)
    out = gv(c.out)
    for cl in clauses:
        out = b.fn(AND, out, cl)
    return b.build(out, c.k)


def kd_to_k(circuit: ModalCircuit) -> ModalCircuit:
    """Conjoin seriality up to the modal depth; KD-sat iff the result is K-sat."""
    md = circuit.modal_depth()
    b = CircuitBuilder(share=True)
    ids = b.copy_from(circuit)
    one = b.const(1)
    serial = conjoin(b, AND, [b.dia(j, one) for j in range(1, circuit.k + 1)])
    parts = [ids[circuit.out]]
    layer = serial
    for _ in range(md + 1):
        parts.append(layer)
        layer = b.E(layer)
    out = parts[0]
    for p in parts[1:]:
        out = b.fn(AND, out, p)
    return b.build(out, circuit.k).pruned()


# ---------------------------------------------------------------------------
# transformation to bases generating S1


def _modal_words(circuit: ModalCircuit) -> list[tuple[int, ...]]:
    """Index words of the modal paths below the output, shortest first."""
    words: set[tuple[int, ...]] = set()
    stack: list[tuple[int, tuple[int, ...]]] = [(circuit.out, ())]
    seen: set[tuple[int, tuple[int, ...]]] = set()
    while stack:
        gid, w = stack.pop()
        if (gid, w) in seen:
            continue
        seen.add((gid, w))
        words.add(w)
        g = circuit.gates[gid]
        if g.kind in (BOX, DIA):
            stack.append((g.args[0], w + (g.index,)))
        elif g.kind == E:
            raise CircuitError("s1_transform does not accept the E operator")
        else:
            stack.extend((a, w) for a in g.args)
    return sorted(words, key=lambda w: (len(w), w))


def s1_transform(
    phi: ModalCircuit, base: Base | tuple[FunctionTable, ...], ops: frozenset[str] | set[str], frame: str = "K"
) -> ModalCircuit:
    """Equisatisfiable formula over ``base`` for a formula over and/or/not.

    The constant 1 becomes a fresh variable t, connectives become
    once-per-variable implementations over ``base`` plus 1, and t is forced
    true in every world the formula inspects: by boxed copies of t when box
    is available, otherwise by guarding each diamond with t. ``ops`` is the
    set of modal operators the output may use (``{"box"}``, ``{"dia"}`` or both).
    """
    fs = tuple(base)
    ops = frozenset(ops)
    if not ops or not ops <= {BOX, DIA}:
        raise PreconditionError("ops must be a non-empty subset of {'box', 'dia'}")
    if not clone_contains(fs, FunctionTable.from_callable("andnot", 2, lambda x, y: x and not y)):
        raise NotInCloneError("s1_transform needs a base whose clone contains x and not y")
    for f in phi.functions_used:
        if not any(_same(f, g) for g in (AND, OR, NOT, CONST0, CONST1)):
            raise PreconditionError(f"s1_transform expects a formula over and/or/not, found {f.name}")
    with_one = fs if any(_same(f, CONST1) for f in fs) else fs + (CONST1,)
    impl_and = _implementation(with_one, AND, True)
    impl_or = _implementation(with_one, OR, True)
    impl_not = _implementation(with_one, NOT, True)
    try:
        guard_and = _implementation(fs, AND, frozenset({1}))
    except SearchExhaustedError:
        guard_and = _implementation(fs, AND, False)

    # bring the modal operators into ``ops``
    c = phi
    if DIA not in ops:
        c = eliminate_dia(c)
    if BOX not in ops:
        c = eliminate_box(c)
    if frame.upper() == "KD" and BOX not in ops:
        c = _with_local_seriality(c)

    t_name = fresh_name(c.variables, "_t")
    b = CircuitBuilder(share=False)

    def t() -> int:
        return b.var(t_name)

    def apply_impl(impl: BFormula, inputs: list) -> int:
        if impl.fn is None:
            x = inputs[impl.var]
            return x() if callable(x) else x
        if impl.fn.arity == 0 and _same(impl.fn, CONST1) and not any(f is impl.fn for f in fs):
            return t()
        return b.fn(impl.fn, *[apply_impl(a, inputs) for a in impl.args])

    def guard(x) -> int:
        return apply_impl(guard_and, [t, x])

    # translate the tree bottom-up, re-instantiating shared gates per use
    def build(gid: int) -> int:
        g = c.gates[gid]
        if g.kind == VAR:
            return b.var(g.name)
        if g.kind == FN:
            if g.fn.arity == 0:
                return t() if g.fn.bits[0] else apply_impl(impl_not, [t])
            impl = impl_not if _same(g.fn, NOT) else impl_and if _same(g.fn, AND) else impl_or
            return apply_impl(impl, [lambda a=a: build(a) for a in g.args])
        child = build(g.args[0])
        if BOX not in ops:  # relativize diamonds to t-worlds
            return b.dia(g.index, guard(child))
        return b.modal(g.kind, g.index, child)

    body = build(c.out)
    if BOX in ops:
        # thunks so a duplicated guard argument is rebuilt rather than shared
        def boxed(w):
            def make():
                node = t()
                for i in reversed(w):
                    node = b.box(i, node)
                return node
            return make

        def both(x, y):
            return lambda: apply_impl(guard_and, [x, y])

        layer = [boxed(w) for w in _modal_words(c)]
        while len(layer) > 1:
            nxt = [both(layer[i], layer[i + 1]) for i in range(0, len(layer) - 1, 2)]
            if len(layer) % 2:
                nxt.append(layer[-1])
            layer = nxt
        out = apply_impl(guard_and, [layer[0], body])
    else:
        out = guard(body)
    return b.build(out, phi.k)


def _with_local_seriality(c: ModalCircuit) -> ModalCircuit:
    """Conjoin ``[w] dia_j 1`` for every inspected word w (box written as not-dia-not)."""
    b = CircuitBuilder(share=False)
    ids = b.copy_from(c)
    conj = []
    for w in _modal_words(c):
        for j in range(1, c.k + 1):
            node = b.dia(j, b.const(1))
            for i in reversed(w):
                node = b.fn(NOT, b.dia(i, b.fn(NOT, node)))
            conj.append(node)
    out = ids[c.out]
    for x in conj:
        out = b.fn(AND, out, x)
    return b.build(out, c.k)
