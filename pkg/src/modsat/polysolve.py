"""Specialized polynomial-time satisfiability procedures for restricted bases."""

from __future__ import annotations

from functools import lru_cache

from .boolfn import FunctionTable, constant_value, essential_args, property_profile
from .circuit import BOX, DIA, E, FN, VAR, ModalCircuit
from .errors import PreconditionError, UnsupportedFrameError
from .kripke import (
    KripkeModel,
    check_frame,
    holds,
    irreflexive_singleton,
    reflexive_singleton,
)
from .verdict import Verdict, sat_verdict
from .xorsat import is_xor_circuit, xor_equivalent, xor_minimize, xor_normalize, xor_sat

__all__ = [
    "sat_r1_or_d",
    "sat_monotone_serial",
    "sat_unary_chain",
    "sat_or_recursion",
    "sat_and_recursion",
    "sat_monotone_single_op",
    "xor_normalize",
    "xor_minimize",
    "xor_sat",
    "xor_equivalent",
    "ENGINES",
    "applicable",
]

SERIAL_FRAMES = ("KD", "T", "S4", "S5")


@lru_cache(maxsize=4096)
def _props(f: FunctionTable):
    return property_profile(f)


def _all(c: ModalCircuit, flag: str) -> bool:
    return all(getattr(_props(f), flag) for f in c.functions_used)


def _no_E(c: ModalCircuit) -> bool:
    return E not in c.modal_kinds_used


def _check(cond: bool, engine: str, why: str) -> None:
    if not cond:
        raise PreconditionError(f"{engine}: {why}")


def _singleton_value(c: ModalCircuit, value: int) -> int:
    """Output in the reflexive singleton with every variable set to ``value``."""
    model = reflexive_singleton(c.k, c.variables if value else ())
    return int(holds(model, 0, c))


# ---------------------------------------------------------------------------


def sat_r1_or_d(c: ModalCircuit, frame: str = "K") -> Verdict:
    """1-reproducing or self-dual bases: always satisfiable in the reflexive singleton."""
    check_frame(frame)
    c = c.pruned()
    r1, d = _all(c, "reproduces1"), _all(c, "self_dual")
    _check(r1 or d, "r1/d", "every function must reproduce 1 or every function must be self-dual")
    for value in (1, 0) if r1 else (0, 1):
        if _singleton_value(c, value):
            model = reflexive_singleton(c.k, c.variables if value else ())
            return sat_verdict(True, "r1/d", model)
    raise AssertionError("self-dual circuit false under both constant assignments")


def sat_monotone_serial(c: ModalCircuit, frame: str) -> Verdict:
    """Monotone bases over serial frames: decide in the all-true reflexive singleton."""
    frame = check_frame(frame)
    _check(frame in SERIAL_FRAMES, "monotone-serial", "frame class must be serial (KD, T, S4, S5)")
    c = c.pruned()
    _check(_all(c, "monotone"), "monotone-serial", "every function must be monotone")
    ok = bool(_singleton_value(c, 1))
    return sat_verdict(ok, "monotone-serial", reflexive_singleton(c.k, c.variables))


def _chain(c: ModalCircuit, engine: str):
    """Follow the output down a chain of unary steps: (ops, terminal)."""
    ops: list[tuple[str, int]] = []  # ("neg", 0) | ("box", i) | ("dia", i)
    gid = c.out
    while True:
        g = c.gates[gid]
        if g.kind == VAR:
            return ops, ("var", g.name)
        if g.kind == FN:
            const = constant_value(g.fn)
            if const is not None:
                return ops, ("const", const)
            ess = essential_args(g.fn)
            _check(len(ess) == 1, engine, f"{g.fn.name} depends on more than one argument")
            j = ess[0]
            # value when the essential argument is 1
            row = 1 << (g.fn.arity - 1 - j)
            if g.fn.bits[row] == 0:
                ops.append(("neg", 0))
            gid = g.args[j]
        elif g.kind in (BOX, DIA):
            ops.append((g.kind, g.index))
            gid = g.args[0]
        else:
            raise PreconditionError(f"{engine}: the E operator is not supported")


def sat_unary_chain(c: ModalCircuit, frame: str) -> Verdict:
    """Essentially unary bases: push negations to the end of the chain."""
    frame = check_frame(frame)
    c = c.pruned()
    _check(_all(c, "essentially_unary"), "unary-chain", "every function must be essentially unary or constant")
    ops, (kind, val) = _chain(c, "unary-chain")
    parity = 0
    modal: list[tuple[str, int]] = []
    for op, i in ops:
        if op == "neg":
            parity ^= 1
        else:
            modal.append(((DIA if op == BOX else BOX) if parity else op, i))
    if kind == "const":
        z_zero = (val ^ parity) == 0
    else:
        z_zero = False
    has_box = any(op == BOX for op, _ in modal)
    if not z_zero:
        true_vars = [val] if kind == "var" and not parity else []
        model = reflexive_singleton(c.k, true_vars)
        return sat_verdict(True, "unary-chain", model)
    if frame in ("K", "K4") and has_box:
        # diamonds in front of the first box lead to a world without successors
        steps = []
        for op, i in modal:
            if op == BOX:
                break
            steps.append(i)
        n = len(steps) + 1
        rels = [[] for _ in range(c.k)]
        for w, i in enumerate(steps):
            rels[i - 1].append((w, w + 1))
        if frame == "K4":
            rels = [_transitive_closure(r) for r in rels]
        return sat_verdict(True, "unary-chain", KripkeModel.make(n, rels, {}))
    return sat_verdict(False, "unary-chain")


def _transitive_closure(edges):
    closure = set(edges)
    changed = True
    while changed:
        changed = False
        for u, v in list(closure):
            for x, y in list(closure):
                if v == x and (u, y) not in closure:
                    closure.add((u, y))
                    changed = True
    return sorted(closure)


def sat_or_recursion(c: ModalCircuit, frame: str) -> Verdict:
    """Disjunctive bases: satisfiable iff some path reaches a satisfiable leaf."""
    frame = check_frame(frame)
    c = c.pruned()
    _check(_no_E(c), "or-recursion", "the E operator is not supported")
    _check(_all(c, "is_or_with_constants"), "or-recursion", "every function must be a disjunction or a constant")
    dead_end_ok = frame in ("K", "K4")
    memo: dict[int, list[tuple[str, int]] | None] = {}

    def path(gid: int):
        """Modal steps from ``gid`` down to a satisfied leaf, or None."""
        if gid in memo:
            return memo[gid]
        g = c.gates[gid]
        res = None
        if g.kind == VAR:
            res = []
        elif g.kind == FN:
            const = constant_value(g.fn)
            if const is not None:
                res = [] if const else None
            else:
                for j in essential_args(g.fn):
                    sub = path(g.args[j])
                    if sub is not None:
                        res = sub
                        break
        elif g.kind == BOX and dead_end_ok:
            res = [(BOX, g.index)]
        else:
            sub = path(g.args[0])
            res = None if sub is None else [(g.kind, g.index)] + sub
        memo[gid] = res
        return res

    steps = path(c.out)
    if steps is None:
        return sat_verdict(False, "or-recursion")
    if not dead_end_ok:
        return sat_verdict(True, "or-recursion", reflexive_singleton(c.k, c.variables))
    moves = [i for kind, i in steps if kind == DIA]
    n = len(moves) + 1
    rels = [[] for _ in range(c.k)]
    for w, i in enumerate(moves):
        rels[i - 1].append((w, w + 1))
    if frame == "K4":
        rels = [_transitive_closure(r) for r in rels]
    model = KripkeModel.make(n, rels, {x: range(n) for x in c.variables})
    return sat_verdict(True, "or-recursion", model)


def sat_and_recursion(c: ModalCircuit, frame: str = "K") -> Verdict:
    """Conjunctive bases over K: recursion on sets of gates forced true together."""
    frame = check_frame(frame)
    _check(frame == "K", "and-recursion", "only the frame class K is supported")
    c = c.pruned()
    _check(_all(c, "is_and_with_constants"), "and-recursion", "every function must be a conjunction or a constant")
    k = c.k

    def and_closure(h: frozenset[int]) -> frozenset[int] | None:
        seen = set(h)
        stack = list(h)
        while stack:
            g = c.gates[stack.pop()]
            if g.kind != FN:
                continue
            const = constant_value(g.fn)
            if const == 0:
                return None
            if const is None:
                for j in essential_args(g.fn):
                    a = g.args[j]
                    if a not in seen:
                        seen.add(a)
                        stack.append(a)
        return frozenset(seen)

    memo: dict[frozenset[int], bool] = {}
    plan: dict[frozenset[int], list[tuple[int, frozenset[int]]]] = {}

    def sat(h: frozenset[int]) -> bool:
        if h in memo:
            return memo[h]
        memo[h] = False  # sets strictly shrink in modal depth; guards accidental cycles
        closed = and_closure(h)
        if closed is None:
            return False
        boxed: list[set[int]] = [set() for _ in range(k)]
        for gid in closed:
            g = c.gates[gid]
            if g.kind == BOX:
                boxed[g.index - 1].add(g.args[0])
            elif g.kind == E:
                for i in range(k):
                    boxed[i].add(g.args[0])
        succ = []
        for gid in sorted(closed):
            g = c.gates[gid]
            if g.kind == DIA:
                need = frozenset(boxed[g.index - 1] | {g.args[0]})
                if not sat(need):
                    return False
                succ.append((g.index, need))
        memo[h] = True
        plan[h] = succ
        return True

    root = frozenset({c.out})
    if not sat(root):
        return sat_verdict(False, "and-recursion")
    ids: dict[frozenset[int], int] = {}
    rels: list[list[tuple[int, int]]] = [[] for _ in range(k)]
    stack = [root]
    ids[root] = 0
    order = [root]
    while stack:
        h = stack.pop()
        for i, need in plan[h]:
            if need not in ids:
                ids[need] = len(ids)
                order.append(need)
                stack.append(need)
            rels[i - 1].append((ids[h], ids[need]))
    # identical requirement sets share a world; a tree is not needed because
    # box constraints at a world only depend on its own requirement set
    n = len(ids)
    model = KripkeModel.make(n, rels, {x: range(n) for x in c.variables})
    return sat_verdict(True, "and-recursion", model)


def sat_monotone_single_op(c: ModalCircuit, frame: str = "K") -> Verdict:
    """Monotone bases with only diamonds or only boxes, over K or K4."""
    frame = check_frame(frame)
    _check(frame in ("K", "K4"), "single-op-monotone", "frame class must be K or K4")
    c = c.pruned()
    _check(_all(c, "monotone"), "single-op-monotone", "every function must be monotone")
    kinds = c.modal_kinds_used
    _check(kinds <= {DIA} or kinds <= {BOX}, "single-op-monotone", "circuit mixes boxes and diamonds")
    if kinds <= {DIA}:
        model = reflexive_singleton(c.k, c.variables)
    else:
        model = irreflexive_singleton(c.k, c.variables)
    ok = holds(model, 0, c)
    return sat_verdict(ok, "single-op-monotone", model)


def sat_xor(c: ModalCircuit, frame: str = "K") -> Verdict:
    frame = check_frame(frame)
    if frame not in ("K", "KD"):
        raise UnsupportedFrameError("the xor engine handles K and KD only")
    _check(is_xor_circuit(c.pruned()), "xor", "every function must be xor, 0 or 1")
    return xor_sat(c.pruned(), frame)


ENGINES = {
    "r1/d": sat_r1_or_d,
    "monotone-serial": sat_monotone_serial,
    "unary-chain": sat_unary_chain,
    "or-recursion": sat_or_recursion,
    "xor": sat_xor,
    "and-recursion": sat_and_recursion,
    "single-op-monotone": sat_monotone_single_op,
}


def applicable(engine: str, c: ModalCircuit, frame: str) -> bool:
    """Whether ``engine`` accepts the instance (precondition check only)."""
    frame = check_frame(frame)
    c = c.pruned()
    kinds = c.modal_kinds_used
    if engine == "r1/d":
        return _all(c, "reproduces1") or _all(c, "self_dual")
    if engine == "monotone-serial":
        return frame in SERIAL_FRAMES and _all(c, "monotone")
    if engine == "unary-chain":
        return _no_E(c) and _all(c, "essentially_unary")
    if engine == "or-recursion":
        return _no_E(c) and _all(c, "is_or_with_constants")
    if engine == "xor":
        return frame in ("K", "KD") and _no_E(c) and is_xor_circuit(c)
    if engine == "and-recursion":
        return frame == "K" and _all(c, "is_and_with_constants")
    if engine == "single-op-monotone":
        return frame in ("K", "K4") and _all(c, "monotone") and _no_E(c) and (kinds <= {DIA} or kinds <= {BOX})
    return False
