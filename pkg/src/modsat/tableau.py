"""Tableau for multi-modal K and KD, and the engine dispatcher."""

from __future__ import annotations

import sys

from .boolfn import AND, CONST0, CONST1, NOT, Base, FunctionTable
from .circuit import BOX, DIA, E, FN, VAR, ModalCircuit
from .errors import PreconditionError, UnsupportedFrameError
from .kripke import KripkeModel, brute_force_sat, check_frame, frame_in_class, holds
from .polysolve import ENGINES, applicable
from .reductions import circuit_to_formula, eliminate_dia, kd_to_k, rewrite_base
from .verdict import INVALID, SAT, UNKNOWN, UNSAT, VALID, Verdict, sat_verdict

ENGINE_ORDER = (
    "r1/d",
    "monotone-serial",
    "unary-chain",
    "or-recursion",
    "xor",
    "and-recursion",
    "single-op-monotone",
)
ALL_ENGINES = ENGINE_ORDER + ("tableau", "oracle")


def _same(f: FunctionTable, g: FunctionTable) -> bool:
    return f.arity == g.arity and f.bits == g.bits


class _Tableau:
    def __init__(self, c: ModalCircuit):
        self.c = c
        self.k = c.k
        self.kind: list[str] = []
        for gid, g in enumerate(c.gates):
            if g.kind == VAR:
                self.kind.append("var")
            elif g.kind == FN:
                if _same(g.fn, AND):
                    self.kind.append("and")
                elif _same(g.fn, NOT):
                    self.kind.append("not")
                elif _same(g.fn, CONST0):
                    self.kind.append("0")
                elif _same(g.fn, CONST1):
                    self.kind.append("1")
                else:
                    raise PreconditionError(f"tableau: gate {gid} uses {g.fn.name}; expected and/not/0/1")
            elif g.kind in (BOX, E):
                self.kind.append(g.kind)
            else:
                raise PreconditionError("tableau: diamonds must be rewritten as not-box-not first")

    # -- one world ----------------------------------------------------------

    def _propagate(self, val: dict[int, bool], queue: list[tuple[int, bool]]) -> bool:
        args = self.c.gates
        while queue:
            g, v = queue.pop()
            old = val.get(g)
            if old is not None:
                if old != v:
                    return False
                continue
            val[g] = v
            kind = self.kind[g]
            if kind == "0" and v or kind == "1" and not v:
                return False
            if kind == "not":
                queue.append((args[g].args[0], not v))
            elif kind == "and":
                a, b = args[g].args
                if v:
                    queue.append((a, True))
                    queue.append((b, True))
                else:
                    va, vb = val.get(a), val.get(b)
                    if va is True:
                        queue.append((b, False))
                    elif vb is True:
                        queue.append((a, False))
            if v:
                # a false conjunction with one true argument forces the other false
                for p in self.c.parents[g]:
                    if self.kind[p] == "and" and val.get(p) is False:
                        a, b = args[p].args
                        queue.append((b if a == g else a, False))
        return True

    def _open_choice(self, val: dict[int, bool]):
        """An unresolved disjunction: F(a and b) or F(E a) with k > 1."""
        for g, v in sorted(val.items()):
            if v:
                continue
            kind = self.kind[g]
            if kind == "and":
                a, b = self.c.gates[g].args
                if val.get(a) is not False and val.get(b) is not False:
                    return ("and", g, a, b)
        return None

    def sat(self, assertions: dict[int, bool], depth: int):
        """Model of the assertions as (valuation, successor list), or None."""
        val: dict[int, bool] = {}
        if not self._propagate(val, list(assertions.items())):
            return None
        return self._search(val, depth)

    def _search(self, val: dict[int, bool], depth: int):
        choice = self._open_choice(val)
        if choice is not None:
            _, g, a, b = choice
            for branch in ([(a, False)], [(a, True), (b, False)]):
                trial = dict(val)
                if self._propagate(trial, list(branch)):
                    res = self._search(trial, depth)
                    if res is not None:
                        return res
            return None
        # E assertions: true ones box every relation; false ones pick a relation
        pending_e = [g for g, v in sorted(val.items()) if not v and self.kind[g] == E]
        return self._modal(val, depth, pending_e, [])

    def _modal(self, val, depth, pending_e, chosen):
        if pending_e:
            g = pending_e[0]
            for j in range(1, self.k + 1):
                res = self._modal(val, depth, pending_e[1:], chosen + [(j, self.c.gates[g].args[0])])
                if res is not None:
                    return res
            return None
        boxed: list[dict[int, bool]] = [dict() for _ in range(self.k)]
        demands: list[tuple[int, int]] = list(chosen)
        for g, v in sorted(val.items()):
            kind = self.kind[g]
            child = self.c.gates[g].args[0] if self.c.gates[g].args else None
            if kind == BOX:
                i = self.c.gates[g].index
                if v:
                    boxed[i - 1][child] = True
                else:
                    demands.append((i, child))
            elif kind == E and v:
                for i in range(self.k):
                    boxed[i][child] = True
        succs = []
        for i, child in demands:
            need = dict(boxed[i - 1])
            if need.get(child) is True:
                return None
            need[child] = False
            res = self.sat(need, depth + 1)
            if res is None:
                return None
            succs.append((i, res))
        true_vars = [self.c.gates[g].name for g, v in val.items() if v and self.kind[g] == "var"]
        return (true_vars, succs)


def _model_from_tree(tree, k: int) -> KripkeModel:
    rels: list[list[tuple[int, int]]] = [[] for _ in range(k)]
    valuation: dict[str, list[int]] = {}
    count = 0
    stack = [(tree, None, 0)]
    while stack:
        (true_vars, succs), parent, i = stack.pop()
        w = count
        count += 1
        if parent is not None:
            rels[i - 1].append((parent, w))
        for x in true_vars:
            valuation.setdefault(x, []).append(w)
        for j, sub in reversed(succs):
            stack.append((sub, w, j))
    return KripkeModel.make(count, rels, valuation, 0)


def _serialize(model: KripkeModel) -> KripkeModel:
    """Add a self-loop wherever a world has no successor."""
    rels = []
    for rel in model.relations:
        has = {u for u, _ in rel}
        rels.append(set(rel) | {(w, w) for w in range(model.n_worlds) if w not in has})
    return KripkeModel.make(model.n_worlds, rels, model.valuation, model.root)


def ksat_tableau(phi: ModalCircuit, frame: str = "K", k: int | None = None) -> Verdict:
    """Decide satisfiability of a circuit over and/not/0/1, box and E under K or KD."""
    frame = check_frame(frame)
    if frame not in ("K", "KD"):
        raise UnsupportedFrameError("the tableau decides K and KD only")
    c = phi if k is None or k == phi.k else phi.with_k(max(k, phi.k))
    if DIA in c.modal_kinds_used:
        raise PreconditionError("tableau: diamonds must be rewritten as not-box-not first")
    _Tableau(c)  # vocabulary check before any rewriting
    work = eliminate_dia(kd_to_k(c)) if frame == "KD" else c
    tab = _Tableau(work)
    limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(limit, 20_000))
    try:
        tree = tab.sat({work.out: True}, 0)
    finally:
        sys.setrecursionlimit(limit)
    if tree is None:
        return sat_verdict(False, "tableau")
    model = _model_from_tree(tree, c.k)
    if frame == "KD":
        model = _serialize(model)
    return sat_verdict(True, "tableau", model)


# ---------------------------------------------------------------------------
# dispatcher

_ORACLE_WITNESS_VARS = 6
_ORACLE_WITNESS_SIZE = 80


def _restrict(model: KripkeModel, names) -> KripkeModel:
    keep = set(names)
    val = {x: ws for x, ws in model.valuation.items() if x in keep}
    return KripkeModel(model.n_worlds, model.relations, val, model.root)


def _tableau_engine(c: ModalCircuit, frame: str) -> Verdict:
    rewritten = rewrite_base(c, (AND, NOT))
    formula = circuit_to_formula(rewritten)
    v = ksat_tableau(formula, frame)
    if v.witness is not None:
        return Verdict(v.answer, "tableau", "sat", _restrict(v.witness, c.variables))
    return v


def _oracle_engine(c: ModalCircuit, frame: str, max_worlds: int | None) -> Verdict:
    res = brute_force_sat(c, frame, max_worlds=max_worlds)
    return Verdict(res.answer, "oracle", "sat", res.witness)


def choose_engine(c: ModalCircuit, frame: str) -> str:
    frame = check_frame(frame)
    for name in ENGINE_ORDER:
        if applicable(name, c, frame):
            return name
    return "tableau" if frame in ("K", "KD") else "oracle"


def _run(c: ModalCircuit, frame: str, engine: str, max_worlds: int | None) -> Verdict:
    if engine == "tableau":
        if frame not in ("K", "KD"):
            raise UnsupportedFrameError("the tableau decides K and KD only")
        return _tableau_engine(c, frame)
    if engine == "oracle":
        return _oracle_engine(c, frame, max_worlds)
    if engine not in ENGINES:
        raise PreconditionError(f"unknown engine {engine!r}; choose from {', '.join(ALL_ENGINES)}")
    if not applicable(engine, c, frame):
        raise PreconditionError(f"engine {engine} does not apply to this instance under {frame}")
    return ENGINES[engine](c, frame)


def _complement(model: KripkeModel, names) -> KripkeModel:
    val = {x: [w for w in range(model.n_worlds) if w not in model.valuation.get(x, ())] for x in names}
    return KripkeModel.make(model.n_worlds, model.relations, val, model.root)


def solve(
    c: ModalCircuit,
    frame: str = "K",
    task: str = "sat",
    base: Base | None = None,
    engine: str | None = None,
    max_worlds: int | None = None,
) -> Verdict:
    """Decide satisfiability or validity with the cheapest applicable engine.

    Validity is decided as satisfiability of the dual circuit with the answer
    negated; a countermodel is the dual's model with the valuation flipped.
    ``base`` is accepted for interface symmetry; preconditions are checked on
    the functions the circuit actually uses.
    """
    frame = check_frame(frame)
    c = c.pruned()
    if task == "valid":
        dual = c.dualize()
        v = solve(dual, frame, "sat", None if base is None else base.dual(), engine, max_worlds)
        if v.answer == UNKNOWN:
            return Verdict(UNKNOWN, v.engine, "valid")
        if v.answer == UNSAT:
            return Verdict(VALID, v.engine, "valid")
        witness = None if v.witness is None else _complement(v.witness, c.variables)
        return Verdict(INVALID, v.engine, "valid", witness)
    if task != "sat":
        raise ValueError(f"task must be 'sat' or 'valid', got {task!r}")
    name = engine or choose_engine(c, frame)
    v = _run(c, frame, name, max_worlds)
    if v.answer == SAT and v.witness is None and len(c.variables) <= _ORACLE_WITNESS_VARS and c.size <= _ORACLE_WITNESS_SIZE:
        res = brute_force_sat(c, frame, max_worlds=max_worlds)
        if res.answer == SAT:
            v = Verdict(SAT, v.engine, "sat", res.witness)
    return v


def verify_witness(c: ModalCircuit, frame: str, verdict: Verdict) -> bool:
    """Re-check a witness: frame membership plus truth (or falsity for validity)."""
    if verdict.witness is None:
        return False
    m = verdict.witness
    if not frame_in_class(m, frame):
        return False
    value = holds(m, m.root, c)
    return value if verdict.task == "sat" else not value
