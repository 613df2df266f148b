"""Instance generators: exhaustive enumeration of small circuits and random sampling."""

from __future__ import annotations

import itertools
import random
from collections.abc import Iterator, Sequence
from dataclasses import dataclass

from .boolfn import FunctionTable
from .circuit import BOX, DIA, E, FN, VAR, CircuitBuilder, Gate, ModalCircuit


@dataclass(frozen=True)
class Term:
    """Hash-consed term; ``sub`` holds the ids of all distinct subterms including itself."""

    id: int
    kind: str
    args: tuple[int, ...]
    label: object  # variable name, function table or modal index
    sub: frozenset[int]
    tree_size: int
    md: int


def _symmetric(f: FunctionTable) -> bool:
    if f.arity != 2:
        return False
    return f.bits[1] == f.bits[2]


class TermEnumerator:
    """All terms up to a size bound, counted as distinct gates or as tree nodes.

    Binary symmetric functions take their arguments in id order so each
    circuit is produced once up to argument swap; every other function takes
    all argument tuples. Gate-count enumeration grows a term from a
    downward-closed set ``S`` of existing terms by exactly ``d`` new gates, so
    the work is proportional to the output rather than to all pairs.
    """

    def __init__(
        self,
        functions: Sequence[FunctionTable],
        variables: Sequence[str],
        k: int = 1,
        max_md: int = 2,
        modal_kinds: Sequence[str] = (BOX, DIA),
        measure: str = "dag",
    ):
        if measure not in ("dag", "tree"):
            raise ValueError("measure must be 'dag' or 'tree'")
        self.functions = tuple(functions)
        self.variables = tuple(variables)
        self.k = k
        self.max_md = max_md
        self.modal_kinds = tuple(modal_kinds)
        self.measure = measure
        self.terms: list[Term] = []
        self.index: dict[tuple, int] = {}
        self.by_size: dict[int, list[int]] = {}
        self._unary = [f for f in self.functions if f.arity == 1]
        self._multi = [f for f in self.functions if f.arity >= 2]
        self._modal = [(kind, i) for kind in self.modal_kinds for i in ([0] if kind == E else range(1, k + 1))]
        self._ext: dict[tuple[frozenset, int], tuple[int, ...]] = {}

    def _size(self, t: Term) -> int:
        return len(t.sub) if self.measure == "dag" else t.tree_size

    def _intern(self, kind, args, label) -> int:
        key = (kind, tuple(args), label if kind != FN else (label.name, label.arity, label.bits))
        tid = self.index.get(key)
        if tid is not None:
            return tid
        tid = len(self.terms)
        sub = frozenset({tid}).union(*(self.terms[a].sub for a in args)) if args else frozenset({tid})
        tree = 1 + sum(self.terms[a].tree_size for a in args)
        md = max((self.terms[a].md for a in args), default=0) + (1 if kind in (BOX, DIA, E) else 0)
        t = Term(tid, kind, tuple(args), label, sub, tree, md)
        self.terms.append(t)
        self.index[key] = tid
        self.by_size.setdefault(self._size(t), []).append(tid)
        return tid

    def _leaves(self) -> list[int]:
        ids = [self._intern(VAR, (), x) for x in self.variables]
        ids += [self._intern(FN, (), f) for f in self.functions if f.arity == 0]
        return ids

    def generate(self, max_size: int) -> list[Term]:
        """Every term whose size is at most ``max_size``."""
        leaves = self._leaves()
        if self.measure == "tree":
            for s in range(2, max_size + 1):
                self._tree_level(s)
            out = {t.id for t in self.terms if t.tree_size <= max_size}
        else:
            self._leaf_ids = tuple(leaves)
            out = set()
            for d in range(1, max_size + 1):
                out.update(self.ext(frozenset(), d))
        return [self.terms[i] for i in sorted(out)]

    # -- counting tree nodes ----------------------------------------------

    def _tree_level(self, s: int) -> None:
        for a in list(self.by_size.get(s - 1, [])):
            self._apply_unary(a, lambda t: True)
        for f in self._multi:
            for split in _compositions(s - 1, f.arity):
                pools = [self.by_size.get(p, []) for p in split]
                for args in itertools.product(*pools):
                    if _symmetric(f) and args[0] > args[1]:
                        continue
                    self._intern(FN, args, f)

    def _apply_unary(self, a: int, keep) -> list[int]:
        out = []
        ta = self.terms[a]
        if ta.md < self.max_md:
            for kind, i in self._modal:
                t = self._intern(kind, (a,), i)
                if keep(t):
                    out.append(t)
        for f in self._unary:
            t = self._intern(FN, (a,), f)
            if keep(t):
                out.append(t)
        return out

    # -- counting distinct gates ----------------------------------------------

    def ext(self, S: frozenset, d: int) -> tuple[int, ...]:
        """Terms t whose subterm set has exactly ``d`` members outside ``S``."""
        key = (S, d)
        hit = self._ext.get(key)
        if hit is not None:
            return hit
        if d == 0:
            res = tuple(sorted(S))
        elif not S and d == 1:
            res = self._leaf_ids
        else:
            found: set[int] = set()
            if d == 1:
                found.update(i for i in self._leaf_ids if i not in S)
            for a in self.ext(S, d - 1):
                found.update(self._apply_unary(a, lambda t: t not in S))
            for f in self._multi:
                if f.arity != 2:
                    raise ValueError("gate-count enumeration supports arities up to 2")
                for j in range(d):
                    for a2 in self.ext(S, j):
                        S2 = S | self.terms[a2].sub
                        for a1 in self.ext(S2, d - 1 - j):
                            for args in ((a1, a2), (a2, a1)):
                                if _symmetric(f) and args[0] > args[1]:
                                    continue
                                t = self._intern(FN, args, f)
                                if t not in S:
                                    found.add(t)
            res = tuple(sorted(found))
        if len(self._ext) < 400_000:
            self._ext[key] = res
        return res

    def _gate(self, t: Term, args: tuple[int, ...]) -> Gate:
        if t.kind == VAR:
            return Gate(VAR, (), name=t.label)
        if t.kind == FN:
            return Gate(FN, args, fn=t.label)
        return Gate(t.kind, args, index=t.label)

    def circuit(self, tid: int) -> ModalCircuit:
        order = sorted(self.terms[tid].sub)
        pos = {j: n for n, j in enumerate(order)}
        gates = tuple(self._gate(self.terms[j], tuple(pos[a] for a in self.terms[j].args)) for j in order)
        return ModalCircuit(gates, len(gates) - 1, self.k)

    def pool_circuit(self) -> ModalCircuit:
        """Every term generated so far as one circuit; gate ``i`` is term ``i``."""
        gates = tuple(self._gate(t, t.args) for t in self.terms)
        return ModalCircuit(gates, len(gates) - 1, self.k)

    def circuits(self, max_size: int) -> Iterator[ModalCircuit]:
        for t in self.generate(max_size):
            yield self.circuit(t.id)


def _compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    """Ordered tuples of ``parts`` positive integers summing to ``total``."""
    if parts == 1:
        if total >= 1:
            yield (total,)
        return
    for first in range(1, total - parts + 2):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def enumerate_circuits(
    functions: Sequence[FunctionTable],
    variables: Sequence[str],
    max_size: int,
    k: int = 1,
    max_md: int = 2,
    modal_kinds: Sequence[str] = (BOX, DIA),
    measure: str = "dag",
) -> list[ModalCircuit]:
    en = TermEnumerator(functions, variables, k, max_md, modal_kinds, measure)
    return list(en.circuits(max_size))


def random_circuit(
    rng: random.Random,
    functions: Sequence[FunctionTable],
    variables: Sequence[str] = ("x", "y"),
    n_gates: int = 10,
    k: int = 1,
    max_md: int = 2,
    modal_kinds: Sequence[str] = (BOX, DIA),
    modal_rate: float = 0.3,
    formula: bool = False,
) -> ModalCircuit:
    """Random circuit with roughly ``n_gates`` internal gates.

    With ``formula`` set, every gate feeds at most one parent (variables may
    still be shared). Modal gates never push the depth past ``max_md``.
    """
    b = CircuitBuilder(share=False)
    depth: dict[int, int] = {}
    pool: list[int] = []
    for x in variables:
        g = b.var(x)
        depth[g] = 0
        pool.append(g)
    consts = [f for f in functions if f.arity == 0]
    for f in consts:
        if rng.random() < 0.5:
            g = b.fn(f)
            depth[g] = 0
            pool.append(g)
    ops = [f for f in functions if f.arity > 0]
    free = list(pool)  # gates without a parent yet (formula mode)
    for _ in range(n_gates):
        src = free if formula else pool
        if not src:
            break
        if modal_kinds and (not ops or rng.random() < modal_rate):
            cand = [g for g in src if depth[g] < max_md]
            if not cand:
                continue
            a = rng.choice(cand)
            kind = rng.choice(list(modal_kinds))
            i = 0 if kind == E else rng.randint(1, k)
            g = b.modal(kind, i, a)
            depth[g] = depth[a] + 1
            args = [a]
        else:
            if not ops:
                break
            f = rng.choice(ops)
            if formula:
                if len(src) < f.arity:
                    src = src + [b.var(rng.choice(list(variables)))]
                    while len(src) < f.arity:
                        src.append(b.var(rng.choice(list(variables))))
                args = rng.sample(src, f.arity)
            else:
                args = [rng.choice(src) for _ in range(f.arity)]
            for a in args:
                depth.setdefault(a, 0)
            g = b.fn(f, *args)
            depth[g] = max(depth[a] for a in args)
        pool.append(g)
        if formula:
            for a in set(args):
                if a in free and b.gates[a].kind != VAR:
                    free.remove(a)
        free.append(g)
    out = pool[-1]
    return b.build(out, k).pruned()
