"""Kripke models, frame classes, satisfaction and the brute-force oracle."""

from __future__ import annotations

import itertools
import json
import os
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Iterator, Mapping

import numpy as np

from . import _kernels
from .boolfn import NOT
from .circuit import BOX, DIA, E, FN, VAR, Gate, ModalCircuit
from .errors import ModsatError, ResourceError, UnsupportedFrameError

FRAMES = ("K", "KD", "T", "K4", "S4", "S5")
DEFAULT_MAX_WORLDS = 3


def check_frame(frame: str) -> str:
    f = frame.upper()
    if f not in FRAMES:
        raise UnsupportedFrameError(f"unknown frame class {frame!r}; expected one of {', '.join(FRAMES)}")
    return f


@dataclass(frozen=True)
class KripkeModel:
    n_worlds: int
    relations: tuple[frozenset[tuple[int, int]], ...]
    valuation: Mapping[str, frozenset[int]] = field(default_factory=dict, hash=False)
    root: int = 0

    def __post_init__(self):
        if self.n_worlds < 1:
            raise ModsatError("a model needs at least one world")
        for rel in self.relations:
            for u, v in rel:
                if not (0 <= u < self.n_worlds and 0 <= v < self.n_worlds):
                    raise ModsatError(f"relation edge ({u}, {v}) leaves the world set")
        for name, ws in self.valuation.items():
            if any(not 0 <= w < self.n_worlds for w in ws):
                raise ModsatError(f"valuation of {name} names a world outside the model")
        if not 0 <= self.root < self.n_worlds:
            raise ModsatError("root world outside the model")

    @classmethod
    def make(
        cls,
        n_worlds: int,
        relations: Iterable[Iterable[tuple[int, int]]],
        valuation: Mapping[str, Iterable[int]] | None = None,
        root: int = 0,
    ) -> KripkeModel:
        rels = tuple(frozenset((int(u), int(v)) for u, v in r) for r in relations)
        val = {str(k): frozenset(int(w) for w in ws) for k, ws in (valuation or {}).items()}
        return cls(n_worlds, rels, val, root)

    @property
    def k(self) -> int:
        return len(self.relations)

    def successors(self, i: int, w: int) -> list[int]:
        return sorted(v for u, v in self.relations[i - 1] if u == w)

    def with_root(self, root: int) -> KripkeModel:
        return KripkeModel(self.n_worlds, self.relations, self.valuation, root)

    def to_dict(self) -> dict:
        return {
            "worlds": list(range(self.n_worlds)),
            "relations": {str(i + 1): sorted([u, v] for u, v in rel) for i, rel in enumerate(self.relations)},
            "valuation": {name: sorted(ws) for name, ws in sorted(self.valuation.items())},
            "root": self.root,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, data: Mapping) -> KripkeModel:
        worlds = list(data.get("worlds", []))
        index = {w: i for i, w in enumerate(worlds)}
        if len(index) != len(worlds):
            raise ModsatError("duplicate world ids in witness")

        def idx(w):
            if w not in index:
                raise ModsatError(f"unknown world id {w!r} in witness")
            return index[w]

        rel_data = data.get("relations", {})
        k = max((int(i) for i in rel_data), default=1)
        rels = [[] for _ in range(k)]
        for i, edges in rel_data.items():
            if int(i) < 1:
                raise ModsatError("relation indices start at 1")
            rels[int(i) - 1] = [(idx(u), idx(v)) for u, v in edges]
        val = {name: [idx(w) for w in ws] for name, ws in data.get("valuation", {}).items()}
        return cls.make(len(worlds), rels, val, idx(data.get("root", worlds[0] if worlds else 0)))

    @classmethod
    def from_json(cls, text: str) -> KripkeModel:
        return cls.from_dict(json.loads(text))


def reflexive_singleton(k: int, true_vars: Iterable[str] = ()) -> KripkeModel:
    return KripkeModel.make(1, [[(0, 0)] for _ in range(k)], {x: [0] for x in true_vars})


def irreflexive_singleton(k: int, true_vars: Iterable[str] = ()) -> KripkeModel:
    return KripkeModel.make(1, [[] for _ in range(k)], {x: [0] for x in true_vars})


# ---------------------------------------------------------------------------
# frame predicates


def _rel_props(rel: frozenset, n: int) -> dict[str, bool]:
    succ = [set() for _ in range(n)]
    for u, v in rel:
        succ[u].add(v)
    return {
        "serial": all(succ[w] for w in range(n)),
        "reflexive": all(w in succ[w] for w in range(n)),
        "transitive": all(x in succ[u] for u in range(n) for v in succ[u] for x in succ[v]),
        "symmetric": all(u in succ[v] for u in range(n) for v in succ[u]),
    }


_REQUIRED = {
    "K": (),
    "KD": ("serial",),
    "T": ("reflexive",),
    "K4": ("transitive",),
    "S4": ("reflexive", "transitive"),
    "S5": ("reflexive", "transitive", "symmetric"),
}


def relation_in_class(rel: frozenset, n: int, frame: str) -> bool:
    props = _rel_props(rel, n)
    return all(props[p] for p in _REQUIRED[check_frame(frame)])


def frame_in_class(model: KripkeModel, frame: str) -> bool:
    return all(relation_in_class(rel, model.n_worlds, frame) for rel in model.relations)


# ---------------------------------------------------------------------------
# satisfaction


def _model_arrays(model: KripkeModel, circuit: ModalCircuit):
    k = max(circuit.k, model.k)
    rels = [np.array(sorted(model.relations[i]) if i < model.k else [], np.int64).reshape(-1, 2) for i in range(k)]
    ptr, dst = _kernels.build_csr(model.n_worlds, rels)
    names = circuit.variables
    val = np.zeros((len(names), model.n_worlds), np.uint8)
    for j, name in enumerate(names):
        for w in model.valuation.get(name, ()):
            val[j, w] = 1
    return val, ptr, dst


def evaluate_all(circuit: ModalCircuit, model: KripkeModel, jit: bool | None = None) -> np.ndarray:
    """Value of every gate at every world, ``uint8[gates, worlds]``."""
    cc = _kernels.compile_circuit(circuit)
    val, ptr, dst = _model_arrays(model, circuit)
    return _kernels.evaluate_compiled(cc, val, ptr, dst, model.n_worlds, jit)


def holds(model: KripkeModel, world: int | None, circuit: ModalCircuit) -> bool:
    """Truth of the circuit's output at ``world`` (the model root when None)."""
    w = model.root if world is None else world
    return bool(evaluate_all(circuit, model)[circuit.out, w])


def holds_reference(model: KripkeModel, world: int, circuit: ModalCircuit) -> bool:
    """Direct clause-by-clause evaluation, independent of the batched kernel."""
    memo: dict[tuple[int, int], int] = {}
    k = max(circuit.k, model.k)
    succ = [[model.successors(i, w) if i <= model.k else [] for w in range(model.n_worlds)] for i in range(1, k + 1)]

    def val(g: int, w: int) -> int:
        key = (g, w)
        if key in memo:
            return memo[key]
        gate = circuit.gates[g]
        if gate.kind == VAR:
            r = int(w in model.valuation.get(gate.name, ()))
        elif gate.kind == FN:
            r = gate.fn(*[val(a, w) for a in gate.args])
        elif gate.kind == DIA:
            r = int(any(val(gate.args[0], v) for v in succ[gate.index - 1][w]))
        elif gate.kind == BOX:
            r = int(all(val(gate.args[0], v) for v in succ[gate.index - 1][w]))
        else:
            r = int(all(val(gate.args[0], v) for i in range(k) for v in succ[i][w]))
        memo[key] = r
        return r

    return bool(val(circuit.out, world))


def negate(circuit: ModalCircuit) -> ModalCircuit:
    gates = circuit.gates + (Gate(FN, (circuit.out,), fn=NOT),)
    return ModalCircuit(gates, len(gates) - 1, circuit.k)


# ---------------------------------------------------------------------------
# oracle


@dataclass(frozen=True)
class OracleResult:
    answer: str
    witness: KripkeModel | None = None
    method: str = ""

    def __bool__(self):
        raise TypeError("use .answer; an oracle result may be UNKNOWN")


class _TooBig(Exception):
    pass


def bound_worlds(default: int = DEFAULT_MAX_WORLDS) -> int:
    env = os.environ.get("MODSAT_BOUND_WORLDS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ModsatError(f"MODSAT_BOUND_WORLDS must be an integer, got {env!r}") from None
    return default


def brute_force_sat(
    circuit: ModalCircuit,
    frame: str,
    max_worlds: int | None = None,
    max_vars: int = 10,
    max_types: int = 50_000,
) -> OracleResult:
    """Ground-truth satisfiability.

    K and KD are decided exactly by an exhaustive type construction over tree
    models of height at most the modal depth, and T through the same
    construction after a reflexive translation. S4, S5 and K4 enumerate every
    model with up to ``max_worlds`` worlds; failing to find one gives UNKNOWN
    unless the instance is already unsatisfiable under T (or K for K4).
    """
    frame = check_frame(frame)
    circuit = circuit.pruned()
    if len(circuit.variables) > max_vars:
        return OracleResult("UNKNOWN", method="too many variables")
    if frame in ("K", "KD"):
        try:
            return _type_search(circuit, frame == "KD", max_types)
        except _TooBig:
            pass
        res = _enumerate_search(circuit, frame, max_worlds or bound_worlds())
        return res if res.answer == "SAT" else OracleResult("UNKNOWN", method="type cap exceeded")
    if frame == "T":
        try:
            res = _type_search(reflexive_translation(circuit), False, max_types)
        except _TooBig:
            res = None
        if res is not None:
            if res.answer == "SAT":
                return OracleResult("SAT", reflexive_closure(res.witness), "types over K, reflexive closure")
            return OracleResult(res.answer, None, "types over K after reflexive translation")
    res = _enumerate_search(circuit, frame, max_worlds or bound_worlds())
    if res.answer == "SAT":
        return res
    if circuit.modal_depth() == 0:
        return OracleResult("UNSAT", method="propositional")
    if frame != "K4":
        # every reflexive class sits inside T
        try:
            if _type_search(reflexive_translation(circuit), False, max_types).answer == "UNSAT":
                return OracleResult("UNSAT", method="unsatisfiable over T")
        except _TooBig:
            pass
    else:
        try:
            if _type_search(circuit, False, max_types).answer == "UNSAT":
                return OracleResult("UNSAT", method="unsatisfiable over K")
        except _TooBig:
            pass
    return OracleResult("UNKNOWN", method=f"no model with <= {max_worlds or bound_worlds()} worlds")


def reflexive_translation(circuit: ModalCircuit) -> ModalCircuit:
    """Circuit that is K-satisfiable exactly when ``circuit`` is T-satisfiable.

    Each box reads as ``body and box body`` and each diamond as ``body or dia
    body``; a K-model of the result becomes a T-model after adding loops.
    """
    from .boolfn import AND, OR
    from .circuit import BOX, DIA, E, FN, VAR, CircuitBuilder

    b = CircuitBuilder(share=False)
    new: list[int] = []
    for g in circuit.gates:
        if g.kind == VAR:
            new.append(b.var(g.name))
        elif g.kind == FN:
            new.append(b.fn(g.fn, *[new[a] for a in g.args]))
        else:
            child = new[g.args[0]]
            modal = b.modal(g.kind, g.index, child)
            new.append(b.fn(OR if g.kind == DIA else AND, child, modal))
    return b.build(new[circuit.out], circuit.k)


def reflexive_closure(model: KripkeModel) -> KripkeModel:
    loops = {(w, w) for w in range(model.n_worlds)}
    return KripkeModel.make(
        model.n_worlds, [set(r) | loops for r in model.relations], model.valuation, model.root
    )


def brute_force_valid(circuit: ModalCircuit, frame: str, **kw) -> OracleResult:
    res = brute_force_sat(negate(circuit), frame, **kw)
    if res.answer == "SAT":
        return OracleResult("FALSIFIABLE", res.witness, res.method)
    if res.answer == "UNSAT":
        return OracleResult("VALID", None, res.method)
    return res


def oracle_equivalent(c1: ModalCircuit, c2: ModalCircuit, frame: str, **kw) -> str:
    """'EQUIVALENT', 'DIFFERENT' or 'UNKNOWN' via satisfiability of c1 xor c2."""
    from .boolfn import XOR

    k = max(c1.k, c2.k)
    from .circuit import CircuitBuilder

    b = CircuitBuilder(share=False)
    a = b.copy_from(c1)[c1.out]
    c = b.copy_from(c2)[c2.out]
    diff = b.build(b.fn(XOR, a, c), k)
    res = brute_force_sat(diff, frame, **kw)
    return {"SAT": "DIFFERENT", "UNSAT": "EQUIVALENT"}.get(res.answer, "UNKNOWN")


# -- exact type construction for K and KD ------------------------------------


def _type_search(circuit: ModalCircuit, serial: bool, max_types: int, max_rows: int = 2_000_000) -> OracleResult:
    """Exact search over the realizable world types of height <= modal depth.

    A world's gate values depend only on its valuation and, per modality, on
    which watched child gates are true at some successor (diamond children)
    or false at some successor (box and E children). Types are therefore
    projected onto the watched gates plus the output.
    """
    gates = circuit.gates
    k = circuit.k
    names = circuit.variables
    nv = len(names)
    pos: list[dict[int, int]] = [{} for _ in range(k)]  # child gate -> aggregate bit
    neg: list[dict[int, int]] = [{} for _ in range(k)]
    for g in gates:
        c = g.args[0] if g.args else None
        if g.kind == DIA:
            pos[g.index - 1].setdefault(c, 0)
        elif g.kind == BOX:
            neg[g.index - 1].setdefault(c, 0)
        elif g.kind == E:
            for i in range(k):
                neg[i].setdefault(c, 0)
    for i in range(k):
        nbit = 0
        for c in pos[i]:
            pos[i][c] = nbit
            nbit += 1
        for c in neg[i]:
            neg[i][c] = nbit
            nbit += 1
    watched = sorted({c for i in range(k) for c in (*pos[i], *neg[i])} | {circuit.out})
    if len(watched) > 62:
        raise _TooBig()
    proj_bit = {c: j for j, c in enumerate(watched)}
    out_bit = 1 << proj_bit[circuit.out]

    rows_v = np.arange(1 << nv, dtype=np.int64)

    def evaluate(vals: np.ndarray, aggs: np.ndarray | None) -> np.ndarray:
        """Projected types for rows of (valuation, per-modality aggregates)."""
        n = vals.shape[0]
        gv: list[np.ndarray] = []
        for g in gates:
            if g.kind == VAR:
                v = ((vals >> names.index(g.name)) & 1).astype(np.uint8)
            elif g.kind == FN:
                idx = np.zeros(n, np.int64)
                for a in g.args:
                    idx = (idx << 1) | gv[a]
                v = np.asarray(g.fn.bits, np.uint8)[idx] if g.args else np.full(n, g.fn.bits[0], np.uint8)
            else:
                c = g.args[0]
                if aggs is None:
                    v = gv[c]
                elif g.kind == DIA:
                    v = ((aggs[:, g.index - 1] >> pos[g.index - 1][c]) & 1).astype(np.uint8)
                elif g.kind == BOX:
                    v = (1 - ((aggs[:, g.index - 1] >> neg[g.index - 1][c]) & 1)).astype(np.uint8)
                else:
                    v = np.ones(n, np.uint8)
                    for i in range(k):
                        v &= (1 - ((aggs[:, i] >> neg[i][c]) & 1)).astype(np.uint8)
            gv.append(v)
        t = np.zeros(n, np.int64)
        for c, j in proj_bit.items():
            t |= gv[c].astype(np.int64) << j
        return t

    def aggregate(i: int, t: int) -> int:
        a = 0
        for c, b in pos[i].items():
            if (t >> proj_bit[c]) & 1:
                a |= 1 << b
        for c, b in neg[i].items():
            if not (t >> proj_bit[c]) & 1:
                a |= 1 << b
        return a

    # provenance: projected type -> (valuation, successor types per modality or None for a leaf)
    prov: dict[int, tuple[int, tuple[tuple[int, ...], ...] | None]] = {}
    order: list[int] = []

    def record(types: np.ndarray, vals: np.ndarray, succ_of_row) -> list[int]:
        uniq, first = np.unique(types, return_index=True)
        added = []
        for t, r in zip(uniq.tolist(), first.tolist()):
            if t not in prov:
                prov[t] = (int(vals[r]), succ_of_row(r))
                added.append(t)
        return added

    leaf_aggs = None if serial else np.zeros((rows_v.size, k), np.int64)
    order.extend(record(evaluate(rows_v, leaf_aggs), rows_v, lambda r: None))
    md = circuit.modal_depth()
    for _level in range(md):
        if any(t & out_bit for t in order):
            break
        closures: list[list[tuple[int, tuple[int, ...]]]] = []
        for i in range(k):
            cl: dict[int, tuple[int, ...]] = {} if serial else {0: ()}
            for t in order:
                a = aggregate(i, t)
                for existing, gens in list(cl.items()):
                    u = existing | a
                    if u not in cl:
                        cl[u] = gens + (t,)
                if a not in cl:
                    cl[a] = (t,)
                if len(cl) > max_types:
                    raise _TooBig()
            closures.append(sorted(cl.items()))
        n_combo = 1
        for cl in closures:
            n_combo *= len(cl)
        if n_combo * rows_v.size > max_rows:
            raise _TooBig()
        agg_cols = [np.array([a for a, _ in cl], np.int64) for cl in closures]
        grids = np.meshgrid(*[np.arange(len(cl)) for cl in closures], indexing="ij")
        combo_idx = np.stack([g.ravel() for g in grids], axis=1)  # (n_combo, k)
        aggs = np.stack([agg_cols[i][combo_idx[:, i]] for i in range(k)], axis=1)
        vals = np.repeat(rows_v, n_combo)
        types = np.empty(vals.size, np.int64)
        chunk = max(1, 65_536 // n_combo) * n_combo
        for lo in range(0, vals.size, chunk):
            hi = min(vals.size, lo + chunk)
            reps = (hi - lo) // n_combo
            types[lo:hi] = evaluate(vals[lo:hi], np.tile(aggs, (reps, 1)))

        def succ_of_row(r, combo_idx=combo_idx, closures=closures, n_combo=n_combo):
            ci = combo_idx[r % n_combo]
            return tuple(closures[i][ci[i]][1] for i in range(k))

        added = record(types, vals, succ_of_row)
        if len(prov) > max_types:
            raise _TooBig()
        if not added:
            break
        order.extend(added)
    hit = next((t for t in order if t & out_bit), None)
    if hit is None:
        return OracleResult("UNSAT", method="type search")
    return OracleResult("SAT", _witness_from_types(hit, prov, names, k, serial), "type search")


def _witness_from_types(root_type, prov, names, k, serial) -> KripkeModel:
    ids: dict[int, int] = {}
    rels: list[list[tuple[int, int]]] = [[] for _ in range(k)]
    valuation: dict[str, list[int]] = {n: [] for n in names}
    stack = [root_type]
    while stack:
        t = stack.pop()
        if t in ids:
            continue
        w = ids[t] = len(ids)
        v, succ = prov[t]
        for j, n in enumerate(names):
            if (v >> j) & 1:
                valuation[n].append(w)
        if succ is not None:
            stack.extend(s for gens in succ for s in gens)
    for t, w in ids.items():
        v, succ = prov[t]
        if succ is None:
            if serial:
                for i in range(k):
                    rels[i].append((w, w))
        else:
            for i, gens in enumerate(succ):
                for s in gens:
                    rels[i].append((w, ids[s]))
    return KripkeModel.make(len(ids), rels, valuation, ids[root_type])


# -- explicit enumeration -----------------------------------------------------


@lru_cache(maxsize=None)
def relations_on(n: int, frame: str) -> tuple[tuple[tuple[int, int], ...], ...]:
    """Every relation on ``n`` worlds allowed by the frame class."""
    pairs = [(u, v) for u in range(n) for v in range(n)]
    out = []
    for mask in range(1 << len(pairs)):
        rel = frozenset(p for j, p in enumerate(pairs) if (mask >> j) & 1)
        if relation_in_class(rel, n, frame):
            out.append(tuple(sorted(rel)))
    return tuple(out)


def enumerate_models(n: int, k: int, frame: str, names: Iterable[str]) -> Iterator[KripkeModel]:
    """Every model on exactly ``n`` worlds (slow; intended for cross-checks)."""
    names = list(names)
    rels = relations_on(n, check_frame(frame))
    for combo in itertools.product(rels, repeat=k):
        for v in range(1 << (n * len(names))):
            val = {x: [w for w in range(n) if (v >> (j * n + w)) & 1] for j, x in enumerate(names)}
            yield KripkeModel.make(n, combo, val)


def _enumerate_search(circuit: ModalCircuit, frame: str, max_worlds: int, chunk_worlds: int = 262_144) -> OracleResult:
    cc = _kernels.compile_circuit(circuit)
    names = circuit.variables
    k = circuit.k
    out = circuit.out
    for n in range(1, max_worlds + 1):
        rels = relations_on(n, frame)
        nval = 1 << (n * len(names))
        per_combo = nval * n
        n_combos = len(rels) ** k
        if n_combos * per_combo > 50_000_000:
            raise ResourceError(f"model space with {n} worlds is too large to enumerate")
        step = max(1, chunk_worlds // per_combo)
        combos = itertools.product(range(len(rels)), repeat=k)
        while True:
            block = list(itertools.islice(combos, step))
            if not block:
                break
            nb = len(block)
            W = nb * per_combo
            edges = []
            for i in range(k):
                cs, us, vs = [], [], []
                for c, combo in enumerate(block):
                    for u, v in rels[combo[i]]:
                        cs.append(c)
                        us.append(u)
                        vs.append(v)
                cs_a = np.array(cs, np.int64)[:, None]
                base = (cs_a * nval + np.arange(nval, dtype=np.int64)[None, :]) * n
                src = (base + np.array(us, np.int64)[:, None]).ravel()
                dst = (base + np.array(vs, np.int64)[:, None]).ravel()
                edges.append(np.stack([src, dst], axis=1) if len(src) else np.zeros((0, 2), np.int64))
            ptr, dsta = _kernels.build_csr(W, edges)
            world = np.arange(W, dtype=np.int64)
            local = world % n
            vidx = (world // n) % nval
            val = np.zeros((len(names), W), np.uint8)
            for j in range(len(names)):
                val[j] = (vidx >> (j * n + local)) & 1
            res = _kernels.evaluate_compiled(cc, val, ptr, dsta, W)
            hits = np.flatnonzero(res[out])
            if hits.size:
                w = int(hits[0])
                c, v, root = w // per_combo, (w // n) % nval, w % n
                combo = block[c]
                model = KripkeModel.make(
                    n,
                    [rels[combo[i]] for i in range(k)],
                    {x: [u for u in range(n) if (v >> (j * n + u)) & 1] for j, x in enumerate(names)},
                    root,
                )
                return OracleResult("SAT", model, f"enumeration ({n} worlds)")
    return OracleResult("UNKNOWN", method=f"no model with <= {max_worlds} worlds")
