"""Modal circuits: DAGs of variables, Boolean function gates and modal gates."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable

from .boolfn import CONST0, CONST1, FunctionTable, dual_function
from .errors import CircuitError, ResourceError

VAR, FN, BOX, DIA, E = "var", "fn", "box", "dia", "E"
MODAL_KINDS = (BOX, DIA, E)


@dataclass(frozen=True)
class Gate:
    kind: str
    args: tuple[int, ...] = ()
    name: str | None = None
    fn: FunctionTable | None = None
    index: int = 0

    def key(self) -> tuple:
        """Structural key used for hash-consing."""
        if self.kind == VAR:
            return (VAR, self.name)
        if self.kind == FN:
            return (FN, self.fn.name, self.fn.bits, self.args)
        return (self.kind, self.index, self.args)

    def is_const(self) -> bool:
        return self.kind == FN and self.fn.arity == 0


@dataclass(frozen=True)
class ModalCircuit:
    """Gates in topological order; every argument id is smaller than its gate id."""

    gates: tuple[Gate, ...]
    out: int
    k: int = 1

    def __post_init__(self):
        if not self.gates:
            raise CircuitError("a circuit needs at least one gate")
        if not 0 <= self.out < len(self.gates):
            raise CircuitError(f"output gate {self.out} does not exist")
        if self.k < 1:
            raise CircuitError("the number of modalities must be at least 1")
        for gid, g in enumerate(self.gates):
            if any(not 0 <= a < gid for a in g.args):
                raise CircuitError(f"gate {gid} refers to a gate that is not an earlier gate")
            if g.kind == VAR:
                if not g.name or g.args:
                    raise CircuitError(f"variable gate {gid} needs a name and no inputs")
            elif g.kind == FN:
                if g.fn is None or len(g.args) != g.fn.arity:
                    raise CircuitError(f"gate {gid}: function arity does not match its inputs")
            elif g.kind in (BOX, DIA):
                if len(g.args) != 1 or not 1 <= g.index <= self.k:
                    raise CircuitError(f"gate {gid}: modal gate needs one input and index in 1..{self.k}")
            elif g.kind == E:
                if len(g.args) != 1:
                    raise CircuitError(f"gate {gid}: E needs one input")
            else:
                raise CircuitError(f"gate {gid}: unknown kind {g.kind!r}")

    def __len__(self):
        return len(self.gates)

    @property
    def size(self) -> int:
        return len(self.gates)

    @cached_property
    def variables(self) -> tuple[str, ...]:
        return tuple(sorted({g.name for g in self.gates if g.kind == VAR}))

    @cached_property
    def functions_used(self) -> frozenset[FunctionTable]:
        return frozenset(g.fn for g in self.gates if g.kind == FN)

    @cached_property
    def modal_kinds_used(self) -> frozenset[str]:
        return frozenset(g.kind for g in self.gates if g.kind in MODAL_KINDS)

    @cached_property
    def indices_used(self) -> frozenset[int]:
        return frozenset(g.index for g in self.gates if g.kind in (BOX, DIA))

    @cached_property
    def parents(self) -> tuple[tuple[int, ...], ...]:
        ps: list[list[int]] = [[] for _ in self.gates]
        for gid, g in enumerate(self.gates):
            for a in g.args:
                ps[a].append(gid)
        return tuple(tuple(p) for p in ps)

    @cached_property
    def depths(self) -> tuple[int, ...]:
        d: list[int] = []
        for g in self.gates:
            if g.kind in MODAL_KINDS:
                d.append(1 + d[g.args[0]])
            else:
                d.append(max((d[a] for a in g.args), default=0))
        return tuple(d)

    def modal_depth(self) -> int:
        return self.depths[self.out]

    def reachable(self) -> frozenset[int]:
        seen = {self.out}
        stack = [self.out]
        while stack:
            for a in self.gates[stack.pop()].args:
                if a not in seen:
                    seen.add(a)
                    stack.append(a)
        return frozenset(seen)

    def is_formula(self) -> bool:
        """True when every non-variable gate feeds at most one argument slot.

        Variable gates are leaves and may be referenced any number of times.
        """
        uses = [0] * len(self.gates)
        for gid in self.reachable():
            for a in self.gates[gid].args:
                uses[a] += 1
        return all(u <= 1 or g.kind == VAR for u, g in zip(uses, self.gates))

    def tree_size(self) -> int:
        sizes: list[int] = []
        for g in self.gates:
            sizes.append(1 + sum(sizes[a] for a in g.args))
        return sizes[self.out]

    def pruned(self) -> ModalCircuit:
        """Drop gates the output does not depend on."""
        keep = sorted(self.reachable())
        if len(keep) == len(self.gates):
            return self
        remap = {old: new for new, old in enumerate(keep)}
        gates = tuple(
            Gate(g.kind, tuple(remap[a] for a in g.args), g.name, g.fn, g.index)
            for g in (self.gates[i] for i in keep)
        )
        return ModalCircuit(gates, remap[self.out], self.k)

    def with_k(self, k: int) -> ModalCircuit:
        return ModalCircuit(self.gates, self.out, k)

    # -- transformations ------------------------------------------------------

    def expand(self, size_cap: int | None = 1_000_000) -> ModalCircuit:
        """Unfold shared gates into a formula tree (variables stay shared by name)."""
        total = self.tree_size()
        if size_cap is not None and total > size_cap:
            raise ResourceError(f"expanded formula would have {total} nodes (cap {size_cap})")
        b = CircuitBuilder(share=False)
        results: list[int] = []
        stack: list[tuple[int, bool]] = [(self.out, False)]
        while stack:
            gid, ready = stack.pop()
            g = self.gates[gid]
            if not ready:
                stack.append((gid, True))
                for a in reversed(g.args):
                    stack.append((a, False))
                continue
            n = len(g.args)
            args = results[len(results) - n:] if n else []
            del results[len(results) - n:]
            if g.kind == VAR:
                results.append(b.var(g.name))
            elif g.kind == FN:
                results.append(b.fn(g.fn, *args))
            else:
                results.append(b.modal(g.kind, g.index, args[0]))
        return b.build(results[0], self.k)

    def dualize(self) -> ModalCircuit:
        """Swap every function for its dual and box for diamond."""
        gates = []
        for gid, g in enumerate(self.gates):
            if g.kind == FN:
                gates.append(Gate(FN, g.args, fn=dual_function(g.fn)))
            elif g.kind == BOX:
                gates.append(Gate(DIA, g.args, index=g.index))
            elif g.kind == DIA:
                gates.append(Gate(BOX, g.args, index=g.index))
            elif g.kind == E:
                raise CircuitError(f"gate {gid}: the E operator has no dual in the circuit language")
            else:
                gates.append(g)
        return ModalCircuit(tuple(gates), self.out, self.k)

    # -- printing -------------------------------------------------------------

    def to_netlist(self) -> str:
        lines = []
        for gid, g in enumerate(self.gates):
            lines.append(f"g{gid} = {_gate_rhs(g)}")
        lines.append(f"OUTPUT g{self.out}")
        return "\n".join(lines) + "\n"

    def to_formula(self, size_cap: int | None = 200_000) -> str:
        total = self.tree_size()
        if size_cap is not None and total > size_cap:
            raise ResourceError(f"formula text would have {total} nodes (cap {size_cap})")
        text: list[str] = []
        for g in self.gates:
            text.append(_node_text(g, text))
        return text[self.out]


def _fn_token(f: FunctionTable) -> str | None:
    if f.arity == 0:
        if f.bits == CONST0.bits and f.name in ("const0", "0"):
            return "0"
        if f.bits == CONST1.bits and f.name in ("const1", "1"):
            return "1"
    return None


def _gate_rhs(g: Gate) -> str:
    if g.kind == VAR:
        return f"VAR {g.name}"
    if g.kind == FN:
        tok = _fn_token(g.fn)
        if tok is not None:
            return f"CONST {tok}"
        return " ".join([g.fn.name] + [f"g{a}" for a in g.args])
    if g.kind == E:
        return f"E g{g.args[0]}"
    return f"{g.kind.upper()} {g.index} g{g.args[0]}"


def _node_text(g: Gate, done: list[str]) -> str:
    if g.kind == VAR:
        return g.name
    if g.kind == FN:
        tok = _fn_token(g.fn)
        if tok is not None:
            return tok
        if g.fn.arity == 0:
            return f"{g.fn.name}()"
        return f"{g.fn.name}({', '.join(done[a] for a in g.args)})"
    if g.kind == E:
        return f"E({done[g.args[0]]})"
    return f"{g.kind} {g.index} {done[g.args[0]]}"


@dataclass
class CircuitBuilder:
    """Incremental construction with optional hash-consing of identical gates."""

    share: bool = True
    gates: list[Gate] = field(default_factory=list)
    _index: dict[tuple, int] = field(default_factory=dict)
    _vars: dict[str, int] = field(default_factory=dict)
    max_index: int = 0

    def add(self, gate: Gate) -> int:
        if gate.kind == VAR:
            if gate.name in self._vars:
                return self._vars[gate.name]
        elif self.share:
            hit = self._index.get(gate.key())
            if hit is not None:
                return hit
        gid = len(self.gates)
        self.gates.append(gate)
        if gate.kind == VAR:
            self._vars[gate.name] = gid
        elif self.share:
            self._index[gate.key()] = gid
        if gate.kind in (BOX, DIA):
            self.max_index = max(self.max_index, gate.index)
        return gid

    def var(self, name: str) -> int:
        return self.add(Gate(VAR, name=name))

    def fn(self, f: FunctionTable, *args: int) -> int:
        return self.add(Gate(FN, tuple(args), fn=f))

    def const(self, value: int) -> int:
        return self.fn(CONST1 if value else CONST0)

    def box(self, i: int, a: int) -> int:
        return self.add(Gate(BOX, (a,), index=i))

    def dia(self, i: int, a: int) -> int:
        return self.add(Gate(DIA, (a,), index=i))

    def E(self, a: int) -> int:
        return self.add(Gate(E, (a,)))

    def modal(self, kind: str, i: int, a: int) -> int:
        if kind == E:
            return self.E(a)
        return self.add(Gate(kind, (a,), index=i))

    def copy_from(self, c: ModalCircuit, gid_map: dict[int, int] | None = None) -> list[int]:
        """Import all gates of ``c``; returns the new id of each old gate."""
        ids: list[int] = []
        for g in c.gates:
            ids.append(self.add(Gate(g.kind, tuple(ids[a] for a in g.args), g.name, g.fn, g.index)))
        return ids

    def build(self, out: int, k: int | None = None) -> ModalCircuit:
        kk = max(k or 1, self.max_index, 1)
        return ModalCircuit(tuple(self.gates), out, kk)


def canonical_gates(c: ModalCircuit) -> ModalCircuit:
    """Hash-cons the reachable part so structurally equal gates are shared."""
    b = CircuitBuilder(share=True)
    ids = b.copy_from(c.pruned())
    return b.build(ids[c.pruned().out], c.k).pruned()


def conjoin(b: CircuitBuilder, and_fn: FunctionTable, items: Iterable[int]) -> int:
    """Balanced binary conjunction of gate ids using the given 2-ary table."""
    layer = list(items)
    if not layer:
        return b.const(1)
    while len(layer) > 1:
        nxt = [b.fn(and_fn, layer[i], layer[i + 1]) for i in range(0, len(layer) - 1, 2)]
        if len(layer) % 2:
            nxt.append(layer[-1])
        layer = nxt
    return layer[0]
