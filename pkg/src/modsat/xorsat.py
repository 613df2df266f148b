"""Canonical forms for modal circuits over {xor, 0, 1} under K and KD.

Every gate denotes an affine combination of variables, the constant 1 and
diamond terms whose bodies are themselves in normal form. Boxes are read
as ``1 xor dia(1 xor body)``. A diamond with body 0 is 0, and under KD a
diamond with body 1 is 1. Two circuits are equivalent exactly when their
normal forms coincide, so the rebuilt circuit is canonical. When writing
the circuit back, a diamond term may be written as a box whenever that
gives fewer gates; the choice is a function of the normal form, so
canonicity is kept.
"""

from __future__ import annotations

from dataclasses import dataclass

from .boolfn import CONST0, CONST1, XOR, FunctionTable
from .circuit import BOX, DIA, FN, VAR, CircuitBuilder, Gate, ModalCircuit
from .errors import PreconditionError, UnsupportedFrameError
from .verdict import Verdict, sat_verdict


@dataclass(frozen=True)
class LinearForm:
    variables: frozenset[str]
    const: int
    handles: frozenset[int]

    def __xor__(self, other: LinearForm) -> LinearForm:
        return LinearForm(
            self.variables ^ other.variables, self.const ^ other.const, self.handles ^ other.handles
        )

    def is_const(self, value: int) -> bool:
        return not self.variables and not self.handles and self.const == value


ZERO = LinearForm(frozenset(), 0, frozenset())
ONE = LinearForm(frozenset(), 1, frozenset())


def is_xor_base_function(f: FunctionTable) -> bool:
    return any(f.arity == g.arity and f.bits == g.bits for g in (XOR, CONST0, CONST1))


class _Normalizer:
    def __init__(self, frame: str):
        frame = frame.upper()
        if frame not in ("K", "KD"):
            raise UnsupportedFrameError("xor normal forms are defined for K and KD only")
        self.serial = frame == "KD"
        self.handles: list[tuple[int, LinearForm]] = []
        self.keys: list[str] = []
        self.index: dict[tuple[int, LinearForm], int] = {}
        self._choice: dict[LinearForm, tuple[int, frozenset[int]]] = {}

    def dia(self, i: int, body: LinearForm) -> LinearForm:
        if body.is_const(0):
            return ZERO
        if self.serial and body.is_const(1):
            return ONE
        key = (i, body)
        h = self.index.get(key)
        if h is None:
            h = len(self.handles)
            self.handles.append(key)
            self.keys.append(f"<{i}:{self.form_key(body)}>")
            self.index[key] = h
        return LinearForm(frozenset(), 0, frozenset({h}))

    def form_key(self, f: LinearForm) -> str:
        return ",".join(self.operand_keys(f))

    def operand_keys(self, f: LinearForm) -> list[str]:
        keys = [f"v:{v}" for v in sorted(f.variables)]
        if f.const:
            keys.append("1")
        keys.extend(sorted(self.keys[h] for h in f.handles))
        return keys

    # -- writing a form back as gates ----------------------------------------
    #
    # A diamond term dia_i(b) may be written as 1 xor box_i(1 xor b) instead.
    # Each choice of boxed terms flips the constant once per box, so for
    # every form we pick the set of boxes that gives the fewest tree gates.
    # The choice only looks at the form itself, so canonicity is kept.

    def cost(self, f: LinearForm) -> int:
        return self._written(f)[0]

    def _written(self, f: LinearForm) -> tuple[int, frozenset[int]]:
        hit = self._choice.get(f)
        if hit is not None:
            return hit
        # best[p]: (cost of the modal operands, flags) over choices whose boxes have parity p
        best: list[tuple[int, tuple[int, ...]] | None] = [(0, ()), None]
        order = sorted(f.handles, key=lambda h: self.keys[h])
        for h in order:
            i, body = self.handles[h]
            d = 1 + self.cost(body)
            b = 1 + self.cost(body ^ ONE)
            nxt: list[tuple[int, tuple[int, ...]] | None] = [None, None]
            for p, cur in enumerate(best):
                if cur is None:
                    continue
                for flag, c in ((0, d), (1, b)):
                    cand = (cur[0] + c, cur[1] + (flag,))
                    q = p ^ flag
                    if nxt[q] is None or cand < nxt[q]:
                        nxt[q] = cand
            best = nxt
        options = []
        for p, cur in enumerate(best):
            if cur is None:
                continue
            n = len(f.variables) + (f.const ^ p) + len(order)
            total = cur[0] + len(f.variables) + (f.const ^ p) + max(n - 1, 0) if n else 1
            options.append((total, cur[1]))
        total, flags = min(options)
        out = (total, frozenset(h for h, flag in zip(order, flags) if flag))
        self._choice[f] = out
        return out

    def operands(self, f: LinearForm, boxes: bool = True) -> list[tuple[str, tuple[str, object]]]:
        """Written operands of ``f`` as (key, operand) pairs in canonical order.

        Operands are ``("var", name)``, ``("one", None)`` and
        ``(kind, (i, body))`` for a modal gate over the form ``body``. With
        ``boxes`` off every modal term is written as a diamond.
        """
        boxed = self._written(f)[1] if boxes else frozenset()
        ops: list[tuple[str, tuple[str, object]]] = [(f"v:{v}", ("var", v)) for v in sorted(f.variables)]
        if f.const ^ (len(boxed) & 1):
            ops.append(("1", ("one", None)))
        modal = []
        for h in f.handles:
            i, body = self.handles[h]
            if h in boxed:
                body = body ^ ONE
                modal.append((f"[{i}:{self.form_key(body)}]", (BOX, (i, body))))
            else:
                modal.append((self.keys[h], (DIA, (i, body))))
        return ops + sorted(modal)

    def forms(self, circuit: ModalCircuit) -> list[LinearForm]:
        out: list[LinearForm] = []
        for gid, g in enumerate(circuit.gates):
            if g.kind == VAR:
                out.append(LinearForm(frozenset({g.name}), 0, frozenset()))
            elif g.kind == FN:
                if not is_xor_base_function(g.fn):
                    raise PreconditionError(f"gate {gid}: {g.fn.name} is not xor, 0 or 1")
                if g.fn.arity == 0:
                    out.append(ONE if g.fn.bits[0] else ZERO)
                else:
                    out.append(out[g.args[0]] ^ out[g.args[1]])
            elif g.kind == DIA:
                out.append(self.dia(g.index, out[g.args[0]]))
            elif g.kind == BOX:
                out.append(ONE ^ self.dia(g.index, ONE ^ out[g.args[0]]))
            else:
                raise PreconditionError(f"gate {gid}: the E operator is not supported here")
        return out


class _Emitter:
    """Rebuild a circuit from normal forms, either as a tree or with sharing.

    Tree mode writes each xor level as a left-deep chain in canonical operand
    order. Shared mode first factors out operand pairs that occur together in
    several xor levels (greedy, most frequent pair first, ties broken by
    canonical keys), then chains what is left. Both depend only on the normal
    form, so the output stays canonical.
    """

    def __init__(self, norm: _Normalizer, share: bool, boxes: bool = True):
        self.norm = norm
        self.share = share
        self.boxes = boxes
        self.b = CircuitBuilder(share=share)
        self.modal: dict[str, tuple[str, tuple[int, LinearForm]]] = {}
        self.pairs: dict[str, tuple[str, str]] = {}
        self.plan: dict[LinearForm, list[str]] = {}
        self.gate_of: dict[str, int] = {}

    # operand keys: "v:<name>", "1", "<i:...>" for diamonds, "[i:...]" for
    # boxes, "(a^b)" for pairs
    def _rank(self, key: str):
        return ({"v": 0, "1": 1, "<": 2, "[": 2, "(": 3}[key[0]], key)

    def _plan(self, root: LinearForm) -> None:
        seen: set[LinearForm] = set()
        sets_of: dict[LinearForm, set[str]] = {}
        stack = [root]
        while stack:
            f = stack.pop()
            if f in seen:
                continue
            seen.add(f)
            written = self.norm.operands(f, self.boxes)
            sets_of[f] = {key for key, _ in written}
            for key, (kind, val) in written:
                if kind in (BOX, DIA):
                    self.modal[key] = (kind, val)
                    stack.append(val[1])
        sets = sets_of
        while True:
            counts: dict[tuple[str, str], int] = {}
            for ops in sets.values():
                if len(ops) < 2:
                    continue
                ordered = sorted(ops, key=self._rank)
                for i, a in enumerate(ordered):
                    for b in ordered[i + 1 :]:
                        counts[(a, b)] = counts.get((a, b), 0) + 1
            best = None
            for pair, n in counts.items():
                if n < 2:
                    continue
                cand = (-n, self._rank(pair[0]), self._rank(pair[1]))
                if best is None or cand < best[0]:
                    best = (cand, pair)
            if best is None:
                break
            a, b = best[1]
            key = f"({a}^{b})"
            self.pairs[key] = (a, b)
            for ops in sets.values():
                if a in ops and b in ops:
                    ops -= {a, b}
                    ops.add(key)
        self.plan = {f: sorted(ops, key=self._rank) for f, ops in sets.items()}

    def _key_gate(self, key: str) -> int:
        if key in self.gate_of:
            return self.gate_of[key]
        if key.startswith("v:"):
            gid = self.b.var(key[2:])
        elif key == "1":
            gid = self.b.const(1)
        elif key.startswith("("):
            a, c = self.pairs[key]
            gid = self.b.fn(XOR, self._key_gate(a), self._key_gate(c))
        else:
            kind, (i, body) = self.modal[key]
            gid = self.b.modal(kind, i, self._shared_form(body))
        self.gate_of[key] = gid
        return gid

    def _shared_form(self, f: LinearForm) -> int:
        ops = self.plan[f]
        if not ops:
            return self.b.const(0)
        acc = self._key_gate(ops[0])
        for key in ops[1:]:
            acc = self.b.fn(XOR, acc, self._key_gate(key))
        return acc

    def _tree_operand(self, op: tuple[str, object]) -> int:
        kind, val = op
        if kind == "var":
            return self.b.var(val)
        if kind == "one":
            return self.b.const(1)
        i, body = val
        return self.b.modal(kind, i, self._tree_form(body))

    def _tree_form(self, f: LinearForm) -> int:
        ops = [op for _, op in self.norm.operands(f, self.boxes)]
        if not ops:
            return self.b.const(0)
        acc = self._tree_operand(ops[0])
        for op in ops[1:]:
            acc = self.b.fn(XOR, acc, self._tree_operand(op))
        return acc

    def form(self, f: LinearForm) -> int:
        if not self.share:
            return self._tree_form(f)
        self._plan(f)
        return self._shared_form(f)


def normal_form(circuit: ModalCircuit, frame: str) -> tuple[LinearForm, _Normalizer]:
    norm = _Normalizer(frame)
    forms = norm.forms(circuit)
    return forms[circuit.out], norm


def xor_normalize(circuit: ModalCircuit, frame: str = "K", share: bool | None = None) -> ModalCircuit:
    """Canonical circuit for ``circuit``.

    Formula input gives formula output; circuits with shared gates are
    rebuilt with hash-consing and reuse of already-built xor chains.
    """
    form, norm = normal_form(circuit, frame)
    if share is None:
        share = not circuit.pruned().is_formula()
    if not share:
        return _emit(norm, form, circuit.k, False, True)
    # With sharing, the per-form box choice can duplicate diamonds that a
    # diamond-only spelling would reuse, so keep the smaller of the two.
    plain = _emit(norm, form, circuit.k, True, False)
    boxed = _emit(norm, form, circuit.k, True, True)
    return boxed if boxed.size < plain.size else plain


def _emit(norm: _Normalizer, form: LinearForm, k: int, share: bool, boxes: bool) -> ModalCircuit:
    em = _Emitter(norm, share, boxes)
    out = em.form(form)
    return em.b.build(out, k).pruned()


def xor_minimize(circuit: ModalCircuit, frame: str = "K") -> ModalCircuit:
    """Canonical circuit with shared xor chains, even for formula input."""
    return xor_normalize(circuit, frame, share=True)


def xor_sat(circuit: ModalCircuit, frame: str = "K") -> Verdict:
    form, _ = normal_form(circuit, frame)
    return sat_verdict(not form.is_const(0), "xor")


def canonical_key(circuit: ModalCircuit, frame: str = "K") -> str:
    """String that is equal for two circuits exactly when they are equivalent."""
    form, norm = normal_form(circuit, frame)
    return norm.form_key(form)


def equivalence_key(circuit: ModalCircuit, frame: str = "K") -> str:
    """Netlist of the minimized circuit; equal exactly for equivalent circuits."""
    return xor_minimize(circuit, frame).to_netlist()


def xor_equivalent(c1: ModalCircuit, c2: ModalCircuit, frame: str = "K") -> bool:
    return equivalence_key(c1, frame) == equivalence_key(c2, frame)


def is_xor_circuit(circuit: ModalCircuit) -> bool:
    return all(
        g.kind in (VAR, DIA, BOX) or (g.kind == FN and is_xor_base_function(g.fn)) for g in circuit.gates
    )
