"""Readers for the netlist and formula text formats."""

from __future__ import annotations

import re
from graphlib import CycleError, TopologicalSorter

from .boolfn import BUILTINS, Base, FunctionTable
from .circuit import CircuitBuilder, Gate, ModalCircuit, BOX, DIA, E, FN, VAR
from .errors import ParseError

_IDENT = r"[A-Za-z_][A-Za-z0-9_.']*"
_ID_RE = re.compile(rf"^{_IDENT}$|^[0-9]+$")


def _resolve(base: Base | None, name: str) -> FunctionTable | None:
    if base is not None:
        return base.lookup(name)
    return BUILTINS.get(name.lower())


def parse_netlist(text: str, base: Base | None = None, k: int | None = None) -> ModalCircuit:
    """Parse ``ID = RHS`` lines plus one ``OUTPUT ID`` line into a circuit.

    Right-hand sides: ``VAR x``, ``CONST 0|1``, ``DIA i ID``, ``BOX i ID``,
    ``E ID`` or ``FNAME ID ...``. Keywords are case-insensitive and
    definitions may appear in any order.
    """
    defs: dict[str, tuple[int, tuple]] = {}
    output: tuple[str, int] | None = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            parts = line.split()
            if parts[0].upper() == "OUTPUT":
                if len(parts) != 2:
                    raise ParseError("OUTPUT takes exactly one gate id", lineno)
                if output is not None:
                    raise ParseError("more than one OUTPUT line", lineno)
                output = (parts[1], lineno)
                continue
            raise ParseError("expected 'ID = ...' or 'OUTPUT ID'", lineno)
        lhs, rhs = (s.strip() for s in line.split("=", 1))
        if not _ID_RE.match(lhs):
            raise ParseError(f"bad gate id {lhs!r}", lineno, 1)
        if lhs in defs:
            raise ParseError(f"gate {lhs!r} defined twice", lineno, 1)
        toks = rhs.split()
        if not toks:
            raise ParseError(f"gate {lhs!r} has an empty definition", lineno)
        head = toks[0].upper()
        col = raw.find(toks[0]) + 1
        if head == "VAR":
            if len(toks) != 2:
                raise ParseError("VAR takes one variable name", lineno, col)
            node = (VAR, toks[1])
        elif head == "CONST":
            if len(toks) != 2 or toks[1] not in ("0", "1"):
                raise ParseError("CONST takes 0 or 1", lineno, col)
            node = (FN, BUILTINS["const1" if toks[1] == "1" else "const0"], ())
        elif head in ("DIA", "BOX"):
            if len(toks) != 3 or not toks[1].isdigit():
                raise ParseError(f"{head} takes a modality index and one gate id", lineno, col)
            node = (DIA if head == "DIA" else BOX, int(toks[1]), (toks[2],))
        elif head == "E":
            if len(toks) != 2:
                raise ParseError("E takes one gate id", lineno, col)
            node = (E, 0, (toks[1],))
        else:
            f = _resolve(base, toks[0])
            if f is None:
                raise ParseError(f"unknown function {toks[0]!r}", lineno, col)
            if len(toks) - 1 != f.arity:
                raise ParseError(
                    f"{f.name} has arity {f.arity} but is given {len(toks) - 1} inputs", lineno, col
                )
            node = (FN, f, tuple(toks[1:]))
        defs[lhs] = (lineno, node)
    if output is None:
        raise ParseError("missing OUTPUT line")
    if output[0] not in defs:
        raise ParseError(f"OUTPUT refers to undefined gate {output[0]!r}", output[1])

    graph: dict[str, tuple[str, ...]] = {}
    for gid, (lineno, node) in defs.items():
        args = node[2] if node[0] != VAR else ()
        for a in args:
            if a not in defs:
                raise ParseError(f"gate {gid!r} uses undefined gate {a!r}", lineno)
        graph[gid] = tuple(args)
    try:
        order = list(TopologicalSorter(graph).static_order())
    except CycleError as exc:
        cyc = exc.args[1]
        lines = sorted({defs[g][0] for g in cyc if g in defs})
        raise ParseError(f"cycle through gates {' -> '.join(cyc)}", lines[0] if lines else None) from None

    max_index = max((n[1] for _, n in defs.values() if n[0] in (BOX, DIA)), default=1)
    if k is not None:
        if max_index > k:
            bad = next(ln for ln, n in defs.values() if n[0] in (BOX, DIA) and n[1] > k)
            raise ParseError(f"modality index exceeds k={k}", bad)
        kk = k
    else:
        kk = max_index
    for ln, n in defs.values():
        if n[0] in (BOX, DIA) and n[1] < 1:
            raise ParseError("modality indices start at 1", ln)

    ids: dict[str, int] = {}
    gates: list[Gate] = []
    var_ids: dict[str, int] = {}
    for name in order:
        node = defs[name][1]
        if node[0] == VAR:
            if node[1] in var_ids:
                ids[name] = var_ids[node[1]]
                continue
            var_ids[node[1]] = len(gates)
            g = Gate(VAR, name=node[1])
        elif node[0] == FN:
            g = Gate(FN, tuple(ids[a] for a in node[2]), fn=node[1])
        else:
            g = Gate(node[0], (ids[node[2][0]],), index=node[1])
        ids[name] = len(gates)
        gates.append(g)
    return ModalCircuit(tuple(gates), ids[output[0]], kk).pruned()


# ---------------------------------------------------------------------------
# formulas

_TOKEN_RE = re.compile(rf"\s*(?:({_IDENT})|([0-9]+)|(\()|(\))|(,))")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    toks = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m or m.end() == pos:
            col = pos + 1 + (len(text[pos:]) - len(text[pos:].lstrip()))
            raise ParseError(f"unexpected character {text[col - 1]!r}", 1, col)
        kind = ("id", "num", "(", ")", ",")[m.lastindex - 1]
        toks.append((kind, m.group(m.lastindex), m.start(m.lastindex) + 1))
        pos = m.end()
    return toks


class _FormulaParser:
    def __init__(self, text: str, base: Base | None, share: bool):
        self.toks = _tokenize(text)
        self.pos = 0
        self.base = base
        self.b = CircuitBuilder(share=share)

    def peek(self):
        return self.toks[self.pos] if self.pos < len(self.toks) else ("eof", "", 0)

    def take(self, kind: str | None = None):
        tok = self.peek()
        if kind is not None and tok[0] != kind:
            what = "end of input" if tok[0] == "eof" else repr(tok[1])
            raise ParseError(f"expected {kind!r} but found {what}", 1, tok[2] or None)
        self.pos += 1
        return tok

    def formula(self) -> int:
        kind, val, col = self.peek()
        if kind == "num":
            self.take()
            if val not in ("0", "1"):
                raise ParseError(f"constant must be 0 or 1, got {val}", 1, col)
            return self.b.const(int(val))
        if kind == "(":
            self.take()
            inner = self.formula()
            self.take(")")
            return inner
        if kind != "id":
            what = "end of input" if kind == "eof" else repr(val)
            raise ParseError(f"expected a formula but found {what}", 1, col or None)
        self.take()
        low = val.lower()
        if low in ("box", "dia") and self.peek()[0] == "num":
            idx = int(self.take()[1])
            if idx < 1:
                raise ParseError("modality indices start at 1", 1, col)
            sub = self.formula()
            return self.b.box(idx, sub) if low == "box" else self.b.dia(idx, sub)
        if self.peek()[0] == "(":
            self.take()
            args = []
            if self.peek()[0] != ")":
                args.append(self.formula())
                while self.peek()[0] == ",":
                    self.take()
                    args.append(self.formula())
            self.take(")")
            if val == "E":
                if len(args) != 1:
                    raise ParseError("E takes one argument", 1, col)
                return self.b.E(args[0])
            f = _resolve(self.base, val)
            if f is None:
                raise ParseError(f"unknown function {val!r}", 1, col)
            if len(args) != f.arity:
                raise ParseError(f"{f.name} has arity {f.arity} but is given {len(args)} arguments", 1, col)
            return self.b.fn(f, *args)
        if low in ("box", "dia"):
            raise ParseError(f"{low} needs a modality index", 1, col)
        return self.b.var(val)


def parse_formula(text: str, base: Base | None = None, k: int | None = None, share: bool = False) -> ModalCircuit:
    """Parse ``box n φ | dia n φ | NAME(φ, ...) | E(φ) | VAR | 0 | 1 | (φ)``.

    The result is a tree unless ``share`` asks for hash-consing.
    """
    p = _FormulaParser(text, base, share)
    if not p.toks:
        raise ParseError("empty formula", 1, 1)
    out = p.formula()
    if p.peek()[0] != "eof":
        raise ParseError(f"trailing input {p.peek()[1]!r}", 1, p.peek()[2])
    if k is not None and p.b.max_index > k:
        raise ParseError(f"modality index exceeds k={k}", 1)
    return p.b.build(out, k)


def parse_circuit(text: str, base: Base | None = None, k: int | None = None) -> ModalCircuit:
    """Netlist if the text contains an OUTPUT line, formula otherwise."""
    if re.search(r"(?im)^\s*OUTPUT\b", text):
        return parse_netlist(text, base, k)
    body = "\n".join(line.split("#", 1)[0] for line in text.splitlines())
    return parse_formula(" ".join(body.split()), base, k)
