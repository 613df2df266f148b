"""Boolean functions as truth tables, clone closures and clone profiles.

Truth tables index rows with argument 1 as the most significant bit, so
``bits[i]`` is the value on the assignment whose binary expansion is ``i``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import ArityError, NotInCloneError, ParseError, ResourceError, SearchExhaustedError

MAX_CLOSURE_ARITY = 4
# element-operations allowed for one numpy composition round
_CLOSURE_WORK_BUDGET = 400_000_000


@dataclass(frozen=True)
class FunctionTable:
    name: str
    arity: int
    bits: tuple[int, ...]

    def __post_init__(self):
        if self.arity < 0:
            raise ArityError(f"{self.name}: negative arity")
        if len(self.bits) != 1 << self.arity:
            raise ArityError(
                f"{self.name}: expected {1 << self.arity} table bits for arity {self.arity}, got {len(self.bits)}"
            )
        if any(b not in (0, 1) for b in self.bits):
            raise ValueError(f"{self.name}: table bits must be 0 or 1")

    @classmethod
    def from_string(cls, name: str, bits: str) -> FunctionTable:
        n = len(bits)
        arity = n.bit_length() - 1
        if n == 0 or 1 << arity != n:
            raise ArityError(f"{name}: table length {n} is not a power of two")
        return cls(name, arity, tuple(int(c) for c in bits))

    @classmethod
    def from_callable(cls, name: str, arity: int, fn) -> FunctionTable:
        rows = itertools.product((0, 1), repeat=arity)
        return cls(name, arity, tuple(int(bool(fn(*row))) for row in rows))

    @cached_property
    def mask(self) -> int:
        """Table packed into an int, bit ``i`` holding ``bits[i]``."""
        return sum(b << i for i, b in enumerate(self.bits))

    @property
    def bitstring(self) -> str:
        return "".join(map(str, self.bits))

    def __call__(self, *args: int) -> int:
        return eval_fn(self, args)

    def __repr__(self):
        return f"FunctionTable({self.name}/{self.arity}={self.bitstring})"

    def dual(self, name: str | None = None) -> FunctionTable:
        """``dual f(x1..xn) = not f(not x1 .. not xn)``; row ``i`` maps to row ``2^n-1-i``."""
        n = len(self.bits)
        bits = tuple(1 - self.bits[n - 1 - i] for i in range(n))
        return FunctionTable(name or dual_name(self.name), self.arity, bits)

    def same_table(self, other: FunctionTable) -> bool:
        return self.arity == other.arity and self.bits == other.bits


def eval_fn(f: FunctionTable, args: Sequence[int]) -> int:
    if len(args) != f.arity:
        raise ArityError(f"{f.name} expects {f.arity} arguments, got {len(args)}")
    idx = 0
    for a in args:
        idx = (idx << 1) | (1 if a else 0)
    return f.bits[idx]


AND = FunctionTable("and", 2, (0, 0, 0, 1))
OR = FunctionTable("or", 2, (0, 1, 1, 1))
NOT = FunctionTable("not", 1, (1, 0))
XOR = FunctionTable("xor", 2, (0, 1, 1, 0))
CONST0 = FunctionTable("const0", 0, (0,))
CONST1 = FunctionTable("const1", 0, (1,))
BUILTINS: dict[str, FunctionTable] = {f.name: f for f in (AND, OR, NOT, XOR, CONST0, CONST1)}
BUILTIN_ALIASES = {"0": "const0", "1": "const1", "false": "const0", "true": "const1"}

# generators of the clones the classification refers to
AND_NOT_Y = FunctionTable.from_callable("andnot", 2, lambda x, y: x and not y)
S11_GEN = FunctionTable.from_callable("and_or", 3, lambda x, y, z: x and (y or z))
XNOR = FunctionTable.from_callable("xnor", 2, lambda x, y: x == y)
D_GEN = FunctionTable.from_callable(
    "dmaj", 3, lambda x, y, z: (x and not y) or (x and not z) or (not y and not z)
)

_DUAL_NAMES = {"and": "or", "or": "and", "const0": "const1", "const1": "const0", "not": "not"}


def dual_name(name: str) -> str:
    if name in _DUAL_NAMES:
        return _DUAL_NAMES[name]
    if name.startswith("dual_"):
        return name[5:]
    return "dual_" + name


def dual_function(f: FunctionTable) -> FunctionTable:
    """Dual table, reusing builtin names when the dual is a builtin."""
    d = f.dual()
    for b in BUILTINS.values():
        if b.same_table(d):
            return b
    if f.dual().same_table(f):
        return f
    return d


# ---------------------------------------------------------------------------
# per-function properties


@dataclass(frozen=True)
class FunctionProperties:
    reproduces0: bool
    reproduces1: bool
    monotone: bool
    self_dual: bool
    affine: bool
    essentially_unary: bool
    is_or_with_constants: bool
    is_and_with_constants: bool


def _arg_bit(row: int, j: int, arity: int) -> int:
    return (row >> (arity - 1 - j)) & 1


def essential_args(f: FunctionTable) -> tuple[int, ...]:
    n = f.arity
    out = []
    for j in range(n):
        flip = 1 << (n - 1 - j)
        if any(f.bits[r] != f.bits[r ^ flip] for r in range(1 << n)):
            out.append(j)
    return tuple(out)


def affine_form(f: FunctionTable) -> tuple[int, tuple[int, ...]] | None:
    """Return ``(c, S)`` with ``f = c xor XOR_{j in S} x_j``, or None if f is not affine."""
    n = f.arity
    c = f.bits[0]
    coefs = tuple(j for j in range(n) if f.bits[1 << (n - 1 - j)] ^ c)
    for r in range(1 << n):
        v = c
        for j in coefs:
            v ^= _arg_bit(r, j, n)
        if v != f.bits[r]:
            return None
    return c, coefs


def constant_value(f: FunctionTable) -> int | None:
    if all(b == f.bits[0] for b in f.bits):
        return f.bits[0]
    return None


def property_profile(f: FunctionTable) -> FunctionProperties:
    n = f.arity
    size = 1 << n
    bits = f.bits
    monotone = all(
        bits[r] <= bits[r | (1 << j)] for r in range(size) for j in range(n) if not r & (1 << j)
    )
    self_dual = all(bits[r] != bits[size - 1 - r] for r in range(size))
    ess = essential_args(f)
    if not ess:
        is_or = is_and = True
    else:
        is_or = all(bits[r] == max(_arg_bit(r, j, n) for j in ess) for r in range(size))
        is_and = all(bits[r] == min(_arg_bit(r, j, n) for j in ess) for r in range(size))
    return FunctionProperties(
        reproduces0=bits[0] == 0,
        reproduces1=bits[-1] == 1,
        monotone=monotone,
        self_dual=self_dual,
        affine=affine_form(f) is not None,
        essentially_unary=len(ess) <= 1,
        is_or_with_constants=is_or,
        is_and_with_constants=is_and,
    )


# ---------------------------------------------------------------------------
# bases


@dataclass(frozen=True)
class Base:
    functions: tuple[FunctionTable, ...] = ()

    def __post_init__(self):
        names = [f.name for f in self.functions]
        if any(not n for n in names):
            raise ValueError("function names must be non-empty")
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate function names in base: {names}")

    @classmethod
    def of(cls, *functions: FunctionTable) -> Base:
        return cls(tuple(functions))

    @classmethod
    def from_names(cls, *names: str) -> Base:
        """Base of builtin functions; ``0`` and ``1`` name the constants."""
        if len(names) == 1 and not isinstance(names[0], str):
            names = tuple(names[0])
        fs = []
        for n in names:
            key = BUILTIN_ALIASES.get(n.lower(), n.lower())
            if key not in BUILTINS:
                raise KeyError(f"unknown builtin function {n!r}")
            fs.append(BUILTINS[key])
        return cls(tuple(fs))

    def __iter__(self) -> Iterator[FunctionTable]:
        return iter(self.functions)

    def __len__(self):
        return len(self.functions)

    def __contains__(self, f):
        return any(g == f for g in self.functions)

    def lookup(self, name: str) -> FunctionTable | None:
        """Resolve a name against this base, then the builtins (case-insensitive)."""
        for f in self.functions:
            if f.name == name:
                return f
        low = name.lower()
        for f in self.functions:
            if f.name.lower() == low:
                return f
        return BUILTINS.get(low)

    def union(self, *more: FunctionTable) -> Base:
        fs = list(self.functions)
        for f in more:
            if not any(g.same_table(f) and g.arity == f.arity for g in fs):
                name = f.name
                while any(g.name == name for g in fs):
                    name += "_"
                fs.append(f if name == f.name else FunctionTable(name, f.arity, f.bits))
        return Base(tuple(fs))

    def dual(self) -> Base:
        out: list[FunctionTable] = []
        for f in self.functions:
            d = dual_function(f)
            if not any(g == d for g in out):
                if any(g.name == d.name for g in out):
                    d = FunctionTable(d.name + "_", d.arity, d.bits)
                out.append(d)
        return Base(tuple(out))

    def to_text(self) -> str:
        return "".join(f"{f.name} {f.arity} {f.bitstring}\n" for f in self.functions)


def parse_base(text: str) -> Base:
    """Parse the base file format: ``NAME ARITY BITS`` per line, or a bare builtin name."""
    fs: list[FunctionTable] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) == 1:
            f = BUILTINS.get(parts[0].lower())
            if f is None:
                raise ParseError(f"unknown builtin function {parts[0]!r}", lineno, 1)
        elif len(parts) == 3:
            name, arity_s, bits = parts
            if not arity_s.isdigit():
                raise ParseError(f"arity must be a natural number, got {arity_s!r}", lineno)
            if set(bits) - {"0", "1"}:
                raise ParseError(f"table bits must be 0/1, got {bits!r}", lineno)
            arity = int(arity_s)
            if len(bits) != 1 << arity:
                raise ParseError(
                    f"{name}: arity {arity} needs {1 << arity} bits, got {len(bits)}", lineno
                )
            f = FunctionTable(name, arity, tuple(int(c) for c in bits))
        else:
            raise ParseError("expected 'NAME ARITY BITS' or a builtin name", lineno)
        if any(g.name == f.name for g in fs):
            raise ParseError(f"duplicate function name {f.name!r}", lineno)
        fs.append(f)
    return Base(tuple(fs))


# ---------------------------------------------------------------------------
# clone closure


def _dtype_for(n: int):
    return np.uint8 if n <= 3 else np.uint16


def _projection_masks(n: int) -> list[int]:
    rows = 1 << n
    return [sum(((r >> (n - 1 - j)) & 1) << r for r in range(rows)) for j in range(n)]


def _compose(f: FunctionTable, arrays: Sequence[np.ndarray], full: int) -> np.ndarray:
    """Apply f row-wise to broadcastable arrays of packed tables."""
    m = f.arity
    shape = np.broadcast_shapes(*(a.shape for a in arrays))
    dtype = arrays[0].dtype
    fullv = dtype.type(full)
    out = np.zeros(shape, dtype=dtype)
    neg = [fullv & ~a for a in arrays]
    for p in range(1 << m):
        if not f.bits[p]:
            continue
        term = np.full(shape, fullv, dtype=dtype)
        for j in range(m):
            term &= arrays[j] if (p >> (m - 1 - j)) & 1 else neg[j]
        out |= term
    return out


def _closure(base: Iterable[FunctionTable], n: int, target: int | None = None) -> set[int]:
    if n < 0 or n > MAX_CLOSURE_ARITY:
        raise ResourceError(f"closure arity {n} outside 0..{MAX_CLOSURE_ARITY}")
    fs = list(base)
    rows = 1 << n
    full = (1 << rows) - 1
    dtype = _dtype_for(n)
    start = set(_projection_masks(n))
    for f in fs:
        if f.arity == 0:
            start.add(full if f.bits[0] else 0)
    known = set(start)
    if target is not None and target in known:
        return known
    if _generates_everything(fs) and n > 0:
        return set(range(full + 1))
    frontier = np.array(sorted(start), dtype=dtype)
    old = np.array([], dtype=dtype)
    funcs = [f for f in fs if f.arity > 0]
    while frontier.size:
        allv = np.concatenate([old, frontier])
        produced = []
        for f in funcs:
            m = f.arity
            for p in range(m):
                parts = []
                for j in range(m):
                    src = old if j < p else (frontier if j == p else allv)
                    shape = [1] * m
                    shape[j] = src.size
                    parts.append(src.reshape(shape))
                work = int(np.prod([x.size for x in parts])) * max(1, sum(f.bits))
                if work == 0:
                    continue
                if work > _CLOSURE_WORK_BUDGET:
                    raise ResourceError(f"closure of arity {n} too large to enumerate")
                produced.append(np.unique(_compose(f, parts, full)))
        if not produced:
            break
        cand = np.unique(np.concatenate(produced))
        new = [int(v) for v in cand if int(v) not in known]
        known.update(new)
        if target is not None and target in known:
            return known
        old = allv
        frontier = np.array(sorted(new), dtype=dtype)
    return known


def _generates_everything(fs: Sequence[FunctionTable]) -> bool:
    """Post's completeness criterion: outside R0, R1, M, D and L."""
    if not fs:
        return False
    props = [property_profile(f) for f in fs]
    return not (
        all(p.reproduces0 for p in props)
        or all(p.reproduces1 for p in props)
        or all(p.monotone for p in props)
        or all(p.self_dual for p in props)
        or all(p.affine for p in props)
    )


def nary_closure(base: Iterable[FunctionTable], n: int) -> set[FunctionTable]:
    """The ``n``-ary fragment of the clone generated by ``base``."""
    masks = _closure(tuple(base), n)
    rows = 1 << n
    return {
        FunctionTable(f"f{n}_{m:0{max(1, rows // 4)}x}", n, tuple((m >> r) & 1 for r in range(rows)))
        for m in sorted(masks)
    }


@lru_cache(maxsize=4096)
def _contains_cached(fs: tuple[FunctionTable, ...], arity: int, mask: int) -> bool:
    return mask in _closure(fs, arity, target=mask)


def clone_contains(base: Iterable[FunctionTable], f: FunctionTable) -> bool:
    """Membership of ``f`` in the clone generated by ``base``.

    Constants (0-ary tables) are tested as unary constant functions, which is
    how a clone contains them.
    """
    fs = tuple(base)
    if f.arity == 0:
        f = FunctionTable(f.name, 1, (f.bits[0], f.bits[0]))
    return _contains_cached(fs, f.arity, f.mask)


# ---------------------------------------------------------------------------
# clone profiles

NAMED_BASES: dict[str, tuple[FunctionTable, ...]] = {
    "BF": (AND, NOT),
    "S1": (AND_NOT_Y,),
    "M": (OR, AND, CONST0, CONST1),
    "S11": (S11_GEN, CONST0),
    "R1": (OR, XNOR),
    "D": (D_GEN,),
    "L": (XOR, CONST1),
    "V": (OR, CONST0, CONST1),
    "V0": (OR, CONST0),
    "V2": (OR,),
    "E": (AND, CONST0, CONST1),
    "E0": (AND, CONST0),
    "E2": (AND,),
    "N": (NOT, CONST1),
    "I": (CONST0, CONST1),
}


@dataclass(frozen=True)
class CloneProfile:
    in_R0: bool
    in_R1: bool
    in_D: bool
    in_M: bool
    in_L: bool
    in_V: bool
    in_E: bool
    in_N: bool
    S1_sub: bool
    S11_sub: bool
    E0_sub: bool
    V0_sub: bool
    named_clone: str | None = None
    function_props: tuple[FunctionProperties, ...] = field(default=(), repr=False, compare=False)


def _generates(base: tuple[FunctionTable, ...], gens: Iterable[FunctionTable]) -> bool:
    return all(clone_contains(base, g) for g in gens)


def identify_clone(base: Iterable[FunctionTable]) -> str | None:
    """Name of the listed clone equal to ``[base]``, if any."""
    fs = tuple(base)
    if any(f.arity > 3 for f in fs):
        return None
    for name, gens in NAMED_BASES.items():
        if _generates(gens, fs) and _generates(fs, gens):
            return name
    return None


def clone_profile(base: Iterable[FunctionTable]) -> CloneProfile:
    fs = tuple(base)
    if any(f.arity > MAX_CLOSURE_ARITY for f in fs):
        raise ResourceError(f"clone analysis supports arities up to {MAX_CLOSURE_ARITY}")
    props = tuple(property_profile(f) for f in fs)
    return CloneProfile(
        in_R0=all(p.reproduces0 for p in props),
        in_R1=all(p.reproduces1 for p in props),
        in_D=all(p.self_dual for p in props),
        in_M=all(p.monotone for p in props),
        in_L=all(p.affine for p in props),
        in_V=all(p.is_or_with_constants for p in props),
        in_E=all(p.is_and_with_constants for p in props),
        in_N=all(p.essentially_unary for p in props),
        S1_sub=clone_contains(fs, AND_NOT_Y),
        S11_sub=_generates(fs, NAMED_BASES["S11"]),
        E0_sub=_generates(fs, NAMED_BASES["E0"]),
        V0_sub=_generates(fs, NAMED_BASES["V0"]),
        named_clone=identify_clone(fs),
        function_props=props,
    )


# ---------------------------------------------------------------------------
# short implementations


@dataclass(frozen=True)
class BFormula:
    """A propositional formula over a base: a variable index or an application."""

    fn: FunctionTable | None = None
    args: tuple[BFormula, ...] = ()
    var: int | None = None

    def __post_init__(self):
        if self.fn is None:
            if self.var is None or self.args:
                raise ValueError("a leaf needs a variable index and no arguments")
        elif len(self.args) != self.fn.arity:
            raise ArityError(f"{self.fn.name} applied to {len(self.args)} arguments")

    @classmethod
    def variable(cls, j: int) -> BFormula:
        return cls(var=j)

    def evaluate(self, assignment: Sequence[int]) -> int:
        if self.fn is None:
            return assignment[self.var]
        return eval_fn(self.fn, [a.evaluate(assignment) for a in self.args])

    def table(self, n: int) -> tuple[int, ...]:
        return tuple(self.evaluate(row) for row in itertools.product((0, 1), repeat=n))

    def occurrences(self) -> dict[int, int]:
        if self.fn is None:
            return {self.var: 1}
        counts: dict[int, int] = {}
        for a in self.args:
            for v, c in a.occurrences().items():
                counts[v] = counts.get(v, 0) + c
        return counts

    def size(self) -> int:
        return 1 + sum(a.size() for a in self.args)

    def depth(self) -> int:
        return 0 if not self.args else 1 + max(a.depth() for a in self.args)

    def functions(self) -> set[FunctionTable]:
        out = set() if self.fn is None else {self.fn}
        for a in self.args:
            out |= a.functions()
        return out

    def __str__(self):
        if self.fn is None:
            return f"x{self.var + 1}"
        if not self.args:
            return self.fn.name
        return f"{self.fn.name}({', '.join(map(str, self.args))})"


def find_implementation(
    base: Iterable[FunctionTable],
    target: FunctionTable,
    each_var_once: bool | Iterable[int] = False,
    depth_cap: int = 6,
) -> BFormula:
    """Shallowest base formula computing ``target`` (iterative deepening).

    With ``each_var_once`` every argument of ``target`` occurs exactly once;
    constants from the base may repeat. Passing a collection of argument
    indices restricts the requirement to those arguments.
    """
    fs = tuple(base)
    n = target.arity
    if n > 3:
        raise ResourceError("implementation search supports targets of arity <= 3")
    if not clone_contains(fs, target):
        raise NotInCloneError(f"{target.name} is not in the clone generated by {[f.name for f in fs]}")
    rows = 1 << n
    want = target.mask
    if each_var_once is True:
        once_mask = (1 << n) - 1
    elif each_var_once is False:
        once_mask = 0
    else:
        once_mask = sum(1 << j for j in set(each_var_once))
    all_used = once_mask

    found: dict[tuple[int, int], BFormula] = {}
    layers: list[list[tuple[int, int]]] = []
    layer0: list[tuple[int, int]] = []
    for j, m in enumerate(_projection_masks(n)):
        key = (m, (1 << j) & once_mask)
        if key not in found:
            found[key] = BFormula.variable(j)
            layer0.append(key)
    full = (1 << rows) - 1
    for f in fs:
        if f.arity == 0:
            key = (full if f.bits[0] else 0, 0)
            if key not in found:
                found[key] = BFormula(f, ())
                layer0.append(key)
    layers.append(layer0)
    if (want, all_used) in found:
        return found[(want, all_used)]

    funcs = [f for f in fs if f.arity > 0]
    for depth in range(1, depth_cap + 1):
        older = [k for layer in layers[:-1] for k in layer]
        newest = layers[-1]
        every = older + newest
        layer: list[tuple[int, int]] = []
        for f in funcs:
            m = f.arity
            for p in range(m):
                pools = [older if j < p else (newest if j == p else every) for j in range(m)]
                for combo in itertools.product(*pools):
                    used = 0
                    ok = True
                    for _, u in combo:
                        if used & u:
                            ok = False
                            break
                        used |= u
                    if not ok:
                        continue
                    val = 0
                    for r in range(rows):
                        idx = 0
                        for tm, _ in combo:
                            idx = (idx << 1) | ((tm >> r) & 1)
                        val |= f.bits[idx] << r
                    key = (val, used)
                    if key in found:
                        continue
                    found[key] = BFormula(f, tuple(found[c] for c in combo))
                    if key == (want, all_used):
                        return found[key]
                    layer.append(key)
        if not layer:
            break
        layers.append(layer)
    raise SearchExhaustedError(
        f"no implementation of {target.name} within depth {depth_cap}"
        + (" with the requested single occurrences" if once_mask else "")
    )
