"""Exhaustive checks on tiny instances, shared by ``modsat selftest`` and the test suite.

Each suite enumerates every instance inside a small bound and compares an
algorithm against the brute-force oracle. Semantic equivalence classes of
large enumerations are computed exactly but with amortized cost: two terms
built by the same operator from equivalent arguments are equivalent
(congruence), terms whose values differ on some fixed test model are
inequivalent, and every remaining question goes to the oracle.
"""

from __future__ import annotations

import random
import time
from collections.abc import Callable, Iterable, Sequence
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .boolfn import AND, CONST0, CONST1, D_GEN, NOT, OR, XNOR, XOR, FunctionTable
from .circuit import BOX, DIA, FN, VAR, ModalCircuit
from .generate import TermEnumerator
from .kripke import brute_force_sat, check_frame, oracle_equivalent
from .polysolve import ENGINES, applicable
from .verdict import SAT, UNKNOWN


@dataclass
class SuiteResult:
    name: str
    checked: int = 0
    agreed: int = 0
    inconclusive: int = 0
    failures: list[str] = field(default_factory=list)
    seconds: float = 0.0
    detail: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return not self.failures and self.checked > 0

    def fail(self, msg: str, limit: int = 20) -> None:
        if len(self.failures) < limit:
            self.failures.append(msg)
        else:
            self.failures[-1] = f"... and more ({msg})"

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        extra = f", {self.inconclusive} inconclusive" if self.inconclusive else ""
        return f"{status} {self.name}: {self.agreed}/{self.checked} agree{extra} ({self.seconds:.1f}s)"

    def to_dict(self) -> dict:
        return {
            "suite": self.name,
            "passed": self.passed,
            "checked": self.checked,
            "agreed": self.agreed,
            "inconclusive": self.inconclusive,
            "failures": self.failures,
            "seconds": round(self.seconds, 3),
            **self.detail,
        }


# ---------------------------------------------------------------------------
# engine families: the functions each specialised procedure accepts

ENGINE_FAMILIES: dict[str, list[tuple[tuple[FunctionTable, ...], tuple[str, ...], tuple[str, ...]]]] = {
    # (functions, frames, modal kinds)
    "r1/d": [
        ((AND, OR, XNOR, CONST1), ("K", "KD", "T", "S4", "S5", "K4"), (BOX, DIA)),
        ((D_GEN, NOT), ("K", "KD", "T", "S4", "S5", "K4"), (BOX, DIA)),
    ],
    "monotone-serial": [((AND, OR, CONST0, CONST1), ("KD", "T", "S4", "S5"), (BOX, DIA))],
    "unary-chain": [((NOT, CONST0, CONST1), ("K", "KD", "T", "S4", "S5", "K4"), (BOX, DIA))],
    "or-recursion": [((OR, CONST0, CONST1), ("K", "KD", "T", "S4", "S5", "K4"), (BOX, DIA))],
    "and-recursion": [((AND, CONST0, CONST1), ("K",), (BOX, DIA))],
    "single-op-monotone": [
        ((AND, OR, CONST0, CONST1), ("K", "K4"), (DIA,)),
        ((AND, OR, CONST0, CONST1), ("K", "K4"), (BOX,)),
    ],
    "xor": [((XOR, CONST0, CONST1), ("K", "KD"), (BOX, DIA))],
}


def family_circuits(
    functions: Sequence[FunctionTable],
    modal_kinds: Sequence[str],
    max_size: int,
    variables: Sequence[str] = ("x", "y"),
    k_values: Iterable[int] = (1, 2),
    max_md: int = 2,
) -> list[ModalCircuit]:
    """All formulas up to ``max_size`` tree nodes over the family, for each k."""
    out = []
    for k in k_values:
        en = TermEnumerator(functions, variables, k, max_md, modal_kinds, "tree")
        for t in en.generate(max_size):
            c = en.circuit(t.id)
            if k == 1 or 2 in c.indices_used:  # k = 2 adds only circuits that use index 2
                out.append(c)
    return out


def _compare_sat(res: SuiteResult, label: str, c: ModalCircuit, frame: str, answer: str, witness_ok: bool | None):
    res.checked += 1
    oracle = brute_force_sat(c, frame)
    if oracle.answer == UNKNOWN:
        res.inconclusive += 1
        return
    if answer == oracle.answer and witness_ok is not False:
        res.agreed += 1
    else:
        res.fail(f"{label} {frame}: got {answer}, oracle {oracle.answer} (witness ok={witness_ok}) on {c.to_formula()}")


def engine_suite(max_size: int = 4, engines: Iterable[str] | None = None) -> list[SuiteResult]:
    """Each specialised engine against the oracle on every formula of its family."""
    from .kripke import frame_in_class, holds

    results = []
    for name in engines or ENGINE_FAMILIES:
        res = SuiteResult(f"engine {name}")
        t0 = time.perf_counter()
        for functions, frames, kinds in ENGINE_FAMILIES[name]:
            for c in family_circuits(functions, kinds, max_size):
                for frame in frames:
                    if not applicable(name, c, frame):
                        continue
                    v = ENGINES[name](c, frame)
                    wok = None
                    if v.witness is not None:
                        wok = frame_in_class(v.witness, frame) and holds(v.witness, None, c)
                    _compare_sat(res, name, c, frame, v.answer, wok)
        res.seconds = time.perf_counter() - t0
        results.append(res)
    return results


def tableau_suite(max_size: int = 5, frames: Sequence[str] = ("K", "KD")) -> SuiteResult:
    """ksat_tableau against the oracle on every {and, not, box} formula."""
    from .kripke import frame_in_class, holds
    from .reductions import eliminate_dia
    from .tableau import ksat_tableau

    res = SuiteResult("tableau")
    t0 = time.perf_counter()
    for c in family_circuits((AND, NOT), (BOX,), max_size) + family_circuits((AND, NOT, CONST1), (DIA,), max_size - 1):
        phi = eliminate_dia(c)
        for frame in frames:
            v = ksat_tableau(phi, frame)
            wok = None
            if v.witness is not None:
                wok = frame_in_class(v.witness, frame) and holds(v.witness, None, c)
            _compare_sat(res, "tableau", c, frame, v.answer, wok)
    res.seconds = time.perf_counter() - t0
    return res


# ---------------------------------------------------------------------------
# semantic classes of a whole enumeration


def _test_models(frame: str, n_models: int, k: int, names: Sequence[str], rng: np.random.Generator):
    """Disjoint union of random small models; returns CSR arrays, valuation and roots."""
    sizes = rng.integers(1, 5, n_models)
    offsets = np.concatenate([[0], np.cumsum(sizes)])
    n = int(offsets[-1])
    rels: list[list[tuple[int, int]]] = [[] for _ in range(k)]
    for m in range(n_models):
        lo, size = int(offsets[m]), int(sizes[m])
        density = rng.uniform(0.15, 0.8)
        for i in range(k):
            mat = rng.random((size, size)) < density
            if frame != "K":
                for u in range(size):
                    if not mat[u].any():
                        mat[u, rng.integers(size)] = True
            us, vs = np.nonzero(mat)
            rels[i].extend(zip((us + lo).tolist(), (vs + lo).tolist()))
    ptr, dst = _kernels.build_csr(n, [np.array(r, np.int64).reshape(-1, 2) for r in rels])
    val = (rng.random((len(names), n)) < 0.5).astype(np.uint8)
    return ptr, dst, val, n, offsets[:-1]


def fingerprints(
    pool: ModalCircuit, frame: str, n_models: int = 2048, seed: int = 7, chunk: int = 128
) -> list[bytes]:
    """Values of every gate at the roots of a fixed family of random models.

    Only K and KD are supported; other frames would need closure operations
    on the random relations.
    """
    if frame not in ("K", "KD"):
        raise ValueError("fingerprints are generated for K and KD only")
    rng = np.random.default_rng(seed)
    cc = _kernels.compile_circuit(pool)
    parts = []
    for start in range(0, n_models, chunk):
        m = min(chunk, n_models - start)
        ptr, dst, val, n, roots = _test_models(frame, m, pool.k, pool.variables, rng)
        values = _kernels.evaluate_compiled(cc, val, ptr, dst, n)
        parts.append(values[:, roots])
    bits = np.packbits(np.concatenate(parts, axis=1), axis=1)
    return [row.tobytes() for row in bits]


@dataclass
class SemanticClasses:
    cls: list[int]
    reps: list[int]
    oracle_calls: int = 0
    congruence_hits: int = 0
    inconclusive: int = 0


def _is_linear(f: FunctionTable) -> bool:
    return f.arity == 0 or (f.arity == 2 and f.bits == XOR.bits)


def semantic_classes(
    en: TermEnumerator,
    ids: Sequence[int],
    frame: str,
    n_models: int = 2048,
    seed: int = 7,
    progress: Callable[[int], None] | None = None,
) -> SemanticClasses:
    """Exact equivalence classes of the enumerated terms under ``frame``.

    ``ids`` must be closed under subterms and listed children first. Each
    class carries a GF(2) linear form over atoms (variables and classes that
    are not xor combinations), so equalities that follow from Boolean xor
    algebra alone are found without the oracle.
    """
    frame = check_frame(frame)
    pool = en.pool_circuit()
    fps = fingerprints(pool, frame, n_models, seed)
    cls: dict[int, int] = {}
    reps: list[int] = []
    forms: list[tuple] = []
    by_fp: dict[bytes, list[int]] = {}
    by_sig: dict[tuple, int] = {}
    out = SemanticClasses([], reps)
    for n, t in enumerate(ids):
        term = en.terms[t]
        if term.kind == VAR:
            sig = ("lin", 0, frozenset({("var", term.label)}))
        elif term.kind == FN and _is_linear(term.label):
            if term.label.arity == 0:
                sig = ("lin", term.label.bits[0], frozenset())
            else:
                (_, c1, a1), (_, c2, a2) = (forms[cls[a]] for a in term.args)
                sig = ("lin", c1 ^ c2, a1 ^ a2)
        else:
            label = term.label if term.kind != FN else (term.label.name, term.label.bits)
            arg_cls = tuple(cls[a] for a in term.args)
            if term.kind == FN and len(arg_cls) == 2 and term.label.bits[1] == term.label.bits[2]:
                arg_cls = tuple(sorted(arg_cls))
            sig = (term.kind, label, arg_cls)
        hit = by_sig.get(sig)
        if hit is not None:
            cls[t] = hit
            out.congruence_hits += 1
            continue
        found = None
        for c in by_fp.get(fps[t], ()):
            out.oracle_calls += 1
            verdict = oracle_equivalent(en.circuit(t), en.circuit(reps[c]), frame)
            if verdict == "EQUIVALENT":
                found = c
                break
            if verdict == "UNKNOWN":
                out.inconclusive += 1
        if found is None:
            found = len(reps)
            reps.append(t)
            forms.append(sig if sig[0] == "lin" else ("lin", 0, frozenset({("cls", found)})))
            by_sig[forms[found]] = found
            by_fp.setdefault(fps[t], []).append(found)
        cls[t] = found
        by_sig[sig] = found
        if progress and n % 50_000 == 0:
            progress(n)
    out.cls = [cls[t] for t in ids]
    return out


def xor_completeness_suite(
    max_gates: int = 5,
    frames: Sequence[str] = ("K", "KD"),
    k: int = 2,
    variables: Sequence[str] = ("x", "y"),
    max_md: int = 2,
) -> SuiteResult:
    """xor_equivalent agrees with oracle equivalence over every small xor circuit.

    Each circuit's equivalence key (the netlist that xor_equivalent compares)
    is matched against its exact semantic class.
    """
    from .xorsat import equivalence_key

    res = SuiteResult(f"xor canonical completeness (<= {max_gates} gates)")
    t0 = time.perf_counter()
    en = TermEnumerator((XOR, CONST0, CONST1), variables, k, max_md, (BOX, DIA), "dag")
    terms = en.generate(max_gates)
    ids = [t.id for t in terms]
    circuits = None
    for frame in frames:
        sem = semantic_classes(en, list(range(len(en.terms))), frame)
        sem_of = dict(zip(range(len(en.terms)), sem.cls))
        if circuits is None:
            circuits = {t: en.circuit(t) for t in ids}
        key_to_sem: dict[str, int] = {}
        sem_to_key: dict[int, str] = {}
        for t in ids:
            key = equivalence_key(circuits[t], frame)
            s = sem_of[t]
            res.checked += 1
            ok = True
            if key_to_sem.setdefault(key, s) != s:
                ok = False
                res.fail(f"{frame}: same canonical form, inequivalent: {circuits[t].to_formula()} vs {circuits[en.terms[sem.reps[key_to_sem[key]]].id].to_formula()}")
            if sem_to_key.setdefault(s, key) != key:
                ok = False
                res.fail(f"{frame}: equivalent, different canonical forms: {circuits[t].to_formula()}")
            res.agreed += ok
        res.inconclusive += sem.inconclusive
        res.detail[f"{frame}_classes"] = len(sem_to_key)
        res.detail[f"{frame}_oracle_calls"] = sem.oracle_calls
    res.detail["circuits"] = len(ids)
    res.seconds = time.perf_counter() - t0
    return res


def xor_minimality_suite(max_gates: int = 5, frames: Sequence[str] = ("K", "KD")) -> SuiteResult:
    """No circuit over {xor, 0, 1, dia_1} is smaller than its minimized form.

    Circuits are grouped by exact semantic class, so the smallest member of
    each class is known from the enumeration itself.
    """
    from .xorsat import xor_minimize

    res = SuiteResult(f"xor minimality (<= {max_gates} gates)")
    t0 = time.perf_counter()
    en = TermEnumerator((XOR, CONST0, CONST1), ("x", "y"), 1, max_gates, (DIA,), "dag")
    terms = en.generate(max_gates)
    all_ids = list(range(len(en.terms)))
    for frame in frames:
        sem = semantic_classes(en, all_ids, frame)
        smallest: dict[int, int] = {}
        for t in terms:
            s_cls = sem.cls[t.id]
            smallest[s_cls] = min(smallest.get(s_cls, len(t.sub)), len(t.sub))
        for t in terms:
            c = en.circuit(t.id)
            res.checked += 1
            m = xor_minimize(c, frame)
            same = oracle_equivalent(m, c, frame)
            if same == "UNKNOWN":
                res.inconclusive += 1
            elif same == "EQUIVALENT" and m.size <= smallest[sem.cls[t.id]]:
                res.agreed += 1
            else:
                res.fail(
                    f"{frame}: {c.to_formula()} minimizes to {m.to_formula()} ({m.size} gates, {same}), "
                    f"smallest equivalent has {smallest[sem.cls[t.id]]}"
                )
        res.detail[f"{frame}_classes"] = len(smallest)
    res.detail["circuits"] = len(terms)
    res.seconds = time.perf_counter() - t0
    return res


def classify_golden_suite() -> SuiteResult:
    from .classify import GOLDEN, classify_base

    res = SuiteResult("classifier golden table")
    t0 = time.perf_counter()
    for functions, frame, ops, k, task, expected in GOLDEN:
        res.checked += 1
        got = classify_base(functions, frame, ops, k, task).cls
        if got == expected:
            res.agreed += 1
        else:
            res.fail(f"{[f.name for f in functions]} {frame} {ops} k={k} {task}: {got}, expected {expected}")
    res.seconds = time.perf_counter() - t0
    return res


def duality_suite(n: int = 200, seed: int = 0) -> SuiteResult:
    """sat(C) exactly when dual(C) is not valid, on random instances."""
    from .generate import random_circuit
    from .tableau import solve

    rng = random.Random(seed)
    res = SuiteResult("duality")
    t0 = time.perf_counter()
    bases = [(AND, NOT), (OR, CONST0), (AND, CONST0), (XOR, CONST1), (AND, OR, CONST0, CONST1), (NOT, CONST1)]
    for _ in range(n):
        fs = rng.choice(bases)
        frame = rng.choice(["K", "KD"])
        c = random_circuit(rng, fs, ("x", "y"), rng.randint(1, 8), k=rng.randint(1, 2), max_md=2)
        s = solve(c, frame, "sat")
        v = solve(c.dualize(), frame, "valid")
        res.checked += 1
        if s.answer == UNKNOWN or v.answer == UNKNOWN:
            res.inconclusive += 1
        elif (s.answer == SAT) == (v.answer != "VALID"):
            res.agreed += 1
        else:
            res.fail(f"{frame}: sat={s.answer} valid(dual)={v.answer} on {c.to_formula()}")
    res.seconds = time.perf_counter() - t0
    return res


def run_all(seed: int = 0, quick: bool = True) -> list[SuiteResult]:
    size = 4 if quick else 5
    out = [classify_golden_suite()]
    out += engine_suite(size)
    out.append(tableau_suite(size))
    out.append(xor_completeness_suite(4 if quick else 6))
    out.append(xor_minimality_suite(4 if quick else 5))
    out.append(duality_suite(100 if quick else 500, seed))
    return out


__all__ = [
    "ENGINE_FAMILIES",
    "SemanticClasses",
    "SuiteResult",
    "classify_golden_suite",
    "duality_suite",
    "engine_suite",
    "family_circuits",
    "fingerprints",
    "run_all",
    "semantic_classes",
    "tableau_suite",
    "xor_completeness_suite",
    "xor_minimality_suite",
]
