"""Batched circuit evaluation over Kripke structures.

A compiled circuit is evaluated at every world of a (possibly very large,
disjoint-union) model in one pass. Relations are stored in CSR form, one
block of rows per modality. The numba kernel is used when numba imports and
``MODSAT_DISABLE_JIT`` is unset; otherwise a vectorized numpy path runs.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

OP_VAR, OP_FN, OP_DIA, OP_BOX, OP_E = 0, 1, 2, 3, 4

try:  # pragma: no cover - exercised implicitly
    if os.environ.get("MODSAT_DISABLE_JIT", "") not in ("", "0"):
        raise ImportError("JIT disabled by environment")
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    HAVE_NUMBA = False


@dataclass(frozen=True)
class CompiledCircuit:
    ops: np.ndarray  # int64[G]
    args: np.ndarray  # int64[G, A]
    nargs: np.ndarray  # int64[G]
    index: np.ndarray  # int64[G], 0-based modality for DIA/BOX
    tab_off: np.ndarray  # int64[G]
    tables: np.ndarray  # uint8[T]
    var_slot: np.ndarray  # int64[G], row of the valuation matrix
    var_names: tuple[str, ...]
    k: int


def compile_circuit(circuit) -> CompiledCircuit:
    from .circuit import BOX, DIA, E, FN, VAR

    gates = circuit.gates
    g = len(gates)
    width = max(1, max((len(x.args) for x in gates), default=1))
    ops = np.zeros(g, np.int64)
    args = np.zeros((g, width), np.int64)
    nargs = np.zeros(g, np.int64)
    index = np.zeros(g, np.int64)
    tab_off = np.zeros(g, np.int64)
    var_slot = np.full(g, -1, np.int64)
    tables: list[int] = []
    names = circuit.variables
    slot = {n: i for i, n in enumerate(names)}
    for gid, gate in enumerate(gates):
        nargs[gid] = len(gate.args)
        args[gid, : len(gate.args)] = gate.args
        if gate.kind == VAR:
            ops[gid] = OP_VAR
            var_slot[gid] = slot[gate.name]
        elif gate.kind == FN:
            ops[gid] = OP_FN
            tab_off[gid] = len(tables)
            tables.extend(gate.fn.bits)
        elif gate.kind == DIA:
            ops[gid] = OP_DIA
            index[gid] = gate.index - 1
        elif gate.kind == BOX:
            ops[gid] = OP_BOX
            index[gid] = gate.index - 1
        elif gate.kind == E:
            ops[gid] = OP_E
    return CompiledCircuit(
        ops, args, nargs, index, tab_off, np.array(tables or [0], np.uint8), var_slot, names, circuit.k
    )


def _eval_numpy(cc: CompiledCircuit, valuation: np.ndarray, ptr: np.ndarray, dst: np.ndarray, n_worlds: int):
    G = cc.ops.shape[0]
    out = np.zeros((G, n_worlds), np.uint8)
    k = ptr.shape[0]
    src = [np.repeat(np.arange(n_worlds), np.diff(ptr[i])) for i in range(k)]
    dsts = [dst[ptr[i, 0] : ptr[i, -1]] for i in range(k)]

    def exists(i, child):
        if dsts[i].size == 0:
            return np.zeros(n_worlds, np.uint8)
        hits = np.bincount(src[i], weights=child[dsts[i]], minlength=n_worlds)
        return (hits > 0).astype(np.uint8)

    for gid in range(G):
        op = cc.ops[gid]
        if op == OP_VAR:
            out[gid] = valuation[cc.var_slot[gid]]
        elif op == OP_FN:
            m = cc.nargs[gid]
            idx = np.zeros(n_worlds, np.int64)
            for j in range(m):
                idx = (idx << 1) | out[cc.args[gid, j]]
            out[gid] = cc.tables[cc.tab_off[gid] + idx]
        else:
            child = out[cc.args[gid, 0]]
            if op == OP_DIA:
                out[gid] = exists(cc.index[gid], child)
            elif op == OP_BOX:
                out[gid] = 1 - exists(cc.index[gid], 1 - child)
            else:
                acc = np.ones(n_worlds, np.uint8)
                for i in range(k):
                    acc &= 1 - exists(i, 1 - child)
                out[gid] = acc
    return out


if HAVE_NUMBA:

    @njit(cache=True)
    def _eval_jit(ops, args, nargs, index, tab_off, tables, var_slot, valuation, ptr, dst, n_worlds):
        G = ops.shape[0]
        k = ptr.shape[0]
        out = np.zeros((G, n_worlds), np.uint8)
        for gid in range(G):
            op = ops[gid]
            if op == OP_VAR:
                s = var_slot[gid]
                for w in range(n_worlds):
                    out[gid, w] = valuation[s, w]
            elif op == OP_FN:
                m = nargs[gid]
                base = tab_off[gid]
                for w in range(n_worlds):
                    idx = 0
                    for j in range(m):
                        idx = (idx << 1) | out[args[gid, j], w]
                    out[gid, w] = tables[base + idx]
            else:
                c = args[gid, 0]
                for w in range(n_worlds):
                    if op == OP_DIA:
                        i = index[gid]
                        v = 0
                        for e in range(ptr[i, w], ptr[i, w + 1]):
                            if out[c, dst[e]]:
                                v = 1
                                break
                        out[gid, w] = v
                    else:
                        lo = index[gid] if op == OP_BOX else 0
                        hi = lo + 1 if op == OP_BOX else k
                        v = 1
                        for i in range(lo, hi):
                            for e in range(ptr[i, w], ptr[i, w + 1]):
                                if not out[c, dst[e]]:
                                    v = 0
                                    break
                            if v == 0:
                                break
                        out[gid, w] = v
        return out


def use_jit() -> bool:
    return HAVE_NUMBA and os.environ.get("MODSAT_DISABLE_JIT", "") in ("", "0")


def evaluate_compiled(
    cc: CompiledCircuit,
    valuation: np.ndarray,
    ptr: np.ndarray,
    dst: np.ndarray,
    n_worlds: int,
    jit: bool | None = None,
) -> np.ndarray:
    """Gate values at every world: ``uint8[G, n_worlds]``.

    ``valuation`` is ``uint8[len(var_names), n_worlds]``; ``ptr`` is
    ``int64[k, n_worlds + 1]`` with absolute offsets into ``dst``.
    """
    if valuation.shape[0] == 0:
        valuation = np.zeros((1, n_worlds), np.uint8)
    valuation = np.ascontiguousarray(valuation, np.uint8)
    ptr = np.ascontiguousarray(ptr, np.int64)
    dst = np.ascontiguousarray(dst, np.int64)
    if jit is None:
        jit = use_jit()
    if jit and HAVE_NUMBA:
        return _eval_jit(
            cc.ops, cc.args, cc.nargs, cc.index, cc.tab_off, cc.tables, cc.var_slot,
            valuation, ptr, dst, n_worlds,
        )
    return _eval_numpy(cc, valuation, ptr, dst, n_worlds)


def build_csr(n_worlds: int, relations: list[np.ndarray]) -> tuple[np.ndarray, np.ndarray]:
    """CSR arrays from per-modality edge arrays of shape ``(E_i, 2)``."""
    k = len(relations)
    ptr = np.zeros((k, n_worlds + 1), np.int64)
    parts = []
    offset = 0
    for i, edges in enumerate(relations):
        edges = np.asarray(edges, np.int64).reshape(-1, 2)
        order = np.lexsort((edges[:, 1], edges[:, 0]))
        edges = edges[order]
        counts = np.bincount(edges[:, 0], minlength=n_worlds) if len(edges) else np.zeros(n_worlds, np.int64)
        ptr[i, 0] = offset
        ptr[i, 1:] = offset + np.cumsum(counts)
        parts.append(edges[:, 1])
        offset += len(edges)
    dst = np.concatenate(parts) if parts else np.zeros(0, np.int64)
    return ptr, dst
