"""Compare the numba and numpy circuit-evaluation kernels.

Usage: python3 benchmarks/bench_kernels.py [--worlds 1000 100000] [--gates 200] [--repeat 5]

Each row evaluates one random circuit at every world of a random Kripke
structure with both kernels, checks that the outputs match and reports the
best wall time of ``--repeat`` runs. The first numba call (compilation) is
timed separately.
"""

from __future__ import annotations

import argparse
import random
import time

import numpy as np

from modsat._kernels import HAVE_NUMBA, build_csr, compile_circuit, evaluate_compiled
from modsat.boolfn import AND, NOT, OR, XOR
from modsat.circuit import BOX, DIA, CircuitBuilder


def random_structure(n_worlds: int, k: int, out_degree: int, n_vars: int, seed: int):
    rng = np.random.default_rng(seed)
    relations = []
    for _ in range(k):
        src = np.repeat(np.arange(n_worlds), out_degree)
        dst = rng.integers(0, n_worlds, size=src.size)
        relations.append(np.unique(np.stack([src, dst], axis=1), axis=0))
    ptr, dst = build_csr(n_worlds, relations)
    valuation = rng.integers(0, 2, size=(n_vars, n_worlds), dtype=np.uint8)
    return valuation, ptr, dst


def layered_circuit(n_gates: int, names, k: int, max_md: int, seed: int):
    """Random DAG where each gate reads the previous gate and other recent ones, so all of it is reachable."""
    rng = random.Random(seed)
    b = CircuitBuilder(share=False)
    gates = [b.var(x) for x in names]
    depth = [0] * len(gates)
    for _ in range(n_gates):
        last = len(gates) - 1
        recent = range(max(0, len(gates) - 8), len(gates))
        if rng.random() < 0.3 and depth[last] < max_md:
            gates.append(b.modal(rng.choice((BOX, DIA)), rng.randint(1, k), gates[last]))
            depth.append(depth[last] + 1)
        else:
            f = rng.choice((AND, OR, XOR, NOT))
            args = [last] + [rng.choice(recent) for _ in range(f.arity - 1)]
            gates.append(b.fn(f, *[gates[a] for a in args]))
            depth.append(max(depth[a] for a in args))
    return b.build(gates[-1], k).pruned()


def best_of(fn, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--worlds", type=int, nargs="+", default=[1_000, 10_000, 100_000])
    ap.add_argument("--gates", type=int, default=200)
    ap.add_argument("--k", type=int, default=2)
    ap.add_argument("--degree", type=int, default=3)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    names = ("x", "y", "z")
    c = layered_circuit(args.gates, names, args.k, 6, args.seed)
    cc = compile_circuit(c)
    print(f"circuit: {c.size} gates, modal depth {c.modal_depth()}, k={c.k}; numba available: {HAVE_NUMBA}")

    if HAVE_NUMBA:
        val, ptr, dst = random_structure(16, args.k, args.degree, len(cc.var_names), args.seed)
        t0 = time.perf_counter()
        evaluate_compiled(cc, val, ptr, dst, 16, jit=True)
        print(f"numba first call (compilation): {time.perf_counter() - t0:.2f}s")

    print(f"{'worlds':>10} {'numpy s':>10} {'numba s':>10} {'speedup':>8}")
    for n in args.worlds:
        val, ptr, dst = random_structure(n, args.k, args.degree, len(cc.var_names), args.seed + n)
        ref = evaluate_compiled(cc, val, ptr, dst, n, jit=False)
        t_np = best_of(lambda: evaluate_compiled(cc, val, ptr, dst, n, jit=False), args.repeat)
        if HAVE_NUMBA:
            out = evaluate_compiled(cc, val, ptr, dst, n, jit=True)
            if not np.array_equal(out, ref):
                raise SystemExit(f"kernels disagree on {n} worlds")
            t_jit = best_of(lambda: evaluate_compiled(cc, val, ptr, dst, n, jit=True), args.repeat)
            print(f"{n:>10} {t_np:>10.4f} {t_jit:>10.4f} {t_np / t_jit:>7.1f}x")
        else:
            print(f"{n:>10} {t_np:>10.4f} {'-':>10} {'-':>8}")


if __name__ == "__main__":
    main()
