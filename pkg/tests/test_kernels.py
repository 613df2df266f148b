from __future__ import annotations

import os
import subprocess
import sys

import numpy as np

from modsat import _kernels
from modsat.generate import random_circuit
from modsat.boolfn import AND, NOT, XOR, CONST1
import random


def _random_batch(seed, n_worlds=60):
    rng = np.random.default_rng(seed)
    c = random_circuit(random.Random(seed), (AND, NOT, XOR, CONST1), n_gates=25, k=2, max_md=3)
    edges = [rng.integers(0, n_worlds, size=(rng.integers(0, 150), 2)) for _ in range(c.k)]
    ptr, dst = _kernels.build_csr(n_worlds, edges)
    val = (rng.random((len(c.variables), n_worlds)) < 0.5).astype(np.uint8)
    return c, val, ptr, dst, n_worlds


def test_jit_and_numpy_paths_agree():
    for seed in range(30):
        c, val, ptr, dst, n = _random_batch(seed)
        cc = _kernels.compile_circuit(c)
        a = _kernels.evaluate_compiled(cc, val, ptr, dst, n, jit=True)
        b = _kernels.evaluate_compiled(cc, val, ptr, dst, n, jit=False)
        assert np.array_equal(a, b)


def test_csr_layout():
    ptr, dst = _kernels.build_csr(3, [np.array([[0, 1], [0, 2], [2, 2]]), np.zeros((0, 2), np.int64)])
    assert ptr.shape == (2, 4)
    assert list(dst[ptr[0, 0] : ptr[0, 1]]) == [1, 2]
    assert ptr[1, 0] == ptr[1, 3]


def test_env_flag_disables_jit():
    code = "from modsat import _kernels; print(_kernels.HAVE_NUMBA, _kernels.use_jit())"
    env = dict(os.environ, MODSAT_DISABLE_JIT="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.split() == ["False", "False"]
