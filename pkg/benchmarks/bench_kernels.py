"""Time the numba kernels against the numpy fallback.

    python benchmarks/bench_kernels.py [--repeat 5] [--json]

Both implementations are called directly, so the environment flag does not
matter here.  The first numba call is made before timing to exclude JIT
compilation.
"""
from __future__ import annotations

import argparse
import json
import time

import numpy as np

from chromalg import kernels
from chromalg.fgl import fgl_honda


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def random_triangle(rng, N, p, density):
    a = rng.integers(0, p, size=(N + 1, N + 1)).astype(np.int64)
    a[rng.random(a.shape) > density] = 0
    a[~kernels.triangle_mask(N)] = 0
    return a


def law_powers(A, N, p):
    k = int(np.nonzero(A.any(axis=1))[0].max()) + 1
    gpow = np.zeros((k, N + 1, N + 1), dtype=np.int64)
    gpow[0, 0, 0] = 1
    for i in range(1, k):
        gpow[i] = kernels.mul2(gpow[i - 1], A, N, p)
    return gpow


def cases(rng):
    p = 7
    a1 = rng.integers(0, p, 4001).astype(np.int64)
    b1 = rng.integers(0, p, 4001).astype(np.int64)
    yield "mul1 N=4000", (a1, b1, 4000, p), kernels.mul1_numba, kernels.mul1_numpy
    a2 = random_triangle(rng, 120, p, 0.3)
    b2 = random_triangle(rng, 120, p, 0.3)
    yield "mul2 N=120 dense", (a2, b2, 120, p), kernels.mul2_numba, kernels.mul2_numpy
    F = fgl_honda(7, 2, 343)
    A = F.series.dense_array()
    yield "mul2 honda(7,2) N=343", (A, A, 343, p), kernels.mul2_numba, kernels.mul2_numpy
    H = fgl_honda(5, 1, 125)
    B = H.series.dense_array()
    gpow = law_powers(B, 125, 5)
    yield "assoc honda(5,1) N=125", (B, gpow, 125, 5), kernels.assoc_mismatch_numba, kernels.assoc_mismatch_numpy


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--json", action="store_true")
    args = ap.parse_args(argv)
    if not kernels.JIT_AVAILABLE:
        raise SystemExit("numba is not installed")
    rng = np.random.default_rng(args.seed)
    rows = []
    for name, inputs, jit_fn, np_fn in cases(rng):
        jit_fn(*inputs)  # compile
        t_jit, r_jit = best_of(lambda: jit_fn(*inputs), args.repeat)
        t_np, r_np = best_of(lambda: np_fn(*inputs), args.repeat)
        same = (r_jit == r_np) if not isinstance(r_jit, np.ndarray) else bool(np.array_equal(r_jit, r_np))
        rows.append({"case": name, "numba_s": t_jit, "numpy_s": t_np,
                     "speedup": t_np / t_jit if t_jit else float("inf"), "agree": same})
    if args.json:
        print(json.dumps(rows, indent=2))
        return
    print(f"{'case':28s} {'numba (s)':>10s} {'numpy (s)':>10s} {'speedup':>8s}  agree")
    for r in rows:
        print(f"{r['case']:28s} {r['numba_s']:10.4f} {r['numpy_s']:10.4f} {r['speedup']:8.1f}  {r['agree']}")


if __name__ == "__main__":
    main()
