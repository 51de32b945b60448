"""Dense mod-p kernels for truncated series in one or two variables.

Arrays are int64 with entries in [0, p); a bivariate array ``a`` of
precision N stores the coefficient of x^i y^j at ``a[i, j]`` and is zero
whenever i + j > N.

Each kernel has a numba implementation and a pure numpy one.  The numba
path is used when numba imports and ``CHROMALG_DISABLE_JIT`` is unset or
false.  Both are always importable so the benchmark can compare them.
"""
from __future__ import annotations

import os

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None


def _flag(name: str) -> bool:
    return os.environ.get(name, "").strip().lower() not in ("", "0", "false", "no")


JIT_AVAILABLE = numba is not None
USE_JIT = JIT_AVAILABLE and not _flag("CHROMALG_DISABLE_JIT")


def backend() -> str:
    return "numba" if USE_JIT else "numpy"


def triangle_mask(N: int) -> np.ndarray:
    i = np.arange(N + 1)
    return (i[:, None] + i[None, :]) <= N


# numpy --------------------------------------------------------------------

def mul1_numpy(a, b, N, p):
    out = np.convolve(a, b)[: N + 1]
    return out % p


def mul2_numpy(a, b, N, p):
    # shift-add over the nonzeros of the sparser factor
    if np.count_nonzero(a) > np.count_nonzero(b):
        a, b = b, a
    out = np.zeros((N + 1, N + 1), dtype=np.int64)
    for u, v in zip(*np.nonzero(a)):
        c = a[u, v]
        out[u:, v:] += c * b[: N + 1 - u, : N + 1 - v]
    out %= p
    out[~triangle_mask(N)] = 0
    return out


def assoc_mismatch_numpy(A, gpow, N, p):
    """First (a, b, c) where F(F(x,y),z) and F(x,F(y,z)) differ, else None.

    ``gpow[i]`` is F(x, y)^i.  The coefficient of x^a y^b z^c on the left
    is sum_i A[i, c] gpow[i][a, b] and on the right sum_j A[a, j] gpow[j][b, c].
    """
    k = gpow.shape[0]
    rows, cols = np.nonzero(A[:k, :k])
    found = []
    for c in range(N + 1):
        m = N - c
        sel = cols == c
        left = np.zeros((m + 1, m + 1), dtype=np.int64)
        for i in rows[sel]:
            left += A[i, c] * gpow[i, : m + 1, : m + 1]
        right = np.zeros((m + 1, m + 1), dtype=np.int64)
        for a, j in zip(rows, cols):
            if a <= m:
                right[a] += A[a, j] * gpow[j, : m + 1, c]
        diff = (left - right) % p
        diff[~triangle_mask(m)] = 0
        bad = np.argwhere(diff)
        if len(bad):
            deg = bad.sum(axis=1)
            best = bad[np.lexsort((bad[:, 1], bad[:, 0], deg))[0]]
            found.append((int(best[0] + best[1] + c), int(best[0]), int(best[1]), c))
    if not found:
        return None
    _, a, b, c = min(found)
    return (a, b, c)


# numba --------------------------------------------------------------------

if JIT_AVAILABLE:

    @numba.njit(cache=True)
    def mul1_numba(a, b, N, p):
        out = np.zeros(N + 1, dtype=np.int64)
        for i in range(min(len(a), N + 1)):
            ai = a[i]
            if ai == 0:
                continue
            for j in range(min(len(b), N + 1 - i)):
                if b[j] != 0:
                    out[i + j] += ai * b[j]
        for i in range(N + 1):
            out[i] %= p
        return out

    @numba.njit(cache=True)
    def mul2_numba(a, b, N, p):
        out = np.zeros((N + 1, N + 1), dtype=np.int64)
        bi = np.empty(b.size, dtype=np.int64)
        bj = np.empty(b.size, dtype=np.int64)
        nb = 0
        for k in range(N + 1):
            for l in range(N + 1 - k):
                if b[k, l] != 0:
                    bi[nb] = k
                    bj[nb] = l
                    nb += 1
        for i in range(N + 1):
            for j in range(N + 1 - i):
                c = a[i, j]
                if c == 0:
                    continue
                room = N - i - j
                for t in range(nb):
                    k = bi[t]
                    l = bj[t]
                    if k + l <= room:
                        out[i + k, j + l] += c * b[k, l]
        for i in range(N + 1):
            for j in range(N + 1 - i):
                out[i, j] %= p
        return out

    @numba.njit(cache=True)
    def _assoc_numba(A, gpow, N, p):
        k = gpow.shape[0]
        # column and row nonzero lists of A restricted to indices < k
        col_ptr = np.zeros(N + 2, dtype=np.int64)
        row_ptr = np.zeros(N + 2, dtype=np.int64)
        for i in range(k):
            for j in range(k):
                if A[i, j] != 0:
                    col_ptr[j + 1] += 1
                    row_ptr[i + 1] += 1
        for t in range(N + 1):
            col_ptr[t + 1] += col_ptr[t]
            row_ptr[t + 1] += row_ptr[t]
        col_idx = np.empty(col_ptr[N + 1], dtype=np.int64)
        row_idx = np.empty(row_ptr[N + 1], dtype=np.int64)
        cfill = col_ptr[:-1].copy()
        rfill = row_ptr[:-1].copy()
        for i in range(k):
            for j in range(k):
                if A[i, j] != 0:
                    col_idx[cfill[j]] = i
                    cfill[j] += 1
                    row_idx[rfill[i]] = j
                    rfill[i] += 1
        for d in range(N + 1):
            for a in range(d + 1):
                for b in range(d - a + 1):
                    c = d - a - b
                    left = 0
                    for t in range(col_ptr[c], col_ptr[c + 1]):
                        i = col_idx[t]
                        left += A[i, c] * gpow[i, a, b]
                    right = 0
                    for t in range(row_ptr[a], row_ptr[a + 1]):
                        j = row_idx[t]
                        right += A[a, j] * gpow[j, b, c]
                    if (left - right) % p != 0:
                        return a, b, c
        return -1, -1, -1

    def assoc_mismatch_numba(A, gpow, N, p):
        a, b, c = _assoc_numba(A, gpow, N, p)
        return None if a < 0 else (int(a), int(b), int(c))

else:  # pragma: no cover
    mul1_numba = mul2_numba = assoc_mismatch_numba = None


def _pick(jit_fn, np_fn):
    return jit_fn if USE_JIT else np_fn


def mul1(a, b, N, p):
    return _pick(mul1_numba, mul1_numpy)(a, b, N, p)


def mul2(a, b, N, p):
    return _pick(mul2_numba, mul2_numpy)(a, b, N, p)


def assoc_mismatch(A, gpow, N, p):
    return _pick(assoc_mismatch_numba, assoc_mismatch_numpy)(A, gpow, N, p)
