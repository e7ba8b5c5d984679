"""Pure numpy kernels for matrix power series over F_{p^m}.

Arrays hold F_p coordinates in the last axis.  ``red`` is the reduction table
of shape ``(2m-1, m)`` whose row ``e`` holds the coordinates of ``u**e``.
"""
from __future__ import annotations

import numpy as np


def _mult_tensor(red: np.ndarray) -> np.ndarray:
    m = red.shape[1]
    idx = np.add.outer(np.arange(m), np.arange(m))
    return red[idx]  # (a, b, c): coords of u^a * u^b


def field_mul(x: np.ndarray, y: np.ndarray, red: np.ndarray, p: int) -> np.ndarray:
    """Elementwise product of broadcastable coordinate arrays."""
    t = _mult_tensor(red)
    return np.einsum("...a,...b,abc->...c", x, y, t, optimize=True) % p


def _mult_matrices(b: np.ndarray, red: np.ndarray) -> np.ndarray:
    # b[..., l, j, bb] -> M[..., l, a, j, c] with sum_b b_bb T[a, bb, c]
    t = _mult_tensor(red)
    mm = np.einsum("...ljb,abc->...lajc", b, t, optimize=True)
    return mm


def matmul_series(A: np.ndarray, B: np.ndarray, red: np.ndarray, p: int) -> np.ndarray:
    """Truncated product of matrix series ``A`` (La,n,k,m) and ``B`` (Lb,k,r,m)."""
    L = min(A.shape[0], B.shape[0])
    n, k, m = A.shape[1], A.shape[2], A.shape[3]
    r = B.shape[2]
    out = np.zeros((L, n, r * m), dtype=np.int64)
    if L == 0:
        return out.reshape(L, n, r, m)
    Bm = (_mult_matrices(B[:L], red) % p).reshape(L, k * m, r * m)
    Af = A[:L].reshape(L, n, k * m)
    for t in range(L):
        if not Af[t].any():
            continue
        out[t:] += Af[t] @ Bm[: L - t]
        if t % 64 == 63:
            out %= p
    return (out % p).reshape(L, n, r, m)


def const_left(c: np.ndarray, A: np.ndarray, red: np.ndarray, p: int) -> np.ndarray:
    """Multiply every coefficient of ``A`` (L,k,r,m) on the left by ``c`` (n,k,m)."""
    L, k, r, m = A.shape
    n = c.shape[0]
    Am = (_mult_matrices(A, red) % p).reshape(L, k * m, r * m)
    cf = c.reshape(n, k * m)
    return ((cf @ Am) % p).reshape(L, n, r, m)


def const_right(A: np.ndarray, c: np.ndarray, red: np.ndarray, p: int) -> np.ndarray:
    """Multiply every coefficient of ``A`` (L,n,k,m) on the right by ``c`` (k,r,m)."""
    L, n, k, m = A.shape
    r = c.shape[1]
    cm = (_mult_matrices(c, red) % p).reshape(k * m, r * m)
    Af = A.reshape(L, n, k * m)
    return ((Af @ cm) % p).reshape(L, n, r, m)
