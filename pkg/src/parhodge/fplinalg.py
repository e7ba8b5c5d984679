"""Dense linear algebra over F_p (numpy, vectorised row operations) and small
dense matrices over F_q (lists of FieldElement).

The F_p routines back every F_q-linear operator that the normal-form solver
needs: an F_q-linear map written in coordinates is an F_p-linear map, so
kernels, projectors and inverses computed over F_p are the F_q ones.
"""
from __future__ import annotations

import numpy as np

from .errors import DivisionByZero
from .ffield import FieldCtx, FieldElement, element_from_array


def _inv_table(p: int) -> np.ndarray:
    t = np.zeros(p, dtype=np.int64)
    for a in range(1, p):
        t[a] = pow(a, -1, p)
    return t


def rref(M: np.ndarray, p: int) -> tuple[np.ndarray, list[int]]:
    R = np.array(M, dtype=np.int64) % p
    rows, cols = R.shape
    inv = _inv_table(p)
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(R[r:, c])[0]
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            R[[r, piv]] = R[[piv, r]]
        R[r] = (R[r] * inv[R[r, c]]) % p
        col = R[:, c].copy()
        col[r] = 0
        R -= np.outer(col, R[r])
        R %= p
        pivots.append(c)
        r += 1
    return R, pivots


def rank(M: np.ndarray, p: int) -> int:
    return len(rref(M, p)[1])


def kernel(M: np.ndarray, p: int) -> np.ndarray:
    """Columns spanning the right kernel of M."""
    M = np.asarray(M, dtype=np.int64)
    cols = M.shape[1]
    R, pivots = rref(M, p)
    free = [c for c in range(cols) if c not in pivots]
    K = np.zeros((cols, len(free)), dtype=np.int64)
    for k, f in enumerate(free):
        K[f, k] = 1
        for i, pc in enumerate(pivots):
            K[pc, k] = (-R[i, f]) % p
    return K


def column_space(M: np.ndarray, p: int) -> np.ndarray:
    """Columns of M forming a basis of its image."""
    M = np.asarray(M, dtype=np.int64) % p
    _, pivots = rref(M, p)
    return M[:, pivots]


def inverse(M: np.ndarray, p: int) -> np.ndarray:
    M = np.asarray(M, dtype=np.int64)
    n = M.shape[0]
    R, pivots = rref(np.hstack([M % p, np.eye(n, dtype=np.int64)]), p)
    if pivots[:n] != list(range(n)):
        raise DivisionByZero("matrix is singular over F_%d" % p)
    return R[:, n:].copy()


def matmul(A: np.ndarray, B: np.ndarray, p: int) -> np.ndarray:
    return (np.asarray(A, dtype=np.int64) @ np.asarray(B, dtype=np.int64)) % p


def matpow(M: np.ndarray, e: int, p: int) -> np.ndarray:
    result = np.eye(M.shape[0], dtype=np.int64)
    base = np.asarray(M, dtype=np.int64) % p
    while e:
        if e & 1:
            result = matmul(result, base, p)
        base = matmul(base, base, p)
        e >>= 1
    return result


def fitting_split(M: np.ndarray, p: int) -> tuple[np.ndarray, np.ndarray]:
    """Projectors (P0, P1) onto the generalised 0-space of M and its
    M-stable complement (the Fitting decomposition), with P0 + P1 = I."""
    n = M.shape[0]
    K = matpow(M, n, p)
    ker = kernel(K, p)
    img = column_space(K, p)
    W = np.hstack([ker, img]) if img.size else ker
    if W.shape[1] == 0:
        W = np.zeros((n, 0), dtype=np.int64)
    Winv = inverse(W, p) if n else W
    D = np.zeros((n, n), dtype=np.int64)
    for i in range(ker.shape[1]):
        D[i, i] = 1
    P0 = matmul(matmul(W, D, p), Winv, p)
    P1 = (np.eye(n, dtype=np.int64) - P0) % p
    return P0, P1


# --------------------------------------------------------------------------
# F_q matrices as (k, l, m) coordinate arrays <-> object matrices


def to_objects(ctx: FieldCtx, arr: np.ndarray) -> list[list[FieldElement]]:
    return [[element_from_array(ctx, arr[i, j]) for j in range(arr.shape[1])] for i in range(arr.shape[0])]


def from_objects(ctx: FieldCtx, mat: list[list[FieldElement]]) -> np.ndarray:
    rows, cols = len(mat), len(mat[0]) if mat else 0
    out = np.zeros((rows, cols, ctx.m), dtype=np.int64)
    for i in range(rows):
        for j in range(cols):
            out[i, j] = mat[i][j].coords
    return out


def regular_matrix(ctx: FieldCtx, arr: np.ndarray) -> np.ndarray:
    """F_p matrix of the F_q-linear map v -> X v, for X of shape (k, l, m).

    Vectors of F_q^l are flattened as (index, coordinate)."""
    k, l, m = arr.shape
    idx = np.add.outer(np.arange(m), np.arange(m))
    T = ctx.red[idx]  # (a, b, c)
    mm = np.einsum("ija,abc->icjb", arr, T) % ctx.p
    return mm.reshape(k * m, l * m)


def fq_rref(mat: list[list[FieldElement]]):
    R = [list(row) for row in mat]
    rows = len(R)
    cols = len(R[0]) if rows else 0
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        piv = next((i for i in range(r, rows) if not R[i][c].is_zero()), None)
        if piv is None:
            continue
        R[r], R[piv] = R[piv], R[r]
        inv = R[r][c].inverse()
        R[r] = [x * inv for x in R[r]]
        for i in range(rows):
            if i != r and not R[i][c].is_zero():
                f = R[i][c]
                R[i] = [a - f * b for a, b in zip(R[i], R[r])]
        pivots.append(c)
        r += 1
    return R, pivots


def fq_kernel(mat: list[list[FieldElement]], ctx: FieldCtx) -> list[list[FieldElement]]:
    """Basis vectors (as lists) of the right kernel over F_q."""
    cols = len(mat[0])
    R, pivots = fq_rref(mat)
    out = []
    for f in (c for c in range(cols) if c not in pivots):
        v = [ctx.zero] * cols
        v[f] = ctx.one
        for i, pc in enumerate(pivots):
            v[pc] = -R[i][f]
        out.append(v)
    return out


def fq_matmul(A, B, ctx: FieldCtx):
    n, k, r = len(A), len(B), len(B[0])
    out = [[ctx.zero] * r for _ in range(n)]
    for i in range(n):
        for l in range(k):
            a = A[i][l]
            if a.is_zero():
                continue
            row = B[l]
            for j in range(r):
                out[i][j] = out[i][j] + a * row[j]
    return out


def fq_inverse(A, ctx: FieldCtx):
    n = len(A)
    aug = [list(A[i]) + [ctx.one if i == j else ctx.zero for j in range(n)] for i in range(n)]
    R, pivots = fq_rref(aug)
    if pivots[:n] != list(range(n)):
        raise DivisionByZero("singular matrix over " + repr(ctx))
    return [row[n:] for row in R]


def fq_identity(n: int, ctx: FieldCtx):
    return [[ctx.one if i == j else ctx.zero for j in range(n)] for i in range(n)]


def fq_det(A, ctx: FieldCtx) -> FieldElement:
    M = [list(r) for r in A]
    n = len(M)
    det = ctx.one
    for c in range(n):
        piv = next((i for i in range(c, n) if not M[i][c].is_zero()), None)
        if piv is None:
            return ctx.zero
        if piv != c:
            M[c], M[piv] = M[piv], M[c]
            det = -det
        det = det * M[c][c]
        inv = M[c][c].inverse()
        for i in range(c + 1, n):
            f = M[i][c] * inv
            if not f.is_zero():
                M[i] = [a - f * b for a, b in zip(M[i], M[c])]
    return det
