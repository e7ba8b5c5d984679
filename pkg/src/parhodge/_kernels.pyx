# cython: language_level=3
"""Compiled kernels for matrix power series over F_{p^m}.

Same contracts as ``_kernels_py``; inputs are coerced to C-contiguous int64.
"""
import numpy as np
cimport numpy as cnp

ctypedef cnp.int64_t i64


cdef inline void _reduce(i64* acc, const i64* red, i64 p, i64* out, Py_ssize_t m) noexcept nogil:
    cdef Py_ssize_t e, c
    cdef i64 s
    for c in range(m):
        s = 0
        for e in range(2 * m - 1):
            if acc[e] != 0:
                s += (acc[e] % p) * red[e * m + c]
        out[c] = s % p


def matmul_series(A, B, red, long p):
    cdef const i64[:, :, :, ::1] a = np.ascontiguousarray(A, dtype=np.int64)
    cdef const i64[:, :, :, ::1] b = np.ascontiguousarray(B, dtype=np.int64)
    cdef const i64[:, ::1] rd = np.ascontiguousarray(red, dtype=np.int64)
    cdef Py_ssize_t L = min(a.shape[0], b.shape[0])
    cdef Py_ssize_t n = a.shape[1], k = a.shape[2], m = a.shape[3], r = b.shape[2]
    out_arr = np.zeros((L, n, r, m), dtype=np.int64)
    cdef i64[:, :, :, ::1] out = out_arr
    cdef i64[::1] acc = np.zeros(2 * m - 1, dtype=np.int64)
    cdef Py_ssize_t deg, t, i, j, l, x, y, e
    cdef i64 av
    with nogil:
        for deg in range(L):
            for i in range(n):
                for j in range(r):
                    for e in range(2 * m - 1):
                        acc[e] = 0
                    for t in range(deg + 1):
                        for l in range(k):
                            for x in range(m):
                                av = a[t, i, l, x]
                                if av == 0:
                                    continue
                                for y in range(m):
                                    acc[x + y] += av * b[deg - t, l, j, y]
                    _reduce(&acc[0], &rd[0, 0], p, &out[deg, i, j, 0], m)
    return out_arr


def const_left(C, A, red, long p):
    cdef const i64[:, :, ::1] c = np.ascontiguousarray(C, dtype=np.int64)
    cdef const i64[:, :, :, ::1] a = np.ascontiguousarray(A, dtype=np.int64)
    cdef const i64[:, ::1] rd = np.ascontiguousarray(red, dtype=np.int64)
    cdef Py_ssize_t L = a.shape[0], k = a.shape[1], r = a.shape[2], m = a.shape[3]
    cdef Py_ssize_t n = c.shape[0]
    out_arr = np.zeros((L, n, r, m), dtype=np.int64)
    cdef i64[:, :, :, ::1] out = out_arr
    cdef i64[::1] acc = np.zeros(2 * m - 1, dtype=np.int64)
    cdef Py_ssize_t deg, i, j, l, x, y, e
    cdef i64 cv
    with nogil:
        for deg in range(L):
            for i in range(n):
                for j in range(r):
                    for e in range(2 * m - 1):
                        acc[e] = 0
                    for l in range(k):
                        for x in range(m):
                            cv = c[i, l, x]
                            if cv == 0:
                                continue
                            for y in range(m):
                                acc[x + y] += cv * a[deg, l, j, y]
                    _reduce(&acc[0], &rd[0, 0], p, &out[deg, i, j, 0], m)
    return out_arr


def const_right(A, C, red, long p):
    cdef const i64[:, :, :, ::1] a = np.ascontiguousarray(A, dtype=np.int64)
    cdef const i64[:, :, ::1] c = np.ascontiguousarray(C, dtype=np.int64)
    cdef const i64[:, ::1] rd = np.ascontiguousarray(red, dtype=np.int64)
    cdef Py_ssize_t L = a.shape[0], n = a.shape[1], k = a.shape[2], m = a.shape[3]
    cdef Py_ssize_t r = c.shape[1]
    out_arr = np.zeros((L, n, r, m), dtype=np.int64)
    cdef i64[:, :, :, ::1] out = out_arr
    cdef i64[::1] acc = np.zeros(2 * m - 1, dtype=np.int64)
    cdef Py_ssize_t deg, i, j, l, x, y, e
    cdef i64 av
    with nogil:
        for deg in range(L):
            for i in range(n):
                for j in range(r):
                    for e in range(2 * m - 1):
                        acc[e] = 0
                    for l in range(k):
                        for x in range(m):
                            av = a[deg, i, l, x]
                            if av == 0:
                                continue
                            for y in range(m):
                                acc[x + y] += av * c[l, j, y]
                    _reduce(&acc[0], &rd[0, 0], p, &out[deg, i, j, 0], m)
    return out_arr


def field_mul(X, Y, red, long p):
    x, y = np.broadcast_arrays(np.asarray(X, dtype=np.int64), np.asarray(Y, dtype=np.int64))
    shape = x.shape
    cdef Py_ssize_t m = shape[len(shape) - 1]  # wraparound is off
    cdef const i64[:, ::1] xv = np.ascontiguousarray(x.reshape(-1, m))
    cdef const i64[:, ::1] yv = np.ascontiguousarray(y.reshape(-1, m))
    cdef const i64[:, ::1] rd = np.ascontiguousarray(red, dtype=np.int64)
    cdef Py_ssize_t cnt = xv.shape[0], q, s, t, e
    out_arr = np.zeros((cnt, m), dtype=np.int64)
    cdef i64[:, ::1] out = out_arr
    cdef i64[::1] acc = np.zeros(2 * m - 1, dtype=np.int64)
    with nogil:
        for q in range(cnt):
            for e in range(2 * m - 1):
                acc[e] = 0
            for s in range(m):
                if xv[q, s] == 0:
                    continue
                for t in range(m):
                    acc[s + t] += xv[q, s] * yv[q, t]
            _reduce(&acc[0], &rd[0, 0], p, &out[q, 0], m)
    return out_arr.reshape(shape)
