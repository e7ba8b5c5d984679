import numpy as np

from parhodge.series import MatSeries


def E(n, i, j, c=1):
    """c * E_ij as an integer matrix (1-based indices)."""
    out = np.zeros((n, n), dtype=np.int64)
    out[i - 1, j - 1] = c
    return out


def mat(ctx, n, terms, prec):
    return MatSeries.from_terms(ctx, n, terms, prec)


def elem_matrix(ctx, rows):
    """(n, n, m) array from a nested list of FieldElement / int."""
    n = len(rows)
    out = np.zeros((n, n, ctx.m), dtype=np.int64)
    for i, row in enumerate(rows):
        for j, x in enumerate(row):
            out[i, j] = ctx(x).array()
    return out
