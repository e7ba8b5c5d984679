"""Reference p-curvature by literal operator application.

Sections are row vectors stored as dicts {(column, exponent): FieldElement};
the operator is f -> z f' + f A.  Only scalar field arithmetic is used, so this
shares no code with the series kernels.
"""
from __future__ import annotations

from .ffield import element_from_array


def _matrix_terms(A):
    """{(i, j): {exponent: FieldElement}} for the nonzero coefficients of A."""
    out = {}
    for t in range(A.length):
        e = A.val + t
        for i in range(A.n):
            for j in range(A.n):
                c = A.coeffs[t, i, j]
                if c.any():
                    out.setdefault((i, j), {})[e] = element_from_array(A.ctx, c)
    return out


def _apply(section, terms, n, N, ctx):
    out = {}
    p = ctx.p
    for (r, e), c in section.items():
        # z d/dz part
        if e % p:
            key = (r, e)
            out[key] = out.get(key, ctx.zero) + c * (e % p)
    for (r, e), c in section.items():
        for j in range(n):
            for ea, a in terms.get((r, j), {}).items():
                if e + ea < N:
                    key = (j, e + ea)
                    out[key] = out.get(key, ctx.zero) + c * a
    return {k: v for k, v in out.items() if not v.is_zero()}


def p_curvature_oracle(A) -> dict:
    """{(i, j, exponent): FieldElement}; row i is nabla^p(e_i) - nabla(e_i)."""
    ctx, n, N = A.ctx, A.n, A.prec
    terms = _matrix_terms(A)
    psi = {}
    for i in range(n):
        sec = {(i, 0): ctx.one}
        first = _apply(sec, terms, n, N, ctx)
        cur = first
        for _ in range(ctx.p - 1):
            cur = _apply(cur, terms, n, N, ctx)
        keys = set(cur) | set(first)
        for j, e in keys:
            v = cur.get((j, e), ctx.zero) - first.get((j, e), ctx.zero)
            if not v.is_zero():
                psi[(i, j, e)] = v
    return psi


def matseries_terms(M) -> dict:
    out = {}
    for t in range(M.length):
        e = M.val + t
        for i in range(M.n):
            for j in range(M.n):
                c = M.coeffs[t, i, j]
                if c.any():
                    out[(i, j, e)] = element_from_array(M.ctx, c)
    return out
