"""Seeded random inputs shared by the self-test and the test-suite."""
from __future__ import annotations

import random
from fractions import Fraction

import numpy as np

from . import fplinalg
from .connection import GaugeElement
from .ffield import FieldCtx, canonical_field
from .rootdata import TameWeight, entry_bound
from .series import MatSeries


def field(p: int, m: int = 1) -> FieldCtx:
    return FieldCtx(p) if m == 1 else canonical_field(p, m)


def _np(rng: random.Random) -> np.random.Generator:
    return np.random.default_rng(rng.getrandbits(63))


def series(rng: random.Random, ctx: FieldCtx, n: int, N: int, density: float = 0.6, val: int = 0) -> MatSeries:
    g = _np(rng)
    L = max(N - val, 0)
    arr = g.integers(0, ctx.p, size=(L, n, n, ctx.m))
    mask = g.random((L, n, n)) < density
    arr = arr * mask[..., None]
    return MatSeries(ctx, val, arr)


def constant(rng: random.Random, ctx: FieldCtx, n: int) -> np.ndarray:
    return _np(rng).integers(0, ctx.p, size=(n, n, ctx.m))


def invertible_constant(rng: random.Random, ctx: FieldCtx, n: int) -> np.ndarray:
    while True:
        c = constant(rng, ctx, n)
        if not fplinalg.fq_det(fplinalg.to_objects(ctx, c), ctx).is_zero():
            return c


def gauge(rng: random.Random, ctx: FieldCtx, n: int, N: int) -> GaugeElement:
    M = series(rng, ctx, n, N).pad_to(N)
    arr = np.array(M.coeffs)
    arr[0] = invertible_constant(rng, ctx, n)
    return GaugeElement(MatSeries(ctx, 0, arr))


def rational_tau(rng: random.Random, ctx: FieldCtx, n: int) -> list[int]:
    return [rng.randrange(ctx.p) for _ in range(n)]


def diag(ctx: FieldCtx, vals) -> np.ndarray:
    n = len(vals)
    out = np.zeros((n, n, ctx.m), dtype=np.int64)
    for i, v in enumerate(vals):
        out[i, i] = v if isinstance(v, np.ndarray) else ctx.scalar_array(int(v))
    return out


def irrational_eigenvalues(rng: random.Random, ctx: FieldCtx, n: int) -> list[np.ndarray]:
    """Elements with zero 1-coordinate (zero rational part in the power basis)."""
    out = []
    for _ in range(n):
        c = np.array([0] + [rng.randrange(ctx.p) for _ in range(ctx.m - 1)], dtype=np.int64)
        out.append(c)
    return out


def connection_with_residue(rng, ctx, n, N, residue: np.ndarray, density=0.6) -> MatSeries:
    M = series(rng, ctx, n, N, density).pad_to(N)
    arr = np.array(M.coeffs)
    arr[0] = residue
    return MatSeries(ctx, 0, arr)


def weight(rng: random.Random, n: int, p: int, d: int) -> TameWeight:
    vals = [Fraction(rng.randrange(-d, 2 * d), d) for _ in range(n)]
    vals[0] = Fraction(1, d) if d > 1 else vals[0]
    return TameWeight(tuple(vals), p)


def parahoric_member(rng, ctx, theta: TameWeight, N: int, density=0.6) -> MatSeries:
    """Random element of p_theta(O) known mod z^N."""
    n = theta.n
    g = _np(rng)
    lo = min(entry_bound(theta, i, j) for i in range(n) for j in range(n))
    lo = min(lo, 0)
    arr = g.integers(0, ctx.p, size=(N - lo, n, n, ctx.m))
    arr = arr * (g.random((N - lo, n, n)) < density)[..., None]
    for i in range(n):
        for j in range(n):
            b = entry_bound(theta, i, j)
            arr[: max(b - lo, 0), i, j] = 0
    return MatSeries(ctx, lo, arr)


def k_valued_matrix(rng, ctx, theta: TameWeight, N: int, member: bool) -> MatSeries:
    """A K-valued matrix; members are built from an invertible Levi part."""
    n = theta.n
    g = _np(rng)
    lo = min(min(entry_bound(theta, i, j) for i in range(n) for j in range(n)), 0) - 1
    L = N - lo
    arr = g.integers(0, ctx.p, size=(L, n, n, ctx.m)) * (g.random((L, n, n)) < 0.5)[..., None]
    if member:
        for i in range(n):
            for j in range(n):
                arr[: max(entry_bound(theta, i, j) - lo, 0), i, j] = 0
        mask = np.array(
            [[(theta.entries[j] - theta.entries[i]).denominator == 1 for j in range(n)] for i in range(n)]
        )
        while True:
            levi = constant(rng, ctx, n) * mask[..., None]
            if not fplinalg.fq_det(fplinalg.to_objects(ctx, levi), ctx).is_zero():
                break
        for i in range(n):
            for j in range(n):
                if mask[i, j]:
                    arr[int(theta.entries[j] - theta.entries[i]) - lo, i, j] = levi[i, j]
    return MatSeries(ctx, lo, arr)
