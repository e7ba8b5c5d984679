"""Truncated power series, Laurent series and matrix series over F_{p^m}.

Precision model: a series is ``z^val * (c_0 + c_1 z + ... + c_{L-1} z^{L-1}) + O(z^prec)``
with ``prec = val + L``.  ``prec`` is the absolute precision; every operation
returns the precision it can guarantee.  A zero series known modulo ``z^prec``
is stored with ``L = 0`` and ``val = prec`` once normalised.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Iterable

import numpy as np

from . import kernels
from .errors import CtxMismatch, DivisionByZero, PrecisionExhausted, SupportViolation
from .ffield import Embedding, FieldCtx, FieldElement, element_from_array


def _check_ctx(a, b):
    if a.ctx != b.ctx:
        raise CtxMismatch(f"{a.ctx} vs {b.ctx}")


def _scalar_coords(ctx: FieldCtx, c) -> np.ndarray:
    if isinstance(c, FieldElement):
        if c.ctx != ctx:
            raise CtxMismatch(f"{c.ctx} vs {ctx}")
        return c.array()
    return ctx.scalar_array(int(c))


def _exponent_scalars(ctx: FieldCtx, exps: np.ndarray) -> np.ndarray:
    """Integer exponents reduced to F_p, as coordinate arrays."""
    out = np.zeros(exps.shape + (ctx.m,), dtype=np.int64)
    out[..., 0] = np.mod(exps, ctx.p)
    return out


# --------------------------------------------------------------------------
# scalar series


class TruncSeries:
    """An element of O = k[[z]] modulo z^N."""

    __slots__ = ("ctx", "coeffs")

    def __init__(self, ctx: FieldCtx, coeffs):
        self.ctx = ctx
        arr = np.asarray(coeffs, dtype=np.int64) % ctx.p
        if arr.ndim == 1 and ctx.m == 1:
            arr = arr.reshape(-1, 1)
        self.coeffs = arr

    @property
    def N(self) -> int:
        return self.coeffs.shape[0]

    @classmethod
    def from_ints(cls, ctx: FieldCtx, values: Iterable[int], N: int) -> TruncSeries:
        arr = np.zeros((N, ctx.m), dtype=np.int64)
        for j, v in enumerate(values):
            if j < N:
                arr[j, 0] = v
        return cls(ctx, arr)

    def laurent(self) -> LaurentSeries:
        return LaurentSeries(self.ctx, 0, self.coeffs)

    def __add__(self, other):
        return (self.laurent() + other.laurent()).truncated_body()

    def __sub__(self, other):
        return (self.laurent() - other.laurent()).truncated_body()

    def __mul__(self, other):
        return (self.laurent() * other.laurent()).truncated_body()

    def inverse(self) -> TruncSeries:
        if not self.coeffs[:1].any():
            raise DivisionByZero("series with zero constant term is not a unit in O")
        return self.laurent().inverse().truncated_body()

    def zderiv(self) -> TruncSeries:
        return self.laurent().zderiv().truncated_body()

    def __eq__(self, other):
        return isinstance(other, TruncSeries) and self.ctx == other.ctx and np.array_equal(self.coeffs, other.coeffs)

    def __repr__(self):
        return f"TruncSeries({self.laurent()!r})"


class LaurentSeries:
    """An element of K = k((z)) known modulo z^prec; normalised on construction."""

    __slots__ = ("ctx", "val", "coeffs")

    def __init__(self, ctx: FieldCtx, val: int, coeffs, normalize: bool = True):
        arr = np.asarray(coeffs, dtype=np.int64)
        if arr.ndim == 1:
            arr = arr.reshape(-1, ctx.m) if ctx.m > 1 else arr.reshape(-1, 1)
        arr = arr % ctx.p
        val = int(val)
        if normalize:
            nz = np.nonzero(arr.any(axis=1))[0]
            if nz.size == 0:
                val, arr = val + arr.shape[0], arr[:0]
            elif nz[0] > 0:
                val, arr = val + int(nz[0]), arr[int(nz[0]):]
        self.ctx = ctx
        self.val = val
        self.coeffs = arr

    @property
    def prec(self) -> int:
        return self.val + self.coeffs.shape[0]

    @property
    def body(self) -> TruncSeries:
        return TruncSeries(self.ctx, self.coeffs)

    @classmethod
    def zero(cls, ctx: FieldCtx, prec: int) -> LaurentSeries:
        return cls(ctx, prec, np.zeros((0, ctx.m), dtype=np.int64))

    @classmethod
    def monomial(cls, ctx: FieldCtx, c, exponent: int, prec: int) -> LaurentSeries:
        arr = np.zeros((max(prec - exponent, 0), ctx.m), dtype=np.int64)
        if arr.shape[0]:
            arr[0] = _scalar_coords(ctx, c)
        return cls(ctx, exponent, arr)

    @classmethod
    def from_dict(cls, ctx: FieldCtx, terms: dict, prec: int) -> LaurentSeries:
        lo = min(list(terms) + [prec])
        arr = np.zeros((prec - lo, ctx.m), dtype=np.int64)
        for e, c in terms.items():
            if e < prec:
                arr[e - lo] = (arr[e - lo] + _scalar_coords(ctx, c)) % ctx.p
        return cls(ctx, lo, arr)

    def is_zero(self) -> bool:
        return self.coeffs.shape[0] == 0 or not self.coeffs.any()

    def valuation(self) -> int | None:
        """Exponent of the first nonzero coefficient, or None for the zero series."""
        return None if self.is_zero() else self.val

    def coefficient(self, e: int) -> FieldElement:
        if e >= self.prec:
            raise PrecisionExhausted(f"coefficient z^{e} beyond precision {self.prec}")
        if e < self.val:
            return self.ctx.zero
        return element_from_array(self.ctx, self.coeffs[e - self.val])

    def terms(self) -> dict[int, FieldElement]:
        return {self.val + j: element_from_array(self.ctx, c) for j, c in enumerate(self.coeffs) if c.any()}

    def _aligned(self, other: LaurentSeries):
        _check_ctx(self, other)
        lo = min(self.val, other.val)
        hi = min(self.prec, other.prec)
        a = np.zeros((max(hi - lo, 0), self.ctx.m), dtype=np.int64)
        b = np.zeros_like(a)
        for src, dst in ((self, a), (other, b)):
            k = min(src.coeffs.shape[0], hi - src.val)
            if k > 0:
                dst[src.val - lo : src.val - lo + k] = src.coeffs[:k]
        return lo, a, b

    def __add__(self, other):
        lo, a, b = self._aligned(other)
        return LaurentSeries(self.ctx, lo, a + b)

    def __sub__(self, other):
        lo, a, b = self._aligned(other)
        return LaurentSeries(self.ctx, lo, a - b)

    def __neg__(self):
        return LaurentSeries(self.ctx, self.val, -self.coeffs)

    def __mul__(self, other):
        if isinstance(other, (int, FieldElement)):
            c = _scalar_coords(self.ctx, other)
            return LaurentSeries(self.ctx, self.val, kernels.field_mul(self.coeffs, c, self.ctx.red, self.ctx.p))
        _check_ctx(self, other)
        L = min(self.coeffs.shape[0], other.coeffs.shape[0])
        m = self.ctx.m
        a = self.coeffs[:L].reshape(L, 1, 1, m)
        b = other.coeffs[:L].reshape(L, 1, 1, m)
        prod = kernels.matmul_series(a, b, self.ctx.red, self.ctx.p).reshape(L, m)
        return LaurentSeries(self.ctx, self.val + other.val, prod)

    __rmul__ = __mul__

    def inverse(self) -> LaurentSeries:
        if self.is_zero():
            raise DivisionByZero("inverse of a zero series")
        L = self.coeffs.shape[0]
        m = MatSeries(self.ctx, 0, self.coeffs.reshape(L, 1, 1, -1))
        inv = m.inverse()
        return LaurentSeries(self.ctx, inv.val - self.val, inv.coeffs.reshape(inv.coeffs.shape[0], self.ctx.m))

    def __truediv__(self, other):
        return self * other.inverse()

    def zderiv(self) -> LaurentSeries:
        """z d/dz: the coefficient of z^j is multiplied by j mod p."""
        L = self.coeffs.shape[0]
        exps = np.arange(self.val, self.val + L)
        s = _exponent_scalars(self.ctx, exps)
        return LaurentSeries(self.ctx, self.val, kernels.field_mul(self.coeffs, s, self.ctx.red, self.ctx.p))

    def truncate(self, prec: int) -> LaurentSeries:
        if prec > self.prec:
            raise PrecisionExhausted(f"cannot raise precision {self.prec} to {prec}")
        k = max(prec - self.val, 0)
        return LaurentSeries(self.ctx, min(self.val, prec), self.coeffs[:k])

    def truncated_body(self) -> TruncSeries:
        """View as an element of O modulo z^prec (requires val >= 0)."""
        if self.val < 0:
            raise PrecisionExhausted("series has a pole")
        N = self.prec
        arr = np.zeros((max(N, 0), self.ctx.m), dtype=np.int64)
        arr[self.val : N] = self.coeffs
        return TruncSeries(self.ctx, arr)

    def substitute_power(self, d: int) -> LaurentSeries:
        return substitute_power(self, d)

    def descend_support(self, d: int) -> LaurentSeries:
        return descend_support(self, d)

    def map_field(self, emb: Embedding) -> LaurentSeries:
        return LaurentSeries(emb.dst, self.val, emb.map_array(self.coeffs))

    def __eq__(self, other):
        if not isinstance(other, LaurentSeries) or self.ctx != other.ctx or self.prec != other.prec:
            return False
        lo, a, b = self._aligned(other)
        return np.array_equal(a, b)

    def agrees(self, other: LaurentSeries, prec: int | None = None) -> bool:
        lo, a, b = self._aligned(other)
        if prec is not None:
            a, b = a[: max(prec - lo, 0)], b[: max(prec - lo, 0)]
        return np.array_equal(a, b)

    def __hash__(self):
        return hash((self.ctx, self.val, self.coeffs.tobytes()))

    def __repr__(self):
        parts = []
        for e, c in sorted(self.terms().items()):
            parts.append(f"({c})*z^{e}")
        body = " + ".join(parts) if parts else "0"
        return f"{body} + O(z^{self.prec})"


def substitute_power(f, d: int):
    """f(z) -> f(w^d); works for LaurentSeries and MatSeries."""
    d = int(d)
    if d < 1:
        raise ValueError("d must be positive")
    if isinstance(f, MatSeries):
        return f.substitute_power(d)
    L = f.coeffs.shape[0]
    # prec scales to d * prec; the top d-1 slots past the last coefficient are known zeros
    arr = np.zeros((d * L, f.ctx.m), dtype=np.int64)
    arr[::d] = f.coeffs
    return LaurentSeries(f.ctx, d * f.val, arr, normalize=False)


def descend_support(f, d: int):
    """Inverse of :func:`substitute_power`: requires support on the d-lattice."""
    d = int(d)
    if isinstance(f, MatSeries):
        return f.descend_support(d)
    terms_bad = [f.val + j for j, c in enumerate(f.coeffs) if c.any() and (f.val + j) % d]
    if terms_bad:
        raise SupportViolation(f"nonzero coefficient at exponent {terms_bad[0]} not divisible by {d}", terms_bad[0])
    lo = -((-f.val) // d)  # ceil(val / d)
    hi = -((-f.prec) // d)  # ceil(prec / d)
    arr = np.zeros((max(hi - lo, 0), f.ctx.m), dtype=np.int64)
    for j in range(lo, hi):
        e = d * j
        if f.val <= e < f.prec:
            arr[j - lo] = f.coeffs[e - f.val]
    return LaurentSeries(f.ctx, lo, arr)


# --------------------------------------------------------------------------
# matrix series


class MatSeries:
    """An n x n matrix over K modulo z^prec, sharing one valuation offset.

    ``coeffs`` has shape (L, n, n, m): the coefficient of z^(val + t) is
    ``coeffs[t]``.
    """

    __slots__ = ("ctx", "val", "coeffs")

    def __init__(self, ctx: FieldCtx, val: int, coeffs, normalize: bool = True):
        arr = np.asarray(coeffs, dtype=np.int64) % ctx.p
        if arr.ndim != 4 or arr.shape[3] != ctx.m:
            raise ValueError(f"coefficient array must have shape (L, n, n, {ctx.m}), got {arr.shape}")
        val = int(val)
        if normalize and arr.shape[0]:
            nz = np.nonzero(arr.reshape(arr.shape[0], -1).any(axis=1))[0]
            if nz.size == 0:
                val, arr = val + arr.shape[0], arr[:0]
            elif nz[0] > 0:
                val, arr = val + int(nz[0]), arr[int(nz[0]):]
        arr.flags.writeable = False
        self.ctx = ctx
        self.val = val
        self.coeffs = arr

    # -- constructors
    @classmethod
    def zeros(cls, ctx: FieldCtx, n: int, prec: int) -> MatSeries:
        return cls(ctx, prec, np.zeros((0, n, n, ctx.m), dtype=np.int64))

    @classmethod
    def constant(cls, ctx: FieldCtx, mat, prec: int) -> MatSeries:
        mat = np.asarray(mat, dtype=np.int64)
        if mat.ndim == 2:
            mat = np.stack([mat % ctx.p] + [np.zeros_like(mat)] * (ctx.m - 1), axis=-1)
        n = mat.shape[0]
        arr = np.zeros((max(prec, 0), n, n, ctx.m), dtype=np.int64)
        if prec > 0:
            arr[0] = mat
        return cls(ctx, 0, arr)

    @classmethod
    def identity(cls, ctx: FieldCtx, n: int, prec: int) -> MatSeries:
        eye = np.zeros((n, n, ctx.m), dtype=np.int64)
        eye[np.arange(n), np.arange(n), 0] = 1
        return cls.constant(ctx, eye, prec)

    @classmethod
    def from_terms(cls, ctx: FieldCtx, n: int, terms: dict, prec: int) -> MatSeries:
        """``terms`` maps exponent -> n x n integer / coordinate matrix."""
        lo = min(list(terms) + [prec])
        arr = np.zeros((prec - lo, n, n, ctx.m), dtype=np.int64)
        for e, mat in terms.items():
            if e >= prec:
                continue
            mat = np.asarray(mat, dtype=np.int64)
            if mat.ndim == 2:
                arr[e - lo, :, :, 0] += mat
            else:
                arr[e - lo] += mat
        return cls(ctx, lo, arr)

    @classmethod
    def from_entries(cls, ctx: FieldCtx, entries: list[list[LaurentSeries]]) -> MatSeries:
        n = len(entries)
        lo = min(e.val for row in entries for e in row)
        hi = min(e.prec for row in entries for e in row)
        lo = min(lo, hi)
        arr = np.zeros((hi - lo, n, n, ctx.m), dtype=np.int64)
        for i, row in enumerate(entries):
            for j, e in enumerate(row):
                k = min(e.coeffs.shape[0], hi - e.val)
                if k > 0:
                    arr[e.val - lo : e.val - lo + k, i, j] = e.coeffs[:k]
        return cls(ctx, lo, arr)

    # -- basic properties
    @property
    def n(self) -> int:
        return self.coeffs.shape[1]

    @property
    def length(self) -> int:
        return self.coeffs.shape[0]

    @property
    def prec(self) -> int:
        return self.val + self.coeffs.shape[0]

    def is_zero(self) -> bool:
        return not self.coeffs.any()

    def valuation(self) -> int | None:
        if self.is_zero():
            return None
        nz = np.nonzero(self.coeffs.reshape(self.length, -1).any(axis=1))[0]
        return self.val + int(nz[0])

    def entry(self, i: int, j: int) -> LaurentSeries:
        return LaurentSeries(self.ctx, self.val, self.coeffs[:, i, j])

    def coefficient(self, e: int) -> np.ndarray:
        """Coefficient matrix of z^e as an (n, n, m) array."""
        if e >= self.prec:
            raise PrecisionExhausted(f"coefficient z^{e} beyond precision {self.prec}")
        if e < self.val:
            return np.zeros((self.n, self.n, self.ctx.m), dtype=np.int64)
        return np.array(self.coeffs[e - self.val])

    def dense(self, lo: int, hi: int) -> np.ndarray:
        """Coefficients for exponents lo..hi-1 (hi <= prec) as an array."""
        if hi > self.prec:
            raise PrecisionExhausted(f"exponent {hi - 1} beyond precision {self.prec}")
        out = np.zeros((max(hi - lo, 0), self.n, self.n, self.ctx.m), dtype=np.int64)
        a, b = max(lo, self.val), hi
        if b > a:
            out[a - lo : b - lo] = self.coeffs[a - self.val : b - self.val]
        return out

    def entry_valuations(self) -> list[list[int | None]]:
        out = []
        for i in range(self.n):
            row = []
            for j in range(self.n):
                row.append(self.entry(i, j).valuation())
            out.append(row)
        return out

    # -- arithmetic
    def _aligned(self, other: MatSeries):
        _check_ctx(self, other)
        lo = min(self.val, other.val)
        hi = min(self.prec, other.prec)
        lo = min(lo, hi)
        return lo, self.dense(lo, hi), other.dense(lo, hi)

    def __add__(self, other):
        lo, a, b = self._aligned(other)
        return MatSeries(self.ctx, lo, a + b)

    def __sub__(self, other):
        lo, a, b = self._aligned(other)
        return MatSeries(self.ctx, lo, a - b)

    def __neg__(self):
        return MatSeries(self.ctx, self.val, -self.coeffs)

    def scale(self, c) -> MatSeries:
        s = _scalar_coords(self.ctx, c)
        return MatSeries(self.ctx, self.val, kernels.field_mul(self.coeffs, s, self.ctx.red, self.ctx.p))

    def __mul__(self, other):
        if isinstance(other, (int, np.integer, FieldElement)):
            return self.scale(other)
        _check_ctx(self, other)
        L = min(self.length, other.length)
        prod = kernels.matmul_series(self.coeffs[:L], other.coeffs[:L], self.ctx.red, self.ctx.p)
        return MatSeries(self.ctx, self.val + other.val, prod)

    def __rmul__(self, other):
        if isinstance(other, (int, np.integer, FieldElement)):
            return self.scale(other)
        return NotImplemented

    def __matmul__(self, other):
        return self.__mul__(other)

    def left_const(self, c: np.ndarray) -> MatSeries:
        return MatSeries(self.ctx, self.val, kernels.const_left(c, self.coeffs, self.ctx.red, self.ctx.p))

    def right_const(self, c: np.ndarray) -> MatSeries:
        return MatSeries(self.ctx, self.val, kernels.const_right(self.coeffs, c, self.ctx.red, self.ctx.p))

    def commutator(self, other: MatSeries) -> MatSeries:
        return self * other - other * self

    def zderiv(self) -> MatSeries:
        exps = np.arange(self.val, self.prec)
        s = _exponent_scalars(self.ctx, exps).reshape(-1, 1, 1, self.ctx.m)
        return MatSeries(self.ctx, self.val, kernels.field_mul(self.coeffs, s, self.ctx.red, self.ctx.p))

    def shift(self, k: int) -> MatSeries:
        """Multiply by z^k."""
        return MatSeries(self.ctx, self.val + int(k), self.coeffs, normalize=False)

    def truncate(self, prec: int) -> MatSeries:
        if prec > self.prec:
            raise PrecisionExhausted(f"cannot raise precision {self.prec} to {prec}")
        if prec <= self.val:
            return MatSeries.zeros(self.ctx, self.n, prec)
        return MatSeries(self.ctx, self.val, self.coeffs[: prec - self.val])

    def with_min_val(self, lo: int) -> MatSeries:
        """Same series, stored from exponent ``lo`` (<= val) onward."""
        if lo > self.val:
            raise ValueError("lo must not exceed val")
        return MatSeries(self.ctx, lo, self.dense(lo, self.prec), normalize=False)

    def transpose(self) -> MatSeries:
        return MatSeries(self.ctx, self.val, np.swapaxes(self.coeffs, 1, 2))

    def conj_monomial(self, exps) -> MatSeries:
        """Ad(z^e)(X): entry (i, j) is multiplied by z^(e_i - e_j); e integral."""
        e = [int(x) for x in exps]
        n = self.n
        shifts = np.array([[e[i] - e[j] for j in range(n)] for i in range(n)], dtype=np.int64)
        if self.length == 0:
            return MatSeries.zeros(self.ctx, n, self.prec + int(shifts.min()))
        smin = int(shifts.min())
        L = self.length
        arr = np.zeros((L, n, n, self.ctx.m), dtype=np.int64)
        for i in range(n):
            for j in range(n):
                off = int(shifts[i, j]) - smin
                if off < L:
                    arr[off:, i, j] = self.coeffs[: L - off, i, j]
        return MatSeries(self.ctx, self.val + smin, arr)

    def inverse(self) -> MatSeries:
        """Inverse in GL_n(K).  Newton iteration when the leading coefficient
        is invertible, adjugate over determinant otherwise."""
        from . import fplinalg

        if self.length == 0:
            raise DivisionByZero("inverse of a zero matrix series")
        ctx, n = self.ctx, self.n
        c0 = fplinalg.to_objects(ctx, np.asarray(self.coeffs[0]))
        if not fplinalg.fq_det(c0, ctx).is_zero():
            inv0 = fplinalg.from_objects(ctx, fplinalg.fq_inverse(c0, ctx))
            L = self.length
            h = MatSeries(ctx, 0, self.coeffs, normalize=False)
            X = MatSeries(ctx, 0, inv0.reshape(1, n, n, ctx.m), normalize=False)
            eye = MatSeries.identity(ctx, n, L)
            cur = 1
            while cur < L:
                cur = min(2 * cur, L)
                Xp = X.pad_to(cur)
                hp = h.truncate(cur)
                X = Xp + Xp * (eye.truncate(cur) - hp * Xp)
                X = X.pad_to(cur)
            return MatSeries(ctx, -self.val, X.dense(0, L))
        det = self.det()
        if det.is_zero():
            raise DivisionByZero("matrix series is singular at this precision")
        dinv = det.inverse()
        adj = self.adjugate()
        ent = [[adj.entry(i, j) * dinv for j in range(n)] for i in range(n)]
        return MatSeries.from_entries(ctx, ent)

    def pad_to(self, prec: int) -> MatSeries:
        """Re-store with val 0 and exactly ``prec`` coefficients (val >= 0 required;
        coefficients beyond the known precision are NOT implied)."""
        arr = np.zeros((prec, self.n, self.n, self.ctx.m), dtype=np.int64)
        hi = min(prec, self.prec)
        if hi > self.val:
            arr[self.val : hi] = self.coeffs[: hi - self.val]
        return MatSeries(self.ctx, 0, arr, normalize=False)

    def det(self) -> LaurentSeries:
        ent = [[self.entry(i, j) for j in range(self.n)] for i in range(self.n)]
        return _det(ent)

    def adjugate(self) -> MatSeries:
        n = self.n
        ent = [[self.entry(i, j) for j in range(n)] for i in range(n)]
        if n == 1:
            return MatSeries.identity(self.ctx, 1, ent[0][0].prec - ent[0][0].val)
        out = [[None] * n for _ in range(n)]
        for i in range(n):
            for j in range(n):
                minor = [[ent[r][c] for c in range(n) if c != j] for r in range(n) if r != i]
                d = _det(minor)
                out[j][i] = d if (i + j) % 2 == 0 else -d
        return MatSeries.from_entries(self.ctx, out)

    def substitute_power(self, d: int) -> MatSeries:
        L = self.length
        n = self.n
        arr = np.zeros((d * L, n, n, self.ctx.m), dtype=np.int64)
        arr[::d] = self.coeffs
        return MatSeries(self.ctx, d * self.val, arr, normalize=False)

    def descend_support(self, d: int) -> MatSeries:
        bad = []
        for t in range(self.length):
            e = self.val + t
            if e % d and self.coeffs[t].any():
                i, j = map(int, np.argwhere(self.coeffs[t].any(axis=-1))[0])
                bad.append((e, (i, j)))
                break
        if bad:
            e, ij = bad[0]
            raise SupportViolation(
                f"entry {ij[0] + 1},{ij[1] + 1}: nonzero coefficient at exponent {e} not divisible by {d}", e, ij
            )
        lo = -((-self.val) // d)
        hi = -((-self.prec) // d)
        if hi <= lo:
            return MatSeries.zeros(self.ctx, self.n, hi)
        arr = self.dense(d * lo, self.prec)[::d][: hi - lo]
        return MatSeries(self.ctx, lo, arr)

    def map_field(self, emb: Embedding) -> MatSeries:
        if emb.src != self.ctx:
            raise CtxMismatch("embedding source does not match")
        return MatSeries(emb.dst, self.val, emb.map_array(self.coeffs), normalize=False)

    # -- comparisons
    def __eq__(self, other):
        if not isinstance(other, MatSeries) or self.ctx != other.ctx or self.prec != other.prec or self.n != other.n:
            return False
        _, a, b = self._aligned(other)
        return np.array_equal(a, b)

    def __hash__(self):
        return hash((self.ctx, self.prec, self.normalized_bytes()))

    def normalized_bytes(self) -> bytes:
        return MatSeries(self.ctx, self.val, self.coeffs).coeffs.tobytes()

    def agrees(self, other: MatSeries, prec: int | None = None) -> bool:
        """Equality of all coefficients below ``prec`` (default: common precision)."""
        _check_ctx(self, other)
        hi = min(self.prec, other.prec) if prec is None else prec
        if prec is not None and (prec > self.prec or prec > other.prec):
            raise PrecisionExhausted(f"comparison at {prec} exceeds known precision")
        lo = min(self.val, other.val, hi)
        return np.array_equal(self.dense(lo, hi), other.dense(lo, hi))

    def __repr__(self):
        rows = []
        for i in range(self.n):
            rows.append("[" + ", ".join(repr(self.entry(i, j)) for j in range(self.n)) + "]")
        return "MatSeries(\n  " + "\n  ".join(rows) + "\n)"


def _det(ent: list[list[LaurentSeries]]) -> LaurentSeries:
    n = len(ent)
    if n == 1:
        return ent[0][0]
    if n == 2:
        return ent[0][0] * ent[1][1] - ent[0][1] * ent[1][0]
    total = None
    for j in range(n):
        minor = [[ent[r][c] for c in range(n) if c != j] for r in range(1, n)]
        term = ent[0][j] * _det(minor)
        if j % 2:
            term = -term
        total = term if total is None else total + term
    return total


def weight_fraction(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)
