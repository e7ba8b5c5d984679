"""Finite fields F_{p^m} in a power basis, polynomials over them, and embeddings.

Elements are stored as coordinate tuples ``(c_0, ..., c_{m-1})`` meaning
``sum c_i u^i`` where ``u`` is the class of ``x`` modulo the chosen modulus.
Bulk arithmetic on arrays of coordinates lives in :mod:`parhodge.kernels`; the
classes here serve scalar work (pivots, eigenvalues, roots of unity).
"""
from __future__ import annotations

import os
import random
from functools import lru_cache
from math import gcd
from typing import Iterable, Sequence

import numpy as np
from sympy import isprime
from sympy.polys.domains import ZZ
from sympy.polys.galoistools import gf_irreducible_p

from .errors import CtxMismatch, DivisionByZero, ExtensionTooLarge, InvalidField

DEFAULT_MAX_DEGREE = 12


def max_extension_degree() -> int:
    env = os.environ.get("PARHODGE_MAX_M")
    return int(env) if env else DEFAULT_MAX_DEGREE


def is_irreducible_mod_p(coeffs: Sequence[int], p: int) -> bool:
    """Irreducibility of a polynomial over F_p given low-to-high coefficients."""
    f = [int(c) % p for c in coeffs][::-1]
    while f and f[0] == 0:
        f = f[1:]
    if len(f) < 2:
        return False
    return bool(gf_irreducible_p(f, p, ZZ))


class FieldCtx:
    """The field F_p[x]/(modulus), with ``modulus`` monic of degree ``m``."""

    __slots__ = ("p", "m", "modulus", "q", "red", "redl", "_key", "_zero", "_one")

    def __init__(self, p: int, m: int = 1, modulus: Sequence[int] | None = None, check: bool = True):
        p, m = int(p), int(m)
        if modulus is None:
            if m != 1:
                raise InvalidField("a modulus is required for m > 1")
            modulus = (0, 1)
        modulus = tuple(int(c) % p for c in modulus)
        if check:
            if not isprime(p):
                raise InvalidField(f"p={p} is not prime")
            if m < 1 or len(modulus) != m + 1 or modulus[-1] != 1:
                raise InvalidField(f"modulus {list(modulus)} is not monic of degree {m}")
            if not is_irreducible_mod_p(modulus, p):
                raise InvalidField(f"modulus {list(modulus)} is reducible over F_{p}")
        self.p = p
        self.m = m
        self.modulus = modulus
        self.q = p**m
        self.red = self._reduction_table()
        self.redl = [tuple(int(v) for v in row) for row in self.red]
        self._key = (p, modulus)
        self._zero = FieldElement(self, (0,) * m)
        self._one = FieldElement(self, (1,) + (0,) * (m - 1))

    def _reduction_table(self) -> np.ndarray:
        p, m = self.p, self.m
        red = np.zeros((2 * m - 1, m), dtype=np.int64)
        cur = [0] * m
        cur[0] = 1
        for e in range(2 * m - 1):
            red[e] = cur
            # multiply cur by u
            top = cur[-1]
            cur = [0] + cur[:-1]
            if top:
                cur = [(c - top * self.modulus[i]) % p for i, c in enumerate(cur)]
        return red

    def __eq__(self, other):
        return isinstance(other, FieldCtx) and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __repr__(self):
        if self.m == 1:
            return f"GF({self.p})"
        return f"GF({self.p}^{self.m}, modulus={list(self.modulus)})"

    @property
    def zero(self) -> FieldElement:
        return self._zero

    @property
    def one(self) -> FieldElement:
        return self._one

    @property
    def gen(self) -> FieldElement:
        if self.m == 1:
            return self(-self.modulus[0])
        return FieldElement(self, (0, 1) + (0,) * (self.m - 2))

    def __call__(self, x) -> FieldElement:
        if isinstance(x, FieldElement):
            if x.ctx != self:
                raise CtxMismatch(f"{x.ctx} vs {self}")
            return x
        if isinstance(x, (int, np.integer)):
            return FieldElement(self, (int(x) % self.p,) + (0,) * (self.m - 1))
        coords = tuple(int(c) % self.p for c in x)
        if len(coords) != self.m:
            raise InvalidField(f"expected {self.m} coordinates, got {len(coords)}")
        return FieldElement(self, coords)

    def from_index(self, k: int) -> FieldElement:
        """Element whose base-p digits (low first) are its coordinates."""
        coords = []
        for _ in range(self.m):
            k, r = divmod(k, self.p)
            coords.append(r)
        return FieldElement(self, tuple(coords))

    def elements(self) -> Iterable[FieldElement]:
        for k in range(self.q):
            yield self.from_index(k)

    def random(self, rng: random.Random) -> FieldElement:
        return FieldElement(self, tuple(rng.randrange(self.p) for _ in range(self.m)))

    def zeros(self, *shape: int) -> np.ndarray:
        return np.zeros(shape + (self.m,), dtype=np.int64)

    def scalar_array(self, k: int) -> np.ndarray:
        out = np.zeros(self.m, dtype=np.int64)
        out[0] = int(k) % self.p
        return out


class FieldElement:
    __slots__ = ("ctx", "coords")

    def __init__(self, ctx: FieldCtx, coords: tuple):
        self.ctx = ctx
        self.coords = coords

    # -- helpers
    def _other(self, other) -> FieldElement:
        if isinstance(other, FieldElement):
            if other.ctx != self.ctx:
                raise CtxMismatch(f"{self.ctx} vs {other.ctx}")
            return other
        if isinstance(other, (int, np.integer)):
            return self.ctx(int(other))
        return NotImplemented

    def __add__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        p = self.ctx.p
        return FieldElement(self.ctx, tuple((a + b) % p for a, b in zip(self.coords, o.coords)))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        p = self.ctx.p
        return FieldElement(self.ctx, tuple((a - b) % p for a, b in zip(self.coords, o.coords)))

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        p = self.ctx.p
        return FieldElement(self.ctx, tuple((-a) % p for a in self.coords))

    def __mul__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        ctx = self.ctx
        p, m = ctx.p, ctx.m
        if m == 1:
            return FieldElement(ctx, ((self.coords[0] * o.coords[0]) % p,))
        acc = [0] * (2 * m - 1)
        for i, a in enumerate(self.coords):
            if a:
                for j, b in enumerate(o.coords):
                    if b:
                        acc[i + j] += a * b
        out = [0] * m
        red = ctx.redl
        for e, v in enumerate(acc):
            if v:
                row = red[e]
                for c in range(m):
                    out[c] += v * row[c]
        return FieldElement(ctx, tuple(c % p for c in out))

    __rmul__ = __mul__

    def __pow__(self, k: int):
        k = int(k)
        if k < 0:
            return self.inverse() ** (-k)
        result = self.ctx.one
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def inverse(self) -> FieldElement:
        if self.is_zero():
            raise DivisionByZero("inverse of zero in " + repr(self.ctx))
        if self.ctx.m == 1:
            return FieldElement(self.ctx, (pow(self.coords[0], -1, self.ctx.p),))
        return self ** (self.ctx.q - 2)

    def __truediv__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        return self.ctx(other) * self.inverse()

    def frobenius(self) -> FieldElement:
        return self ** self.ctx.p

    pow_p = frobenius

    def is_zero(self) -> bool:
        return not any(self.coords)

    def __bool__(self):
        return not self.is_zero()

    def in_prime_field(self) -> bool:
        return not any(self.coords[1:])

    def __eq__(self, other):
        if isinstance(other, (int, np.integer)):
            other = self.ctx(int(other))
        return isinstance(other, FieldElement) and other.ctx == self.ctx and other.coords == self.coords

    def __hash__(self):
        return hash((self.ctx, self.coords))

    def index(self) -> int:
        """Integer with base-p digits equal to the coordinates; the fixed total order."""
        k = 0
        for c in reversed(self.coords):
            k = k * self.ctx.p + c
        return k

    def __lt__(self, other):
        return self.index() < other.index()

    def array(self) -> np.ndarray:
        return np.array(self.coords, dtype=np.int64)

    def __repr__(self):
        if self.ctx.m == 1:
            return str(self.coords[0])
        terms = []
        for i, c in enumerate(self.coords):
            if c == 0:
                continue
            mono = "" if i == 0 else ("u" if i == 1 else f"u^{i}")
            if not mono:
                terms.append(str(c))
            elif c == 1:
                terms.append(mono)
            else:
                terms.append(f"{c}*{mono}")
        return " + ".join(terms) if terms else "0"


def element_from_array(ctx: FieldCtx, arr) -> FieldElement:
    return FieldElement(ctx, tuple(int(c) % ctx.p for c in arr))


# --------------------------------------------------------------------------
# polynomials over F_q, lists of FieldElement low-to-high


def poly_trim(f: list) -> list:
    f = list(f)
    while f and f[-1].is_zero():
        f.pop()
    return f


def poly_add(f: list, g: list) -> list:
    n = max(len(f), len(g))
    out = []
    for i in range(n):
        if i < len(f) and i < len(g):
            out.append(f[i] + g[i])
        elif i < len(f):
            out.append(f[i])
        else:
            out.append(g[i])
    return poly_trim(out)


def poly_sub(f: list, g: list) -> list:
    return poly_add(f, [-c for c in g])


def poly_mul(f: list, g: list) -> list:
    if not f or not g:
        return []
    ctx = f[0].ctx
    out = [ctx.zero] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if a.is_zero():
            continue
        for j, b in enumerate(g):
            out[i + j] = out[i + j] + a * b
    return poly_trim(out)


def poly_divmod(f: list, g: list) -> tuple[list, list]:
    g = poly_trim(g)
    if not g:
        raise DivisionByZero("polynomial division by zero")
    f = poly_trim(f)
    if len(f) < len(g):
        return [], f
    ctx = g[0].ctx
    lead_inv = g[-1].inverse()
    rem = list(f)
    quot = [ctx.zero] * (len(f) - len(g) + 1)
    for k in range(len(f) - len(g), -1, -1):
        c = rem[k + len(g) - 1] * lead_inv
        quot[k] = c
        if c.is_zero():
            continue
        for j, b in enumerate(g):
            rem[k + j] = rem[k + j] - c * b
    return poly_trim(quot), poly_trim(rem[: len(g) - 1])


def poly_mod(f: list, g: list) -> list:
    return poly_divmod(f, g)[1]


def poly_monic(f: list) -> list:
    f = poly_trim(f)
    if not f:
        return f
    inv = f[-1].inverse()
    return [c * inv for c in f]


def poly_gcd(f: list, g: list) -> list:
    f, g = poly_trim(f), poly_trim(g)
    while g:
        f, g = g, poly_mod(f, g)
    return poly_monic(f)


def poly_powmod(f: list, e: int, mod: list) -> list:
    result = [mod[0].ctx.one]
    base = poly_mod(f, mod)
    while e:
        if e & 1:
            result = poly_mod(poly_mul(result, base), mod)
        base = poly_mod(poly_mul(base, base), mod)
        e >>= 1
    return result


def poly_eval(f: list, x: FieldElement) -> FieldElement:
    acc = x.ctx.zero
    for c in reversed(f):
        acc = acc * x + c
    return acc


def _x(ctx: FieldCtx) -> list:
    return [ctx.zero, ctx.one]


def splitting_degree(f: list) -> int:
    """Smallest L such that ``f`` splits into linear factors over F_{q^L}."""
    f = poly_monic(f)
    n = len(f) - 1
    if n <= 1:
        return 1
    ctx = f[0].ctx
    X = _x(ctx)
    frob = X
    L = 0
    while True:
        L += 1
        frob = poly_powmod(frob, ctx.q, f)
        h = poly_sub(frob, X)
        # every root lies in F_{q^L} iff f | (x^{q^L} - x)^n
        if not h or not poly_powmod(h, n, f):
            return L


def _split_squarefree(g: list, rng: random.Random) -> list:
    """Roots of a monic squarefree polynomial that splits into distinct linear factors."""
    g = poly_monic(g)
    deg = len(g) - 1
    if deg <= 0:
        return []
    ctx = g[0].ctx
    if deg == 1:
        return [-g[0]]
    while True:
        a = ctx.random(rng)
        if ctx.p == 2:
            # trace map Tr(a x) = sum_{i<m} (a x)^{2^i}
            t = [ctx.zero, a]
            acc = list(t)
            cur = t
            for _ in range(ctx.m - 1):
                cur = poly_mod(poly_mul(cur, cur), g)
                acc = poly_add(acc, cur)
            h = poly_gcd(g, acc)
        else:
            base = [a, ctx.one]
            w = poly_powmod(base, (ctx.q - 1) // 2, g)
            h = poly_gcd(g, poly_sub(w, [ctx.one]))
        if 0 < len(h) - 1 < deg:
            other = poly_divmod(g, h)[0]
            return _split_squarefree(h, rng) + _split_squarefree(other, rng)


def poly_roots(f: list) -> list[tuple[FieldElement, int]]:
    """Roots in the coefficient field with multiplicities, sorted by the fixed order."""
    f = poly_monic(f)
    if len(f) <= 1:
        return []
    ctx = f[0].ctx
    X = _x(ctx)
    xq = poly_powmod(X, ctx.q, f)
    g = poly_gcd(f, poly_sub(xq, X))
    rng = random.Random(0x5EED)
    roots = sorted(_split_squarefree(g, rng), key=FieldElement.index)
    out = []
    for r in roots:
        mult = 0
        lin = [-r, ctx.one]
        h = f
        while True:
            qt, rem = poly_divmod(h, lin)
            if rem:
                break
            mult += 1
            h = qt
        out.append((r, mult))
    return out


def charpoly(mat: list[list[FieldElement]]) -> list:
    """Characteristic polynomial det(x I - M), via the Hessenberg reduction."""
    n = len(mat)
    ctx = mat[0][0].ctx
    H = [list(row) for row in mat]
    # reduce to upper Hessenberg by similarity
    for j in range(n - 2):
        piv = None
        for i in range(j + 1, n):
            if not H[i][j].is_zero():
                piv = i
                break
        if piv is None:
            continue
        if piv != j + 1:
            H[piv], H[j + 1] = H[j + 1], H[piv]
            for r in range(n):
                H[r][piv], H[r][j + 1] = H[r][j + 1], H[r][piv]
        inv = H[j + 1][j].inverse()
        for i in range(j + 2, n):
            f = H[i][j] * inv
            if f.is_zero():
                continue
            for c in range(n):
                H[i][c] = H[i][c] - f * H[j + 1][c]
            for r in range(n):
                H[r][j + 1] = H[r][j + 1] + f * H[r][i]
    polys = [[ctx.one]]
    for k in range(1, n + 1):
        # p_k = (x - h_kk) p_{k-1} - sum_{i<k} h_ik * prod h_{j,j-1} * p_{i-1}
        pk = poly_mul([-H[k - 1][k - 1], ctx.one], polys[k - 1])
        prod = ctx.one
        for i in range(k - 1, 0, -1):
            prod = prod * H[i][i - 1]
            coeff = H[i - 1][k - 1] * prod
            if not coeff.is_zero():
                pk = poly_sub(pk, [coeff * c for c in polys[i - 1]])
        polys.append(pk)
    res = polys[n]
    return res + [ctx.zero] * (n + 1 - len(res))


# --------------------------------------------------------------------------
# canonical extensions and embeddings


@lru_cache(maxsize=None)
def canonical_field(p: int, M: int) -> FieldCtx:
    """The field of degree M over F_p using the first irreducible monic modulus
    in base-p order of its lower coefficients."""
    if M == 1:
        return FieldCtx(p, 1, (0, 1))
    for k in range(p**M):
        low = []
        t = k
        for _ in range(M):
            t, r = divmod(t, p)
            low.append(r)
        if low[0] == 0:
            continue
        coeffs = tuple(low) + (1,)
        if is_irreducible_mod_p(coeffs, p):
            return FieldCtx(p, M, coeffs, check=False)
    raise InvalidField(f"no irreducible polynomial of degree {M} over F_{p}")  # pragma: no cover


class Embedding:
    """An F_p-linear field embedding src -> dst given by a coordinate matrix.

    ``matrix`` has shape (dst.m, src.m); column ``a`` is the image of ``u^a``.
    """

    def __init__(self, src: FieldCtx, dst: FieldCtx, matrix: np.ndarray):
        self.src = src
        self.dst = dst
        self.matrix = np.asarray(matrix, dtype=np.int64) % src.p
        self._rational = None

    @classmethod
    def identity(cls, ctx: FieldCtx) -> Embedding:
        return cls(ctx, ctx, np.eye(ctx.m, dtype=np.int64))

    @property
    def is_identity(self) -> bool:
        return self.src == self.dst

    def map_array(self, arr: np.ndarray) -> np.ndarray:
        if self.is_identity:
            return np.asarray(arr, dtype=np.int64)
        return (np.asarray(arr, dtype=np.int64) @ self.matrix.T) % self.src.p

    def __call__(self, x: FieldElement) -> FieldElement:
        return element_from_array(self.dst, self.map_array(x.array()))

    def compose(self, inner: Embedding) -> Embedding:
        """``self ∘ inner``."""
        if inner.dst != self.src:
            raise CtxMismatch("embeddings do not compose")
        return Embedding(inner.src, self.dst, (self.matrix @ inner.matrix) % self.src.p)

    def splitting_basis(self) -> list[FieldElement]:
        """The F_p-basis {ι(u^a)·y^b} of dst; its first member is 1."""
        dst, src = self.dst, self.src
        L = dst.m // src.m
        y = dst.gen if dst.m > 1 else dst.one
        basis = []
        yb = dst.one
        for _ in range(L):
            for a in range(src.m):
                ua = np.zeros(src.m, dtype=np.int64)
                ua[a] = 1
                basis.append(element_from_array(dst, self.map_array(ua)) * yb)
            yb = yb * y
        return basis

    def rational_functional(self) -> np.ndarray:
        """Row vector r with r·coords(x) = coefficient of 1 in the splitting basis."""
        if self._rational is None:
            from . import fplinalg

            basis = self.splitting_basis()
            B = np.array([b.coords for b in basis], dtype=np.int64).T
            Binv = fplinalg.inverse(B, self.dst.p)
            self._rational = Binv[0]
        return self._rational

    def rational_part(self, x: FieldElement) -> int:
        return int(self.rational_functional() @ x.array()) % self.dst.p


def embedding_into(src: FieldCtx, M: int) -> Embedding:
    """Embed ``src`` into the canonical field of degree M (M multiple of src.m)."""
    if M % src.m:
        raise InvalidField(f"degree {M} is not a multiple of {src.m}")
    if M == src.m:
        return Embedding.identity(src)
    cap = max_extension_degree()
    if M > cap:
        raise ExtensionTooLarge(f"extension degree {M} exceeds the cap {cap} (PARHODGE_MAX_M)")
    dst = canonical_field(src.p, M)
    if src.m == 1:
        mat = np.zeros((M, 1), dtype=np.int64)
        mat[0, 0] = 1
        return Embedding(src, dst, mat)
    modpoly = [dst(c) for c in src.modulus]
    roots = poly_roots(modpoly)
    r = roots[0][0]
    cols = []
    cur = dst.one
    for _ in range(src.m):
        cols.append(cur.coords)
        cur = cur * r
    return Embedding(src, dst, np.array(cols, dtype=np.int64).T)


def primitive_root_of_unity(ctx: FieldCtx, d: int) -> FieldElement | None:
    """Minimal primitive d-th root of unity in ``ctx`` under the fixed order, or None."""
    if (ctx.q - 1) % d:
        return None
    if d == 1:
        return ctx.one
    f = [-ctx.one] + [ctx.zero] * (d - 1) + [ctx.one]
    primes = [q for q in range(2, d + 1) if d % q == 0 and isprime(q)]
    for r, _ in poly_roots(f):
        if all(r ** (d // q) != ctx.one for q in primes):
            return r
    return None  # pragma: no cover


def degree_with_roots_of_unity(ctx: FieldCtx, d: int) -> int:
    """Smallest multiple M of ctx.m with d | p^M - 1."""
    if gcd(d, ctx.p) != 1:
        raise InvalidField("d must be prime to p")
    L = 1
    while (ctx.p ** (ctx.m * L) - 1) % d:
        L += 1
    return ctx.m * L
