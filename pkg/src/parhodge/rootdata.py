"""Type-A root data: tame weights, roots, gradings and valuation bounds."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

import numpy as np

from .errors import NotTame, ZeroInput
from .series import MatSeries


def _frac(x) -> Fraction:
    if isinstance(x, str):
        return Fraction(x.strip())
    return Fraction(x)


def ceil_frac(x: Fraction) -> int:
    return -((-x.numerator) // x.denominator)


@dataclass(frozen=True)
class TameWeight:
    """Rational cocharacter of the diagonal torus of GL_n."""

    entries: tuple[Fraction, ...]
    p: int | None = None

    def __post_init__(self):
        ent = tuple(_frac(x) for x in self.entries)
        object.__setattr__(self, "entries", ent)
        if self.p is not None and self.d % self.p == 0:
            raise NotTame(f"denominator {self.d} of {self} is divisible by p={self.p}")

    @classmethod
    def of(cls, values: Iterable, p: int | None = None) -> TameWeight:
        return cls(tuple(_frac(v) for v in values), p)

    @classmethod
    def zero(cls, n: int, p: int | None = None) -> TameWeight:
        return cls((Fraction(0),) * n, p)

    @property
    def n(self) -> int:
        return len(self.entries)

    @property
    def d(self) -> int:
        return math.lcm(*(x.denominator for x in self.entries)) if self.entries else 1

    def is_zero(self) -> bool:
        return all(x == 0 for x in self.entries)

    def is_integral(self) -> bool:
        return self.d == 1

    def scaled(self, c) -> tuple[Fraction, ...]:
        c = _frac(c)
        return tuple(c * x for x in self.entries)

    def integral_scaled(self, c: int) -> tuple[int, ...]:
        """The entries of c*theta, which must be integers."""
        out = []
        for x in self.scaled(c):
            if x.denominator != 1:
                raise ValueError(f"{c}*theta is not integral")
            out.append(int(x))
        return tuple(out)

    def __add__(self, other: TameWeight) -> TameWeight:
        return TameWeight(tuple(a + b for a, b in zip(self.entries, other.entries)), self.p or other.p)

    def __truediv__(self, c) -> TameWeight:
        c = _frac(c)
        return TameWeight(tuple(x / c for x in self.entries), None)

    def strings(self) -> list[str]:
        return [str(x) for x in self.entries]

    def __repr__(self):
        return "TameWeight(" + ", ".join(str(x) for x in self.entries) + ")"


@dataclass(frozen=True)
class Root:
    """alpha_ij(diag t) = t_i - t_j, root space E_ij; indices are 1-based."""

    i: int
    j: int

    def __post_init__(self):
        if self.i == self.j:
            raise ValueError("a root needs i != j")

    def __neg__(self) -> Root:
        return Root(self.j, self.i)


def pairing(theta: TameWeight, alpha: Root) -> Fraction:
    if not (1 <= alpha.i <= theta.n and 1 <= alpha.j <= theta.n):
        raise ValueError(f"{alpha} outside rank {theta.n}")
    return theta.entries[alpha.i - 1] - theta.entries[alpha.j - 1]


def m_alpha(theta: TameWeight, alpha: Root) -> int:
    return ceil_frac(-pairing(theta, alpha))


def entry_bound(theta: TameWeight, i: int, j: int) -> int:
    """Lowest allowed z-valuation of entry (i, j) (0-based) in p_theta(O)."""
    return ceil_frac(theta.entries[j] - theta.entries[i])


def level_masks(theta: TameWeight) -> dict[Fraction, np.ndarray]:
    n = theta.n
    out: dict[Fraction, np.ndarray] = {}
    for i in range(n):
        for j in range(n):
            lam = theta.entries[i] - theta.entries[j]
            mask = out.setdefault(lam, np.zeros((n, n), dtype=bool))
            mask[i, j] = True
    return dict(sorted(out.items()))


def grading_decompose(X, theta: TameWeight) -> dict[Fraction, np.ndarray]:
    """Split a constant matrix (array (n, n[, m]) or a constant MatSeries) by level."""
    if isinstance(X, MatSeries):
        if X.length and (X.val != 0 or X.length > 1 and X.coeffs[1:].any()):
            raise ValueError("grading_decompose expects a constant matrix")
        arr = X.coefficient(0) if X.prec > 0 else np.zeros((X.n, X.n, X.ctx.m), dtype=np.int64)
    else:
        arr = np.asarray(X)
    out = {}
    for lam, mask in level_masks(theta).items():
        sel = mask if arr.ndim == 2 else mask[:, :, None]
        comp = np.where(sel, arr, 0)
        if comp.any():
            out[lam] = comp
    return out


@dataclass
class LieCheckReport:
    member: bool
    violations: list[dict] = field(default_factory=list)

    def __bool__(self):
        return self.member


def parahoric_lie_check(X: MatSeries, theta: TameWeight) -> LieCheckReport:
    """Entrywise test val(X_ij) >= ceil(theta_j - theta_i)."""
    viol = []
    for i in range(X.n):
        for j in range(X.n):
            bound = entry_bound(theta, i, j)
            v = X.entry(i, j).valuation()
            if v is None:
                # zero to known precision: fine as long as precision reaches the bound
                if X.prec < bound:
                    viol.append({"entry": (i + 1, j + 1), "valuation": None, "bound": bound, "precision": X.prec})
                continue
            if v < bound:
                viol.append({"entry": (i + 1, j + 1), "valuation": v, "bound": bound})
    return LieCheckReport(not viol, viol)


def filtration_depth(X: MatSeries, theta: TameWeight) -> Fraction:
    best = None
    for i in range(X.n):
        for j in range(X.n):
            v = X.entry(i, j).valuation()
            if v is None:
                continue
            k = v + theta.entries[i] - theta.entries[j]
            best = k if best is None or k < best else best
    if best is None:
        raise ZeroInput("filtration depth of the zero matrix is undefined")
    return best
