"""Connections d + A dz/z, Higgs fields, gauge actions and p-curvature."""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Sequence

import numpy as np

from . import fplinalg
from .errors import CtxMismatch, NonDiagonalInput, PoleEscape, PrecisionExhausted, SingularGauge
from .ffield import FieldCtx, FieldElement, element_from_array
from .series import LaurentSeries, MatSeries, _det

DISC = "disc"
FROBENIUS_TWIST = "frobenius_twist"


@dataclass(frozen=True)
class TameConnection:
    """d + A dz/z.  ``k_valued`` marks a connection that acquired a pole
    after a K-valued gauge; ordinary constructors refuse such input."""

    A: MatSeries
    k_valued: bool = False

    def __post_init__(self):
        v = self.A.valuation()
        if v is not None and v < 0 and not self.k_valued:
            raise PoleEscape(f"connection matrix has a pole of order {-v}")

    @property
    def ctx(self) -> FieldCtx:
        return self.A.ctx

    @property
    def n(self) -> int:
        return self.A.n

    @property
    def N(self) -> int:
        return self.A.prec

    def residue(self) -> np.ndarray:
        return residue(self)

    def __eq__(self, other):
        return isinstance(other, TameConnection) and self.A == other.A and self.k_valued == other.k_valued


@dataclass(frozen=True)
class HiggsField:
    phi: MatSeries
    twist_tag: str = DISC

    def __post_init__(self):
        if self.twist_tag not in (DISC, FROBENIUS_TWIST):
            raise ValueError(f"unknown twist tag {self.twist_tag!r}")
        v = self.phi.valuation()
        if self.twist_tag == DISC and v is not None and v < 0:
            raise PoleEscape("Higgs field on the disc must have valuation >= 0")

    @property
    def ctx(self) -> FieldCtx:
        return self.phi.ctx

    def is_zero(self) -> bool:
        return self.phi.is_zero()


class GaugeElement:
    """An element of G(O), or of G(K) when ``k_valued`` is set.

    ``monomial`` holds integer exponents e when the element is diag(z^e);
    its action is then computed without series inversion.
    """

    __slots__ = ("g", "k_valued", "monomial", "_inv")

    def __init__(self, g: MatSeries, k_valued: bool = False, monomial: Sequence[int] | None = None, check=True):
        self.g = g
        self.k_valued = k_valued
        self.monomial = None if monomial is None else tuple(int(e) for e in monomial)
        self._inv = None
        if check and not k_valued:
            if g.val < 0 and g.length:
                raise SingularGauge("O-valued gauge has negative valuation")
            c0 = fplinalg.to_objects(g.ctx, g.coefficient(0))
            if fplinalg.fq_det(c0, g.ctx).is_zero():
                raise SingularGauge("g(0) is not invertible")

    @classmethod
    def identity(cls, ctx: FieldCtx, n: int, prec: int) -> GaugeElement:
        return cls(MatSeries.identity(ctx, n, prec), check=False)

    @classmethod
    def z_power(cls, ctx: FieldCtx, exps: Sequence[int], prec: int) -> GaugeElement:
        """diag(z^e_1, ..., z^e_n), known to relative precision ``prec``."""
        exps = [int(e) for e in exps]
        n = len(exps)
        lo = min(exps)
        terms = {}
        for i, e in enumerate(exps):
            mat = terms.setdefault(e, np.zeros((n, n), dtype=np.int64))
            mat[i, i] = 1
        g = MatSeries.from_terms(ctx, n, terms, lo + prec)
        integral_o = lo >= 0 and all(e == 0 for e in exps)
        return cls(g, k_valued=not integral_o, monomial=exps, check=False)

    @property
    def ctx(self) -> FieldCtx:
        return self.g.ctx

    @property
    def n(self) -> int:
        return self.g.n

    def inverse(self) -> GaugeElement:
        if self._inv is None:
            if self.monomial is not None:
                rel = self.g.prec - min(self.monomial)
                self._inv = GaugeElement.z_power(self.ctx, [-e for e in self.monomial], rel)
            else:
                self._inv = GaugeElement(self.g.inverse(), self.k_valued, check=False)
        return self._inv

    def __mul__(self, other: GaugeElement) -> GaugeElement:
        return GaugeElement(self.g * other.g, self.k_valued or other.k_valued, check=False)

    def __eq__(self, other):
        return isinstance(other, GaugeElement) and self.g == other.g

    def __repr__(self):
        kind = "K" if self.k_valued else "O"
        return f"GaugeElement[{kind}]({self.g!r})"


def _as_gauge(g) -> GaugeElement:
    return g if isinstance(g, GaugeElement) else GaugeElement(g)


def _as_matrix(A) -> MatSeries:
    if isinstance(A, TameConnection):
        return A.A
    if isinstance(A, HiggsField):
        return A.phi
    return A


def gauge_act(g, A) -> TameConnection:
    """B = z g' g^{-1} + g A g^{-1}."""
    g = _as_gauge(g)
    M = _as_matrix(A)
    if g.ctx != M.ctx:
        raise CtxMismatch(f"{g.ctx} vs {M.ctx}")
    if g.monomial is not None:
        B = M.conj_monomial(g.monomial)
        diag = np.zeros((M.n, M.n, M.ctx.m), dtype=np.int64)
        for i, e in enumerate(g.monomial):
            diag[i, i, 0] = e % M.ctx.p
        B = B + MatSeries.constant(M.ctx, diag, B.prec)
    else:
        ginv = g.inverse().g
        B = (g.g.zderiv() + g.g * M) * ginv
    v = B.valuation()
    if v is not None and v < 0 and not g.k_valued:
        raise PoleEscape("O-valued gauge produced a pole")
    return TameConnection(B, k_valued=v is not None and v < 0)


def adjoint_act(g, phi):
    """g phi g^{-1}; returns the same wrapper type as the input."""
    g = _as_gauge(g)
    M = _as_matrix(phi)
    if g.monomial is not None:
        out = M.conj_monomial(g.monomial)
    else:
        out = g.g * M * g.inverse().g
    if isinstance(phi, HiggsField):
        return HiggsField(out, phi.twist_tag)
    return out


def residue(A) -> np.ndarray:
    M = _as_matrix(A)
    return M.coefficient(0)


@dataclass(frozen=True)
class PCurvature:
    psi: MatSeries
    A: MatSeries

    def horizontality_defect(self) -> MatSeries:
        return horizontality_defect(self.A, self.psi)

    def is_horizontal(self) -> bool:
        return self.horizontality_defect().is_zero()

    def is_zero(self) -> bool:
        return self.psi.is_zero()


def horizontality_defect(A: MatSeries, psi: MatSeries) -> MatSeries:
    return psi.zderiv() + psi.commutator(A)


def p_curvature(A) -> PCurvature:
    """psi = B_p - A with B_1 = A and B_{k+1} = z B_k' + B_k A.

    Sections are row vectors, f -> z f' + f A, which is the convention under
    which ``gauge_act`` (z g' g^-1 + g A g^-1) is the change of frame; B_k is
    the matrix of the k-th power of the operator on the constant frame.
    Horizontality then reads z psi' + [psi, A] = 0.  No precision is lost.
    """
    M = _as_matrix(A)
    p = M.ctx.p
    if M.prec < p:
        raise PrecisionExhausted(f"p-curvature needs precision >= p = {p}, got {M.prec}")
    if M.val < 0 and M.length:
        raise PoleEscape("p-curvature is defined here for connections without poles")
    B = M
    for _ in range(p - 1):
        B = B.zderiv() + B * M
    return PCurvature(B - M, M)


@dataclass(frozen=True)
class HitchinInvariants:
    coeffs: tuple[LaurentSeries, ...]

    def __iter__(self):
        return iter(self.coeffs)

    def __len__(self):
        return len(self.coeffs)


def hitchin_invariants(M) -> HitchinInvariants:
    """c_k = sum of the principal k x k minors (elementary symmetric functions
    of the eigenvalues), so det(x - M) = sum (-1)^k c_k x^(n-k)."""
    M = _as_matrix(M)
    n = M.n
    ent = [[M.entry(i, j) for j in range(n)] for i in range(n)]
    out = []
    for k in range(1, n + 1):
        total = None
        for rows in combinations(range(n), k):
            minor = [[ent[r][c] for c in rows] for r in rows]
            d = _det(minor)
            total = d if total is None else total + d
        out.append(total)
    return HitchinInvariants(tuple(out))


def artin_schreier(s, ctx: FieldCtx | None = None) -> np.ndarray:
    """Entrywise x -> x^p - x on a diagonal constant matrix ((n, n, m) array
    or a square list of FieldElement)."""
    if isinstance(s, MatSeries):
        ctx, arr = s.ctx, s.coefficient(0)
    elif isinstance(s, np.ndarray):
        if ctx is None:
            raise ValueError("a FieldCtx is required for array input")
        arr = s
    else:
        ctx = s[0][0].ctx
        arr = fplinalg.from_objects(ctx, s)
    n = arr.shape[0]
    off = arr.copy()
    off[np.arange(n), np.arange(n)] = 0
    if off.any():
        raise NonDiagonalInput("artin_schreier expects a diagonal matrix")
    out = np.zeros_like(arr)
    for i in range(n):
        x = element_from_array(ctx, arr[i, i])
        out[i, i] = (x.frobenius() - x).array()
    return out


def diag_array(ctx: FieldCtx, values: Sequence) -> np.ndarray:
    """Diagonal (n, n, m) array from ints or FieldElements."""
    n = len(values)
    out = np.zeros((n, n, ctx.m), dtype=np.int64)
    for i, v in enumerate(values):
        out[i, i] = v.array() if isinstance(v, FieldElement) else ctx.scalar_array(int(v))
    return out
