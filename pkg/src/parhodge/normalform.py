"""Residue decomposition and gauge normal forms for d + A dz/z.

The solver moves one coefficient at a time.  At step k the gauge
``I + y z^(k+1)`` changes the next coefficient to

    a_{k+1} + ((k+1) - ad(b_0)) y

so y is chosen to kill the part of a_{k+1} outside the generalised
(k+1 mod p)-eigenspace of ad(b_0).  Everything is linear over F_p once
ad(b_0) is written in the regular representation, which keeps the solver
inside the input field.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import fplinalg, kernels
from .connection import GaugeElement, TameConnection, gauge_act
from .errors import DepthViolation, MembershipViolation, NonRationalInput, NonTrivialRationalPart, SupportViolation
from .ffield import (
    Embedding,
    FieldCtx,
    FieldElement,
    charpoly,
    element_from_array,
    embedding_into,
    poly_roots,
    splitting_degree,
)
from .rootdata import TameWeight, filtration_depth, parahoric_lie_check
from .series import MatSeries


# --------------------------------------------------------------------------
# residue decomposition


@dataclass(frozen=True)
class JordanData:
    """Jordan data of a constant matrix after base change along ``emb``.

    ``conj @ s @ inv(conj)`` is diag(eigenvalues).
    """

    emb: Embedding
    s: np.ndarray
    nil: np.ndarray
    conj: np.ndarray
    conj_inv: np.ndarray
    eigenvalues: tuple[FieldElement, ...]

    @property
    def ctx(self) -> FieldCtx:
        return self.emb.dst


@dataclass(frozen=True)
class ResidueDecomposition:
    tau: np.ndarray
    sigma: np.ndarray
    nil: np.ndarray
    conj: np.ndarray
    emb: Embedding
    eigenvalues: tuple[FieldElement, ...]
    tau_diag: tuple[int, ...]
    splitting_basis: tuple[FieldElement, ...]

    @property
    def ctx(self) -> FieldCtx:
        return self.emb.dst

    def is_irrational(self) -> bool:
        return not any(self.tau_diag)


def _obj(ctx, arr):
    return fplinalg.to_objects(ctx, arr)


def _arr(ctx, mat):
    return fplinalg.from_objects(ctx, mat)


def splitting_embedding(a: np.ndarray, ctx: FieldCtx) -> Embedding:
    """Embedding of ``ctx`` into a field over which a's characteristic polynomial splits."""
    f = charpoly(_obj(ctx, a))
    return embedding_into(ctx, ctx.m * splitting_degree(f))


def _slot_matching(vecs: list) -> list[int]:
    """Assign each vector a slot where it has a nonzero entry (a perfect
    matching exists because the vectors form a basis).  Slots are served in
    order and vectors tried in order, so an already diagonal matrix keeps
    its eigenvalues in place."""
    k = len(vecs)
    owner: list[int | None] = [None] * k  # slot -> vector

    def augment(slot, seen):
        for c in range(k):
            if c in seen or vecs[c][slot].is_zero():
                continue
            seen.add(c)
            prev = owner.index(c) if c in owner else None
            if prev is None:
                owner[slot] = c
                return True
            owner[prev] = None
            if augment(prev, seen):
                owner[slot] = c
                return True
            owner[prev] = c
        return False

    for slot in range(k):
        if not augment(slot, set()):  # pragma: no cover - vectors form a basis
            raise ArithmeticError("eigenvectors do not span")
    return owner


def jordan_decompose(a: np.ndarray, ctx: FieldCtx, blocks: Sequence[Sequence[int]] | None = None) -> JordanData:
    """Jordan decomposition a = s + nil over the splitting field.

    With ``blocks`` (a partition of the indices such that a is block-diagonal
    for it), eigenvectors are taken inside each block and placed in that
    block's own index slots, so ``conj`` is block-diagonal too.
    """
    n = a.shape[0]
    emb = splitting_embedding(a, ctx)
    F = emb.dst
    ab = emb.map_array(a)
    if blocks is None:
        blocks = [list(range(n))]
    V = [[F.zero] * n for _ in range(n)]
    eig_of_slot: list[FieldElement | None] = [None] * n
    for blk in blocks:
        blk = sorted(blk)
        sub = _obj(F, ab[np.ix_(blk, blk)])
        k = len(blk)
        roots = poly_roots(charpoly(sub)) if k else []
        cols: list[tuple[FieldElement, list]] = []
        for lam, mult in roots:
            shifted = [[sub[i][j] - (lam if i == j else F.zero) for j in range(k)] for i in range(k)]
            P = fplinalg.fq_identity(k, F)
            for _ in range(k):
                P = fplinalg.fq_matmul(P, shifted, F)
            ker = fplinalg.fq_kernel(P, F)
            if len(ker) != mult:  # pragma: no cover - algebraic invariant
                raise ArithmeticError("generalised eigenspace has the wrong dimension")
            cols.extend((lam, v) for v in ker)
        order = _slot_matching([v for _, v in cols])
        for r, slot in enumerate(blk):
            lam, v = cols[order[r]]
            eig_of_slot[slot] = lam
            for t, idx in enumerate(blk):
                V[idx][slot] = v[t]
    Vinv = fplinalg.fq_inverse(V, F)
    D = [[eig_of_slot[i] if i == j else F.zero for j in range(n)] for i in range(n)]
    s = fplinalg.fq_matmul(fplinalg.fq_matmul(V, D, F), Vinv, F)
    s_arr = _arr(F, s)
    return JordanData(
        emb=emb,
        s=s_arr,
        nil=(ab - s_arr) % F.p,
        conj=_arr(F, Vinv),
        conj_inv=_arr(F, V),
        eigenvalues=tuple(eig_of_slot),
    )


def rational_split(jd: JordanData) -> tuple[np.ndarray, np.ndarray, tuple[int, ...]]:
    """Split the semisimple part as tau + sigma (both in the original frame).

    The rational part of an eigenvalue is its coefficient of 1 in the
    splitting basis of the extension."""
    F = jd.ctx
    n = len(jd.eigenvalues)
    rat = tuple(jd.emb.rational_part(lam) for lam in jd.eigenvalues)
    V, Vinv = _obj(F, jd.conj_inv), _obj(F, jd.conj)
    T = [[F(rat[i]) if i == j else F.zero for j in range(n)] for i in range(n)]
    tau = _arr(F, fplinalg.fq_matmul(fplinalg.fq_matmul(V, T, F), Vinv, F))
    sigma = (jd.s - tau) % F.p
    return tau, sigma, rat


def residue_decomposition(a: np.ndarray, ctx: FieldCtx, blocks=None) -> ResidueDecomposition:
    jd = jordan_decompose(a, ctx, blocks)
    tau, sigma, rat = rational_split(jd)
    return ResidueDecomposition(
        tau=tau,
        sigma=sigma,
        nil=jd.nil,
        conj=jd.conj,
        emb=jd.emb,
        eigenvalues=jd.eigenvalues,
        tau_diag=rat,
        splitting_basis=tuple(jd.emb.splitting_basis()),
    )


# --------------------------------------------------------------------------
# ad(b0) in the regular representation


def ad_matrix(ctx: FieldCtx, b0: np.ndarray) -> np.ndarray:
    """F_p matrix of Y -> b0 Y - Y b0 on flattened (n, n, m) coordinates."""
    n, m = b0.shape[0], ctx.m
    K = n * n * m
    E = np.eye(K, dtype=np.int64).reshape(K, n, n, m)
    img = kernels.const_left(b0, E, ctx.red, ctx.p) - kernels.const_right(E, b0, ctx.red, ctx.p)
    return (img.reshape(K, K).T) % ctx.p


class _EigenSolver:
    """Caches M_r = (r - L + P_r)^{-1} (I - P_r) for L = ad(b0)."""

    def __init__(self, ctx: FieldCtx, b0: np.ndarray):
        self.ctx = ctx
        self.L = ad_matrix(ctx, b0)
        self._cache: dict[int, np.ndarray] = {}

    def projector(self, r: int) -> np.ndarray:
        p = self.ctx.p
        K = self.L.shape[0]
        shifted = (self.L - r * np.eye(K, dtype=np.int64)) % p
        P0, _ = fplinalg.fitting_split(shifted, p)
        return P0

    def solve_matrix(self, r: int) -> np.ndarray:
        if r not in self._cache:
            p = self.ctx.p
            K = self.L.shape[0]
            eye = np.eye(K, dtype=np.int64)
            P = self.projector(r)
            op = (r * eye - self.L + P) % p
            self._cache[r] = fplinalg.matmul(fplinalg.inverse(op, p), (eye - P) % p, p)
        return self._cache[r]


def _unipotent_step(ctx: FieldCtx, y: np.ndarray, e: int, N: int):
    """g = I + y z^e and its exact inverse sum (-y)^j z^(je), both mod z^N."""
    n = y.shape[0]
    g = np.zeros((N, n, n, ctx.m), dtype=np.int64)
    g[0, np.arange(n), np.arange(n), 0] = 1
    g[e] = y
    ginv = np.zeros_like(g)
    cur = np.zeros((n, n, ctx.m), dtype=np.int64)
    cur[np.arange(n), np.arange(n), 0] = 1
    neg = (-y) % ctx.p
    for j in range(0, N, e):
        ginv[j] = cur
        cur = kernels.matmul_series(cur[None], neg[None], ctx.red, ctx.p)[0]
    return MatSeries(ctx, 0, g, normalize=False), MatSeries(ctx, 0, ginv, normalize=False)


def build_gauge_step(X: MatSeries, k, theta: TameWeight | None = None) -> GaugeElement:
    """g = I + X for X of filtration depth >= k > 0.

    Ad(g) agrees with id + ad(X) up to terms of depth >= 2k.
    """
    if k <= 0:
        raise DepthViolation(f"step depth must be positive, got {k}")
    theta = theta if theta is not None else TameWeight.zero(X.n)
    if not X.is_zero() and filtration_depth(X, theta) < k:
        raise DepthViolation(f"X has depth {filtration_depth(X, theta)} < {k}")
    g = MatSeries.identity(X.ctx, X.n, X.prec) + X
    v = g.valuation()
    return GaugeElement(g, k_valued=v is not None and v < 0)


# --------------------------------------------------------------------------
# standard form


@dataclass
class StandardFormResult:
    B: TameConnection
    g: GaugeElement
    A: TameConnection
    blocks: list | None = None
    _decomposition: ResidueDecomposition | None = field(default=None, repr=False)

    @property
    def decomposition(self) -> ResidueDecomposition:
        if self._decomposition is None:
            self._decomposition = residue_decomposition(self.B.A.coefficient(0), self.B.ctx, self.blocks)
        return self._decomposition

    def verify(self) -> bool:
        return verify_certificate(self.A, self.g, self.B) and eigenspace_certificate(self.B)


def _as_conn(A) -> TameConnection:
    return A if isinstance(A, TameConnection) else TameConnection(A)


def member_connection(A) -> TameConnection:
    """Elements of p_theta(O) may have poles when theta spreads by more than 1."""
    if isinstance(A, TameConnection):
        return A
    v = A.valuation()
    return TameConnection(A, k_valued=v is not None and v < 0)


def standard_form(A, blocks=None) -> StandardFormResult:
    A = _as_conn(A)
    ctx, n, N = A.ctx, A.n, A.N
    if N < 1:
        raise ValueError("standard form needs precision >= 1")
    cur = A.A.pad_to(N)
    b0 = cur.coefficient(0)
    solver = _EigenSolver(ctx, b0)
    G = MatSeries.identity(ctx, n, N)
    p = ctx.p
    for k in range(N - 1):
        e = k + 1
        a = cur.coefficient(e).reshape(-1)
        if not a.any():
            continue
        y = (-(solver.solve_matrix(e % p) @ a)) % p
        if not y.any():
            continue
        y = y.reshape(n, n, ctx.m)
        g, ginv = _unipotent_step(ctx, y, e, N)
        zg = np.zeros((N, n, n, ctx.m), dtype=np.int64)
        zg[e] = (y * (e % p)) % p
        # z g' g^{-1} + g A g^{-1}
        cur = ((MatSeries(ctx, 0, zg, normalize=False) + g * cur) * ginv).pad_to(N)
        G = (g * G).pad_to(N)
    B = TameConnection(MatSeries(ctx, 0, cur.coeffs))
    gauge = GaugeElement(MatSeries(ctx, 0, G.coeffs), check=False)
    return StandardFormResult(B=B, g=gauge, A=A, blocks=blocks)


def verify_certificate(A, g: GaugeElement, B) -> bool:
    """B = g * A, checked through the inverse-free identity B g = z g' + g A."""
    A, B = _as_conn(A).A, _as_conn(B).A
    lhs = B * g.g
    rhs = g.g.zderiv() + g.g * A
    prec = min(lhs.prec, rhs.prec, B.prec)
    return lhs.agrees(rhs, prec)


def eigenspace_certificate(B, report: bool = False):
    """(ad(b0) - i)^(n^2) b_i = 0 for every computed coefficient b_i."""
    M = _as_conn(B).A
    ctx, n = M.ctx, M.n
    b0 = M.coefficient(0)
    L = ad_matrix(ctx, b0)
    K = L.shape[0]
    p = ctx.p
    pows: dict[int, np.ndarray] = {}
    bad = []
    for i in range(max(M.val, 0), M.prec):
        bi = M.coefficient(i).reshape(-1)
        if not bi.any():
            continue
        r = i % p
        if r not in pows:
            pows[r] = fplinalg.matpow((L - r * np.eye(K, dtype=np.int64)) % p, n * n, p)
        if (pows[r] @ bi % p).any():
            bad.append(i)
            if not report:
                return False
    return bad if report else True


def is_standard_form(B) -> bool:
    return eigenspace_certificate(B)


def standard_form_irrational(A) -> StandardFormResult:
    A = _as_conn(A)
    dec = residue_decomposition(A.residue(), A.ctx)
    if not dec.is_irrational():
        raise NonTrivialRationalPart(f"residue has rational part diag{dec.tau_diag}", dec.tau_diag)
    res = standard_form(A)
    res._decomposition = dec
    check_twist_support(res.B.A, res.B.ctx.p)
    return res


def check_twist_support(M: MatSeries, p: int) -> None:
    """Raise SupportViolation unless every nonzero coefficient sits at a multiple of p."""
    M.descend_support(p)


# --------------------------------------------------------------------------
# rational part


def choose_theta_tau(tau, p: int | None = None) -> TameWeight:
    """Integral weight lifting a rational diagonal residue: canonical
    representatives in [0, p) of the diagonal entries."""
    vals = _tau_values(tau, p)
    return TameWeight.of(vals)


def _tau_values(tau, p: int | None) -> list[int]:
    if isinstance(tau, np.ndarray):
        n = tau.shape[0]
        if tau.ndim == 3:
            off = tau.copy()
            off[np.arange(n), np.arange(n)] = 0
            if off.any():
                raise NonRationalInput("tau must be diagonal")
            if tau[np.arange(n), np.arange(n), 1:].any():
                raise NonRationalInput("tau must have entries in F_p")
            return [int(x) for x in tau[np.arange(n), np.arange(n), 0]]
        if tau.ndim == 2:
            off = tau.copy()
            off[np.arange(n), np.arange(n)] = 0
            if off.any():
                raise NonRationalInput("tau must be diagonal")
            tau = list(np.diag(tau))
        else:
            tau = list(tau)
    out = []
    for x in tau:
        if isinstance(x, FieldElement):
            if not x.in_prime_field():
                raise NonRationalInput(f"{x} is not in F_p")
            out.append(int(x.coords[0]))
        else:
            out.append(int(x) % p if p else int(x))
    return out


def tau_array(ctx: FieldCtx, vals: Sequence[int]) -> np.ndarray:
    n = len(vals)
    out = np.zeros((n, n, ctx.m), dtype=np.int64)
    for i, v in enumerate(vals):
        out[i, i, 0] = int(v) % ctx.p
    return out


def twist_out_rational(B, tau) -> MatSeries:
    """C = Ad(z^-theta_tau)(B - tau); raises SupportViolation off the p-lattice."""
    M = _as_conn(B).A
    vals = _tau_values(tau, M.ctx.p)
    theta = choose_theta_tau(vals, M.ctx.p).integral_scaled(1)
    C = gauge_act(GaugeElement.z_power(M.ctx, [-t for t in theta], M.prec), M).A
    check_twist_support(C, M.ctx.p)
    return C


# --------------------------------------------------------------------------
# parahoric version


@dataclass
class ParahoricStandardForm:
    B: TameConnection
    g: GaugeElement
    A: TameConnection
    theta: TameWeight
    cover_result: StandardFormResult
    cover: object

    def verify(self) -> bool:
        from .covers import parahoric_group_check

        return (
            verify_certificate(self.A, self.g, self.B)
            and self.cover_result.verify()
            and parahoric_group_check(self.g.g, self.theta).member
        )


def standard_form_parahoric(A, theta: TameWeight) -> ParahoricStandardForm:
    """Standard form for A in p_theta(O), computed equivariantly on the
    cyclic cover and brought back down with a gauge in P_theta(O)."""
    from . import covers

    A = member_connection(A)
    rep = parahoric_lie_check(A.A, theta)
    if not rep.member:
        raise MembershipViolation("input is not in the parahoric Lie algebra", rep.violations)
    cov = covers.make_cover(theta, A.ctx)
    A_ext = A.A.map_field(cov.emb)
    Bw = covers.lift_connection(A_ext, cov)
    res = standard_form(Bw, blocks=cov.blocks())
    g_down = covers.descend_group(res.g.g, cov)
    g_el = GaugeElement(g_down, k_valued=True, check=False)
    B_down = gauge_act(g_el, A_ext)
    return ParahoricStandardForm(
        B=B_down,
        g=g_el,
        A=TameConnection(A_ext, k_valued=A.k_valued),
        theta=theta,
        cover_result=res,
        cover=cov,
    )
