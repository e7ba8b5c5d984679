"""Cyclic tame covers w^d = z and the parahoric/equivariant dictionary.

Objects downstairs carry a tame weight theta with denominator d.  On the
cover they become Gamma-equivariant after conjugation by Delta = w^(d theta),
where the generator of Gamma = mu_d acts by w -> zeta w and on the fibre
by rho = zeta^(d theta).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import fplinalg
from .connection import GaugeElement, gauge_act
from .errors import EquivarianceViolation, MembershipViolation, WildRamification
from .ffield import Embedding, FieldCtx, FieldElement, degree_with_roots_of_unity, embedding_into, primitive_root_of_unity
from .normalform import choose_theta_tau
from .rootdata import TameWeight, ceil_frac, entry_bound, parahoric_lie_check
from .series import MatSeries


@dataclass(frozen=True)
class CoverCtx:
    theta: TameWeight
    d: int
    emb: Embedding
    zeta: FieldElement
    rho: np.ndarray
    delta_exps: tuple[int, ...]

    @property
    def ctx(self) -> FieldCtx:
        return self.emb.dst

    @property
    def n(self) -> int:
        return self.theta.n

    def delta(self, prec: int) -> GaugeElement:
        return GaugeElement.z_power(self.ctx, self.delta_exps, prec)

    def blocks(self) -> list[list[int]]:
        """Index classes of the rho-eigenspaces (d theta_i mod d), in order of first index."""
        groups: dict[int, list[int]] = {}
        for i, e in enumerate(self.delta_exps):
            groups.setdefault(e % self.d, []).append(i)
        return sorted(groups.values(), key=lambda g: g[0])

    def theta_diag(self) -> np.ndarray:
        """diag(d theta_i mod p)."""
        n = self.n
        out = np.zeros((n, n, self.ctx.m), dtype=np.int64)
        for i, e in enumerate(self.delta_exps):
            out[i, i, 0] = e % self.ctx.p
        return out


def make_cover(theta: TameWeight, ctx: FieldCtx) -> CoverCtx:
    d = theta.d
    if d % ctx.p == 0:
        raise WildRamification(f"denominator {d} of theta is divisible by p={ctx.p}")
    emb = embedding_into(ctx, degree_with_roots_of_unity(ctx, d))
    F = emb.dst
    zeta = primitive_root_of_unity(F, d)
    exps = theta.integral_scaled(d)
    rho = np.zeros((theta.n, theta.n, F.m), dtype=np.int64)
    for i, e in enumerate(exps):
        rho[i, i] = (zeta**e).array()
    return CoverCtx(theta=theta, d=d, emb=emb, zeta=zeta, rho=rho, delta_exps=exps)


def _on_cover(M: MatSeries, cov: CoverCtx) -> MatSeries:
    if M.ctx == cov.ctx:
        return M
    return M.map_field(cov.emb)


# --------------------------------------------------------------------------
# equivariance


@dataclass
class EquivarianceReport:
    ok: bool
    violation: dict | None = None

    def __bool__(self):
        return self.ok


def check_gamma_equivariance(B: MatSeries, cov: CoverCtx) -> EquivarianceReport:
    """The w^j coefficient of entry (i, k) may be nonzero only if
    zeta^j = zeta^(d theta_i - d theta_k), i.e. j = d theta_i - d theta_k mod d."""
    d, ex = cov.d, cov.delta_exps
    if d == 1:
        return EquivarianceReport(True)
    n = B.n
    for t in range(B.length):
        j = B.val + t
        layer = B.coeffs[t]
        for i in range(n):
            for k in range(n):
                if layer[i, k].any() and (j - (ex[i] - ex[k])) % d:
                    return EquivarianceReport(False, {"exponent": j, "entry": (i + 1, k + 1)})
    return EquivarianceReport(True)


def _require_equivariant(B: MatSeries, cov: CoverCtx, stage: str):
    rep = check_gamma_equivariance(B, cov)
    if not rep.ok:
        v = rep.violation
        raise EquivarianceViolation(
            f"{stage}: entry {v['entry'][0]},{v['entry'][1]} has a w^{v['exponent']} term "
            f"of the wrong Gamma-type",
            v,
        )


def _require_member(A: MatSeries, theta: TameWeight, stage: str):
    rep = parahoric_lie_check(A, theta)
    if not rep.member:
        raise MembershipViolation(f"{stage}: input is not in the parahoric Lie algebra", rep.violations)


# --------------------------------------------------------------------------
# lifts and descents


def lift_connection(A: MatSeries, cov: CoverCtx) -> MatSeries:
    """B(w) = diag(d theta mod p) + Ad(w^(d theta)) (d A(w^d)): the gauge
    transform by Delta of the pullback d A(w^d) dw/w."""
    A = _on_cover(A, cov)
    _require_member(A, cov.theta, "lift_connection")
    pulled = A.substitute_power(cov.d).scale(cov.d)
    B = gauge_act(cov.delta(pulled.prec), pulled).A
    return B


def descend_connection(B: MatSeries, cov: CoverCtx) -> MatSeries:
    B = _on_cover(B, cov)
    _require_equivariant(B, cov, "descend_connection")
    inv = GaugeElement.z_power(cov.ctx, [-e for e in cov.delta_exps], B.prec)
    C = gauge_act(inv, B).A
    d_inv = cov.ctx(cov.d).inverse()
    return C.descend_support(cov.d).scale(d_inv)


def lift_higgs(phi: MatSeries, cov: CoverCtx) -> MatSeries:
    phi = _on_cover(phi, cov)
    _require_member(phi, cov.theta, "lift_higgs")
    return phi.substitute_power(cov.d).conj_monomial(cov.delta_exps)


def descend_higgs(phi_w: MatSeries, cov: CoverCtx) -> MatSeries:
    phi_w = _on_cover(phi_w, cov)
    _require_equivariant(phi_w, cov, "descend_higgs")
    return phi_w.conj_monomial([-e for e in cov.delta_exps]).descend_support(cov.d)


def lift_group(g: MatSeries, cov: CoverCtx) -> MatSeries:
    """h(w) = w^(d theta) g(w^d) w^(-d theta)."""
    return _on_cover(g, cov).substitute_power(cov.d).conj_monomial(cov.delta_exps)


def descend_group(h: MatSeries, cov: CoverCtx) -> MatSeries:
    h = _on_cover(h, cov)
    _require_equivariant(h, cov, "descend_group")
    return h.conj_monomial([-e for e in cov.delta_exps]).descend_support(cov.d)


# --------------------------------------------------------------------------
# group membership


@dataclass
class GroupCheckReport:
    member: bool
    violations: list = field(default_factory=list)
    method: str = ""

    def __bool__(self):
        return self.member


def _det_nonzero(ctx: FieldCtx, arr: np.ndarray) -> bool:
    return not fplinalg.fq_det(fplinalg.to_objects(ctx, arr), ctx).is_zero()


def parahoric_group_check(g: MatSeries, theta: TameWeight) -> GroupCheckReport:
    """Membership in P_theta(O) through the conjugated lift
    h = w^(d theta) g(w^d) w^(-d theta): h must lie in G(O_w)."""
    d = theta.d
    exps = theta.integral_scaled(d)
    h = g.substitute_power(d).conj_monomial(exps)
    viol = []
    v = h.valuation()
    if v is not None and v < 0:
        for i in range(h.n):
            for k in range(h.n):
                ev = h.entry(i, k).valuation()
                if ev is not None and ev < 0:
                    viol.append({"entry": (i + 1, k + 1), "valuation_w": ev})
        return GroupCheckReport(False, viol, "conjugation")
    if h.prec <= 0:
        return GroupCheckReport(False, [{"reason": "precision exhausted"}], "conjugation")
    if not _det_nonzero(g.ctx, h.coefficient(0)):
        return GroupCheckReport(False, [{"reason": "h(0) is singular"}], "conjugation")
    return GroupCheckReport(True, [], "conjugation")


def parahoric_group_check_bounds(g: MatSeries, theta: TameWeight) -> GroupCheckReport:
    """Independent test: val(g_ij) >= ceil(theta_j - theta_i) and the Levi
    part (coefficients at z^(theta_j - theta_i) for integral differences)
    is invertible."""
    n, ctx = g.n, g.ctx
    viol = []
    levi = np.zeros((n, n, ctx.m), dtype=np.int64)
    for i in range(n):
        for j in range(n):
            ent = g.entry(i, j)
            bound = entry_bound(theta, i, j)
            v = ent.valuation()
            if v is not None and v < bound:
                viol.append({"entry": (i + 1, j + 1), "valuation": v, "bound": bound})
            diff = theta.entries[j] - theta.entries[i]
            if diff.denominator == 1:
                e = int(diff)
                if e >= ent.prec:
                    viol.append({"entry": (i + 1, j + 1), "reason": "precision exhausted"})
                else:
                    levi[i, j] = ent.coefficient(e).array()
    if viol:
        return GroupCheckReport(False, viol, "bounds")
    if not _det_nonzero(ctx, levi):
        return GroupCheckReport(False, [{"reason": "Levi part is singular"}], "bounds")
    return GroupCheckReport(True, [], "bounds")


def combined_weight(theta: TameWeight, tau, p: int | None = None) -> TameWeight:
    p = p or theta.p
    if p is None:
        raise ValueError("p is required")
    if theta.d % p == 0:
        raise WildRamification(f"denominator of theta divisible by p={p}")
    th_tau = choose_theta_tau(tau, p)
    return TameWeight(tuple((a + b) / p for a, b in zip(theta.entries, th_tau.entries)))
