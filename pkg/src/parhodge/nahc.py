"""Local nonabelian Hodge pipelines with replayable gauge certificates.

Connection side -> Higgs side:

1. base change to a field where the residue splits (and, for a parahoric
   weight, lift to the cyclic cover);
2. standard form;
3. constant conjugation putting the semisimple residue on the diagonal;
4. twist by z^(-theta_tau), which removes the rational part and leaves a
   series in z^p;
5. descend z^p -> z'.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import covers, fplinalg
from .connection import (
    FROBENIUS_TWIST,
    GaugeElement,
    HiggsField,
    TameConnection,
    gauge_act,
    p_curvature,
)
from .errors import MembershipViolation, RationalResidueInHiggs, SupportViolation
from .ffield import Embedding, FieldCtx
from .normalform import (
    choose_theta_tau,
    jordan_decompose,
    member_connection,
    rational_split,
    residue_decomposition,
    standard_form,
    standard_form_irrational,
    tau_array,
)
from .rootdata import TameWeight, parahoric_lie_check
from .series import MatSeries


@dataclass
class CertStep:
    label: str
    gauge: GaugeElement

    def apply(self, A: MatSeries) -> MatSeries:
        return gauge_act(self.gauge, A).A


@dataclass
class NahcResult:
    tau: tuple[int, ...]
    theta_tau: TameWeight
    phi: HiggsField
    target_weight: TameWeight
    theta: TameWeight
    source: MatSeries  # input after base change (and lift, if any)
    steps: list[CertStep] = field(default_factory=list)
    twisted: MatSeries | None = None
    cover: covers.CoverCtx | None = None
    emb: Embedding | None = None

    @property
    def ctx(self) -> FieldCtx:
        return self.phi.ctx

    def replay(self) -> bool:
        """Re-run the gauge chain on ``source`` and compare with phi pulled back."""
        cur = self.source
        for st in self.steps:
            cur = st.apply(cur)
        if self.twisted is not None and not cur.agrees(self.twisted):
            return False
        d = self.cover.d if self.cover is not None else 1
        back = self.phi.phi.substitute_power(cur.ctx.p * d)
        prec = min(cur.prec, back.prec)
        return cur.agrees(back, prec)

    def total_gauge(self) -> GaugeElement:
        g = None
        for st in self.steps:
            g = st.gauge if g is None else st.gauge * g
        return g


def _as_conn(A) -> TameConnection:
    return A if isinstance(A, TameConnection) else TameConnection(A)


def locsys_to_higgs_irr(A) -> HiggsField:
    A = _as_conn(A)
    res = standard_form_irrational(A)
    phi = res.B.A.descend_support(A.ctx.p)
    return HiggsField(phi, FROBENIUS_TWIST)


def _constant_gauge(ctx: FieldCtx, mat: np.ndarray, prec: int) -> GaugeElement:
    return GaugeElement(MatSeries.constant(ctx, mat, prec), check=False)


def locsys_to_higgs_tau(A) -> NahcResult:
    A = _as_conn(A)
    ctx = A.ctx
    n = A.n
    emb = residue_decomposition(A.residue(), ctx).emb
    src = A.A.map_field(emb)
    F = emb.dst
    sf = standard_form(TameConnection(src))
    jd = jordan_decompose(sf.B.A.coefficient(0), F)
    _, _, rat = rational_split(jd)
    steps = [CertStep("standard_form", sf.g), CertStep("diagonalize", _constant_gauge(F, jd.conj, src.prec))]
    B2 = steps[1].apply(sf.B.A)
    th = choose_theta_tau(rat, F.p)
    ints = th.integral_scaled(1)
    twist = GaugeElement.z_power(F, [-t for t in ints], B2.prec)
    steps.append(CertStep("twist", twist))
    C = gauge_act(twist, B2).A
    phi = C.descend_support(F.p)
    theta0 = TameWeight.zero(n)
    return NahcResult(
        tau=tuple(rat),
        theta_tau=th,
        phi=HiggsField(phi, FROBENIUS_TWIST),
        target_weight=th / F.p,
        theta=theta0,
        source=src,
        steps=steps,
        twisted=C,
        cover=None,
        emb=emb,
    )


def _irrational_residue_check(phi: MatSeries):
    if phi.prec <= 0:
        return
    c0 = phi.coefficient(0)
    dec = residue_decomposition(c0, phi.ctx)
    if not dec.is_irrational():
        raise RationalResidueInHiggs(f"Higgs residue has rational part diag{dec.tau_diag}")


def higgs_tau_to_locsys(tau: Sequence[int], phi, theta: TameWeight | None = None) -> TameConnection:
    """A = tau + Ad(z^theta_tau) phi(z^p)  (theta = 0), or the cover version
    descended through Delta when a parahoric weight theta is given."""
    M = phi.phi if isinstance(phi, HiggsField) else phi
    ctx = M.ctx
    p = ctx.p
    th = choose_theta_tau(list(tau), p)
    if theta is None or theta.is_zero():
        target = th / p
        rep = parahoric_lie_check(M, target)
        if not rep.member:
            raise MembershipViolation("Higgs field is not in the parahoric algebra of theta_tau/p", rep.violations)
        _irrational_residue_check(M)
        pulled = M.substitute_power(p)
        return gauge_act(GaugeElement.z_power(ctx, th.integral_scaled(1), pulled.prec), pulled)
    # parahoric case: go up to the cover, untwist there, come back down
    target = covers.combined_weight(theta, list(tau), p)
    rep = parahoric_lie_check(M, target)
    if not rep.member:
        raise MembershipViolation("Higgs field is not in the parahoric algebra of the target weight", rep.violations)
    _irrational_residue_check(M)
    cov = covers.make_cover(theta, ctx)
    Mw = M.map_field(cov.emb) if M.ctx != cov.ctx else M
    d = cov.d
    Theta = [a + d * b for a, b in zip(cov.delta_exps, th.integral_scaled(1))]
    C = Mw.substitute_power(d * p)
    Bw = gauge_act(GaugeElement.z_power(cov.ctx, Theta, C.prec), C).A
    return member_connection(covers.descend_connection(Bw, cov))


def replay_inverse(res: NahcResult, A_back) -> MatSeries:
    """Apply the inverse of the O-valued part of the certificate (everything
    before the twist) to a reconstructed connection."""
    M = _as_conn(A_back).A
    if res.cover is not None and res.cover.d > 1:
        M = covers.lift_connection(M, res.cover)
    for st in reversed([s for s in res.steps if s.label != "twist"]):
        M = gauge_act(st.gauge.inverse(), M).A
    if res.cover is not None and res.cover.d > 1:
        M = covers.descend_connection(M, res.cover)
    return M


def round_trip_ok(A, res: NahcResult | None = None) -> bool:
    """nahc-inv after nahc, replayed back to the input frame, equals the input."""
    A = member_connection(A)
    if res is None:
        res = locsys_to_higgs_tau(A)
    back = higgs_tau_to_locsys(res.tau, res.phi, res.theta)
    M = replay_inverse(res, back)
    src = A.A.map_field(res.emb) if res.emb is not None and A.ctx != M.ctx else A.A
    prec = min(M.prec, src.prec)
    return prec > 0 and M.agrees(src, prec)


# --------------------------------------------------------------------------


@dataclass
class PCurvatureZero:
    tau: tuple[int, ...]
    g: GaugeElement
    A: MatSeries

    def verify(self) -> bool:
        B = gauge_act(self.g, self.A).A
        T = MatSeries.constant(B.ctx, tau_array(B.ctx, self.tau), B.prec)
        return B.agrees(T)


@dataclass
class NotZeroPCurvature:
    psi: MatSeries


def pcurv_zero_classify(A):
    A = _as_conn(A)
    pc = p_curvature(A)
    if not pc.is_zero():
        return NotZeroPCurvature(pc.psi)
    res = locsys_to_higgs_tau(A)
    if not res.phi.is_zero():  # pragma: no cover
        raise ArithmeticError("zero p-curvature but nonzero Higgs field")
    F = res.ctx
    n = A.n
    order = sorted(range(n), key=lambda i: res.tau[i])
    perm = np.zeros((n, n, F.m), dtype=np.int64)
    for new, old in enumerate(order):
        perm[new, old, 0] = 1
    g = None
    for st in res.steps:
        if st.label == "twist":
            continue
        g = st.gauge if g is None else st.gauge * g
    g = _constant_gauge(F, perm, g.g.prec) * g
    out = PCurvatureZero(tuple(res.tau[i] for i in order), g, res.source)
    return out


# --------------------------------------------------------------------------


def parahoric_nahc(A, theta: TameWeight) -> NahcResult:
    A = member_connection(A)
    ctx = A.ctx
    n = A.n
    p = ctx.p
    rep = parahoric_lie_check(A.A, theta)
    if not rep.member:
        raise MembershipViolation("parahoric_nahc: input is not in the parahoric Lie algebra", rep.violations)
    cov = covers.make_cover(theta, ctx)
    Bw = covers.lift_connection(A.A.map_field(cov.emb) if cov.ctx != ctx else A.A, cov)
    emb2 = residue_decomposition(Bw.coefficient(0), cov.ctx).emb
    F = emb2.dst
    if F != cov.ctx:
        # re-express the cover over the splitting field
        cov = covers.CoverCtx(
            theta=cov.theta,
            d=cov.d,
            emb=emb2.compose(cov.emb),
            zeta=emb2(cov.zeta),
            rho=emb2.map_array(cov.rho),
            delta_exps=cov.delta_exps,
        )
        Bw = Bw.map_field(emb2)
    sf = standard_form(TameConnection(Bw), blocks=cov.blocks())
    jd = jordan_decompose(sf.B.A.coefficient(0), F, blocks=cov.blocks())
    _, _, rat_w = rational_split(jd)
    steps = [CertStep("standard_form", sf.g), CertStep("diagonalize", _constant_gauge(F, jd.conj, Bw.prec))]
    B2 = steps[1].apply(sf.B.A)
    d = cov.d
    dinv = pow(d, -1, p)
    tau = tuple(((rw - e) * dinv) % p for rw, e in zip(rat_w, cov.delta_exps))
    th = choose_theta_tau(tau, p)
    Theta = [e + d * t for e, t in zip(cov.delta_exps, th.integral_scaled(1))]
    twist = GaugeElement.z_power(F, [-t for t in Theta], B2.prec)
    steps.append(CertStep("twist", twist))
    C = gauge_act(twist, B2).A
    try:
        _ = C.descend_support(d)
    except SupportViolation as exc:
        raise covers.EquivarianceViolation(f"twist stage: result is not Gamma-invariant ({exc})") from exc
    phi = C.descend_support(d * p)
    target = TameWeight(tuple((a + b) / p for a, b in zip(theta.entries, th.entries)))
    return NahcResult(
        tau=tau,
        theta_tau=th,
        phi=HiggsField(phi, FROBENIUS_TWIST),
        target_weight=target,
        theta=theta,
        source=Bw,
        steps=steps,
        twisted=C,
        cover=cov,
        emb=cov.emb,
    )
