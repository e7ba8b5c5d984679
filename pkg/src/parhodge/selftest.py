"""Seeded self-test driving the property suites and the brute-force oracles."""
from __future__ import annotations

import copy
import itertools
import random
from fractions import Fraction

import numpy as np

from . import covers, generators as gen, nahc
from .certificate import replay, run
from .connection import GaugeElement, adjoint_act, gauge_act, hitchin_invariants, p_curvature
from .errors import ParhodgeError
from .ffield import FieldCtx
from .normalform import standard_form
from .oracle import matseries_terms, p_curvature_oracle
from .rootdata import TameWeight
from .series import MatSeries
from .serialize import Problem, matseries_to_json, problem_json

CONFIGS = [(2, 2, 1), (2, 3, 1), (3, 3, 1), (2, 5, 1), (2, 3, 2), (3, 2, 1), (2, 7, 1)]


class CaseFailure(Exception):
    def __init__(self, suite: str, case: dict, detail: str):
        super().__init__(f"{suite}: {detail}")
        self.suite = suite
        self.case = case
        self.detail = detail


def _case(ctx, M, **extra):
    return problem_json(ctx, M, **extra)


def suite_group_law(rng, cases):
    for _ in range(cases):
        n, p, m = rng.choice(CONFIGS)
        ctx, N = gen.field(p, m), 6
        A = gen.series(rng, ctx, n, N)
        g, h = gen.gauge(rng, ctx, n, N), gen.gauge(rng, ctx, n, N)
        lhs = gauge_act(g * h, A).A
        rhs = gauge_act(g, gauge_act(h, A)).A
        if not lhs.agrees(rhs):
            raise CaseFailure("group_law", _case(ctx, A), "g*(h*A) != (gh)*A")


def suite_pcurv(rng, cases):
    for _ in range(cases):
        n, p, m = rng.choice(CONFIGS)
        ctx, N = gen.field(p, m), max(p, 6)
        A = gen.series(rng, ctx, n, N)
        pc = p_curvature(A)
        if not pc.is_horizontal():
            raise CaseFailure("pcurv_horizontal", _case(ctx, A), "psi is not horizontal")
        for c in hitchin_invariants(pc.psi):
            try:
                c.descend_support(p)
            except ParhodgeError:
                raise CaseFailure("pcurv_twist_support", _case(ctx, A), "invariant off the p-lattice") from None
        g = gen.gauge(rng, ctx, n, N)
        lhs = p_curvature(gauge_act(g, A)).psi
        rhs = adjoint_act(g, pc.psi)
        if not lhs.agrees(rhs):
            raise CaseFailure("pcurv_equivariance", _case(ctx, A), "psi(g*A) != g psi g^-1")
        if matseries_terms(pc.psi) != p_curvature_oracle(A):
            raise CaseFailure("pcurv_oracle", _case(ctx, A), "recursion disagrees with operator oracle")


def suite_standard_form(rng, cases):
    for _ in range(cases):
        n, p, m = rng.choice(CONFIGS)
        ctx, N = gen.field(p, m), 8
        A = gen.series(rng, ctx, n, N)
        if not standard_form(A).verify():
            raise CaseFailure("standard_form", _case(ctx, A), "certificate fails")


def suite_round_trips(rng, cases):
    for _ in range(cases):
        n, p, m = rng.choice(CONFIGS)
        ctx, N = gen.field(p, m), 8
        A = gen.series(rng, ctx, n, N)
        res = nahc.locsys_to_higgs_tau(A)
        if not res.replay() or not nahc.round_trip_ok(A, res):
            raise CaseFailure("nahc_round_trip", _case(ctx, A), "round trip fails")
        d = rng.choice([2, 3, 4])
        p2 = rng.choice([q for q in (3, 5, 7) if d % q])
        ctx2 = gen.field(p2)
        theta = gen.weight(rng, n, p2, d)
        B = gen.parahoric_member(rng, ctx2, theta, 5)
        cov = covers.make_cover(theta, ctx2)
        up = covers.lift_connection(B, cov)
        if not covers.check_gamma_equivariance(up, cov).ok:
            raise CaseFailure("gamma_equivariance", _case(ctx2, B, theta=theta), "lift is not equivariant")
        down = covers.descend_connection(up, cov)
        if not down.agrees(B.map_field(cov.emb), min(down.prec, B.prec)):
            raise CaseFailure("lift_descend", _case(ctx2, B, theta=theta), "descend(lift(A)) != A")


def suite_membership(rng, cases):
    for k in range(cases):
        n = rng.choice([2, 3])
        p = rng.choice([3, 5, 7])
        d = rng.choice([q for q in (1, 2, 3, 4) if q % p])
        ctx = gen.field(p)
        theta = gen.weight(rng, n, p, d)
        g = gen.k_valued_matrix(rng, ctx, theta, 4, member=k % 2 == 0)
        a = covers.parahoric_group_check(g, theta).member
        b = covers.parahoric_group_check_bounds(g, theta).member
        if a != b:
            raise CaseFailure("membership_dual", _case(ctx, g, kind="gauge", theta=theta), "tests disagree")


def suite_zero_pcurv(rng, cases):
    for k in range(cases):
        n, p, m = rng.choice(CONFIGS)
        ctx, N = gen.field(p, m), max(p, 6)
        if k % 2 == 0:
            tau = gen.rational_tau(rng, ctx, n)
            T = MatSeries.constant(ctx, gen.diag(ctx, tau), N)
            A = gauge_act(gen.gauge(rng, ctx, n, N), T).A
            out = nahc.pcurv_zero_classify(A)
            if isinstance(out, nahc.NotZeroPCurvature) or not out.verify() or sorted(tau) != list(out.tau):
                raise CaseFailure("zero_pcurv", _case(ctx, A), "flat connection not recognised")
            if not nahc.locsys_to_higgs_tau(A).phi.is_zero():
                raise CaseFailure("zero_pcurv", _case(ctx, A), "flat connection gave nonzero Higgs field")
        else:
            A = nilpotent_family(rng, ctx, n, N)
            if p_curvature(A).is_zero() or nahc.locsys_to_higgs_tau(A).phi.is_zero():
                raise CaseFailure("nonzero_pcurv", _case(ctx, A), "nilpotent residue gave zero invariants")


def nilpotent_family(rng, ctx, n, N):
    """gauge_act(h, tau + c E_ij) with tau_i = tau_j and c != 0: residue has a nilpotent part."""
    tau = gen.rational_tau(rng, ctx, n)
    i, j = 0, 1
    tau[j] = tau[i]
    res = gen.diag(ctx, tau)
    res[i, j, 0] = rng.randrange(1, ctx.p)
    T = MatSeries.constant(ctx, res, N)
    return gauge_act(gen.gauge(rng, ctx, n, N), T).A


def suite_f2_oracle(rng, cases):
    ctx = FieldCtx(2)
    for bits in itertools.product(range(2), repeat=4):
        A = MatSeries.constant(ctx, np.array(bits).reshape(2, 2), 4)
        if matseries_terms(p_curvature(A).psi) != p_curvature_oracle(A):
            raise CaseFailure("f2_oracle", _case(ctx, A), "exhaustive F_2 oracle mismatch")


def suite_certificates(rng, cases):
    ctx = gen.field(5)
    A = gen.series(rng, ctx, 2, 6)
    cert, _ = run("nahc", Problem(problem_json(ctx, A)))
    ok, _ = replay(cert)
    if not ok:
        raise CaseFailure("certificate_replay", _case(ctx, A), "genuine certificate rejected")
    bad = copy.deepcopy(cert)
    phi = bad["outputs"]["phi"]["entries"]
    phi[0][0] = {"val": 0, "coeffs": [[(phi[0][0]["coeffs"][0][0] + 1) % 5 if phi[0][0]["coeffs"] else 1]]}
    ok, _ = replay(bad)
    if ok:
        raise CaseFailure("certificate_tamper", _case(ctx, A), "tampered certificate accepted")


SUITES = [
    ("group_law", suite_group_law),
    ("pcurv", suite_pcurv),
    ("standard_form", suite_standard_form),
    ("round_trips", suite_round_trips),
    ("membership_dual", suite_membership),
    ("zero_pcurv", suite_zero_pcurv),
    ("f2_oracle", suite_f2_oracle),
    ("certificates", suite_certificates),
]


def selftest(seed: int = 0, cases: int = 100) -> tuple[dict, int]:
    """Run every suite with its own derived RNG; returns (report, exit code)."""
    report = {"seed": seed, "cases": cases, "suites": {}}
    code = 0
    for idx, (name, fn) in enumerate(SUITES):
        rng = random.Random(seed * 1000003 + idx)
        per = max(1, cases // 4) if name in ("round_trips", "zero_pcurv", "pcurv") else cases
        try:
            fn(rng, per)
            report["suites"][name] = {"status": "pass", "cases": 16 if name == "f2_oracle" else per}
        except CaseFailure as exc:
            report["suites"][name] = {"status": "fail", "detail": exc.detail, "replay_case": exc.case}
            code = 1
            break
    report["status"] = "pass" if code == 0 else "fail"
    return report, code
