"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

The lines are collected in RESULTS and repeated in the terminal summary by
conftest.py, so they show up even when pytest captures output.
"""
import itertools
import random
import time

import numpy as np
import pytest

from parhodge import FieldCtx, covers, generators as gen, nahc
from parhodge.certificate import nahc_certificate_body, replay, run
from parhodge.cli import main
from parhodge.connection import gauge_act, hitchin_invariants, horizontality_defect, p_curvature
from parhodge.normalform import eigenspace_certificate, standard_form, standard_form_irrational
from parhodge.oracle import matseries_terms, p_curvature_oracle
from parhodge.rootdata import TameWeight
from parhodge.selftest import nilpotent_family
from parhodge.series import MatSeries
from parhodge.serialize import Problem, matseries_from_json, problem_json

N = 32
PRIMES = (2, 3, 5, 7)
RESULTS = {}


def record(k, ok, detail):
    line = f"criterion {k}: {'PASS' if ok else 'FAIL'} ({detail})"
    RESULTS.setdefault(k, []).append((ok, line))
    print(line)
    assert ok, line


def test_criterion_1_standard_form():
    t0 = time.perf_counter()
    rng = random.Random(1001)
    count = 0
    for n, p in itertools.product((1, 2, 3), PRIMES):
        for k in range(200):
            # every tenth case over an extension of degree 2..4
            m = 1 if k % 10 else [2, 3, 4][k // 10 % 3] if p < 5 else 2
            ctx = gen.field(p, m)
            A = gen.series(rng, ctx, n, N)
            res = standard_form(A)
            if not (gauge_act(res.g, A).A.agrees(res.B.A) and res.B.A.prec == N and eigenspace_certificate(res.B)):
                record(1, False, f"certificate fails for n={n} p={p} m={m}")
            count += 1
    dt = time.perf_counter() - t0
    record(1, dt < 60, f"{count} connections over 12 (n, p) configurations, exact, {dt:.1f}s")


def _irrational_residue(rng, ctx, n):
    vals = gen.irrational_eigenvalues(rng, ctx, n)
    res = np.zeros((n, n, ctx.m), dtype=np.int64)
    for i, v in enumerate(vals):
        res[i, i] = v
        for j in range(i + 1, n):
            res[i, j, 0] = rng.randrange(ctx.p)
    return res


def test_criterion_2_irrational_case():
    rng = random.Random(1002)
    for k in range(100):
        p = PRIMES[k % 4]
        ctx = gen.field(p, 2 if k % 3 else 3)
        n = rng.choice([2, 3])
        A = gen.connection_with_residue(rng, ctx, n, N, _irrational_residue(rng, ctx, n))
        res = standard_form_irrational(A)
        if not res.verify():
            record(2, False, f"certificate fails at case {k}")
        res.B.A.descend_support(p)
    record(2, True, "100 irrational-residue connections, output supported on the p-lattice")


def test_criterion_3_zero_pcurvature_biconditional():
    rng = random.Random(1003)
    for k in range(100):
        p, n = PRIMES[k % 4], rng.choice([2, 3])
        ctx = gen.field(p, 1 if k % 5 else 2)
        tau = gen.rational_tau(rng, ctx, n)
        T = MatSeries.constant(ctx, gen.diag(ctx, tau), N)
        A = gauge_act(gen.gauge(rng, ctx, n, N), T).A
        if not p_curvature(A).is_zero():
            record(3, False, f"nonzero p-curvature on the orbit of tau={tau}")
        out = nahc.pcurv_zero_classify(A)
        if not isinstance(out, nahc.PCurvatureZero) or sorted(out.tau) != sorted(tau) or not out.verify():
            record(3, False, f"classification fails for tau={tau}")
        if not nahc.locsys_to_higgs_tau(A).phi.is_zero():
            record(3, False, f"nonzero Higgs field for tau={tau}")
    for k in range(100):
        p, n = PRIMES[k % 4], rng.choice([2, 3])
        ctx = gen.field(p, 1 if k % 5 else 2)
        A = nilpotent_family(rng, ctx, n, N)
        if p_curvature(A).is_zero() or nahc.locsys_to_higgs_tau(A).phi.is_zero():
            record(3, False, "nilpotent residue gave zero p-curvature or zero Higgs field")
    record(3, True, "100 flat orbits recovered with verified gauge, 100 nilpotent residues detected")


def test_criterion_4_round_trips():
    t0 = time.perf_counter()
    rng = random.Random(1004)
    for k in range(100):
        p, n = PRIMES[k % 4], rng.choice([2, 3])
        ctx = gen.field(p, 1 if k % 4 else 2)
        A = gen.series(rng, ctx, n, N)
        cert, _ = run("nahc", Problem(problem_json(ctx, A)))
        ok, msg = replay(cert)
        if not ok:
            record(4, False, f"certificate replay: {msg}")
        res = nahc.locsys_to_higgs_tau(A)
        if not nahc.round_trip_ok(A, res):
            record(4, False, f"nahc-inv after nahc differs at case {k}")
        phi = matseries_from_json(cert["outputs"]["phi"], res.ctx)
        if not phi.agrees(res.phi.phi):
            record(4, False, "certificate phi differs from the pipeline result")
    for k in range(100):
        d = (2, 3, 4)[k % 3]
        p = rng.choice([q for q in (3, 5, 7) if d % q])
        ctx = FieldCtx(p)
        theta = gen.weight(rng, rng.choice([2, 3]), p, d)
        cov = covers.make_cover(theta, ctx)
        # uniform precision loses d * spread(theta) terms per conjugation
        A = gen.parahoric_member(rng, ctx, theta, N)
        up = covers.lift_connection(A, cov)
        down = covers.descend_connection(up, cov)
        if not down.agrees(A.map_field(cov.emb), min(down.prec, A.prec)):
            record(4, False, f"descend(lift(A)) != A for theta={theta.entries}")
        if not covers.lift_connection(down, cov).agrees(up):
            record(4, False, f"lift(descend(B)) != B for theta={theta.entries}")
    dt = time.perf_counter() - t0
    record(4, dt < 60, f"100 NAHC certificate round trips and 100 lift/descend pairs, exact, {dt:.1f}s")


def test_criterion_5_membership_dual():
    rng = random.Random(1005)
    members = 0
    for k in range(500):
        n, p = rng.choice([2, 3]), rng.choice([3, 5, 7])
        d = rng.choice([q for q in (1, 2, 3, 4) if q % p])
        theta = gen.weight(rng, n, p, d)
        g = gen.k_valued_matrix(rng, FieldCtx(p), theta, 6, member=k % 2 == 0)
        a = covers.parahoric_group_check(g, theta).member
        if a != covers.parahoric_group_check_bounds(g, theta).member:
            record(5, False, f"tests disagree for theta={theta.entries}")
        members += a
    record(5, 0 < members < 500, f"500 matrices ({members} members), conjugation and bound tests agree")


def test_criterion_6_pcurvature_oracle():
    F2 = FieldCtx(2)
    for bits in itertools.product([0, 1], repeat=4):
        A = MatSeries.constant(F2, np.array(bits).reshape(2, 2), 6)
        if matseries_terms(p_curvature(A).psi) != p_curvature_oracle(A):
            record(6, False, f"F_2 constant {bits}")
    rng = random.Random(1006)
    for k in range(200):
        p = (3, 5)[k % 2]
        ctx = gen.field(p, 1 if k % 4 < 2 else 2)
        A = gen.series(rng, ctx, rng.choice([2, 3]), rng.randint(p + 1, 14))
        if matseries_terms(p_curvature(A).psi) != p_curvature_oracle(A):
            record(6, False, f"random series case {k}")
    record(6, True, "16 constant F_2 matrices and 200 series over F_3, F_5 match the operator oracle")


def _computed_psis():
    rng = random.Random(1007)
    for k in range(200):
        p = PRIMES[k % 4]
        ctx = gen.field(p, 1 if k % 5 else 2)
        A = gen.series(rng, ctx, rng.choice([2, 3]), N)
        yield p, A, p_curvature(A).psi


def test_criterion_7_twist_support_and_horizontality():
    for p, A, psi in _computed_psis():
        if not horizontality_defect(A, psi).is_zero():
            record(7, False, "z psi' + [psi, A] is nonzero")
        for c in hitchin_invariants(psi):
            c.descend_support(p)
    record(7, True, "200 psi: invariants supported on the p-lattice, z psi' + [psi, A] = 0")


@pytest.mark.xfail(strict=True, reason="literal bracket order contradicts the gauge convention; see README")
def test_criterion_7_literal_bracket_order():
    bad = total = 0
    for p, A, psi in _computed_psis():
        total += 1
        bad += not (psi.zderiv() + A.commutator(psi)).is_zero()
    record(7, bad == 0, f"z psi' + [A, psi] = 0 fails on {bad} of {total} psi")


def test_criterion_8_theta_zero_degeneration():
    rng = random.Random(1008)
    for k in range(100):
        p, n = PRIMES[k % 4], rng.choice([2, 3])
        ctx = gen.field(p, 1 if k % 4 else 2)
        A = gen.series(rng, ctx, n, N)
        a = nahc_certificate_body(nahc.parahoric_nahc(A, TameWeight.zero(n)))
        b = nahc_certificate_body(nahc.locsys_to_higgs_tau(A))
        if a != b:
            record(8, False, f"certificates differ at case {k}")
    record(8, True, "100 shared inputs give identical certificates")


def test_criterion_9_determinism(tmp_path):
    texts = []
    for k in range(2):
        out = tmp_path / f"report{k}.json"
        assert main(["selftest", "--seed", "2024", "--cases", "100", "-o", str(out)]) == 0
        texts.append(out.read_bytes())
    record(9, texts[0] == texts[1], "two seeded selftest runs are byte-identical")
