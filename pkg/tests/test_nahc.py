from fractions import Fraction as Q
import random

import numpy as np
import pytest

from parhodge import FieldCtx, generators as gen, nahc
from parhodge.connection import HiggsField, gauge_act, p_curvature
from parhodge.errors import MembershipViolation, NonTrivialRationalPart, RationalResidueInHiggs
from parhodge.normalform import residue_decomposition
from parhodge.rootdata import TameWeight, parahoric_lie_check
from parhodge.selftest import nilpotent_family
from parhodge.series import MatSeries

from helpers import E, elem_matrix, mat

F5 = FieldCtx(5)
F3 = FieldCtx(3)


def test_irr_examples(f3u):
    u = f3u.gen
    D = elem_matrix(f3u, [[u, 0], [0, 0]])
    phi = nahc.locsys_to_higgs_irr(MatSeries.constant(f3u, D, 6)).phi
    assert phi.agrees(MatSeries.constant(f3u, D, 2))
    assert nahc.locsys_to_higgs_irr(MatSeries.zeros(f3u, 2, 6)).phi.is_zero()
    A = MatSeries.from_terms(f3u, 2, {0: D, 1: elem_matrix(f3u, [[0, 1], [0, 0]])}, 3)
    phi = nahc.locsys_to_higgs_irr(A).phi
    assert phi.agrees(MatSeries.constant(f3u, D, 1))
    with pytest.raises(NonTrivialRationalPart):
        nahc.locsys_to_higgs_irr(MatSeries.constant(F5, np.diag([1, 0]), 5))


def test_tau_examples(f3u):
    res = nahc.locsys_to_higgs_tau(MatSeries.constant(F5, np.diag([2, 0]), 10))
    assert res.tau == (2, 0) and res.phi.is_zero()
    u = f3u.gen
    D = elem_matrix(f3u, [[u, 0], [0, 0]])
    res = nahc.locsys_to_higgs_tau(MatSeries.constant(f3u, D, 6))
    assert res.tau == (0, 0) and res.phi.phi.agrees(MatSeries.constant(f3u, D, 2))


def test_tau_example_with_graded_term():
    A = mat(F5, 2, {0: np.diag([0, 2]), 2: E(2, 2, 1, 3)}, 10)
    res = nahc.locsys_to_higgs_tau(A)
    assert res.tau == (0, 2)
    assert res.theta_tau.entries == (0, 2)
    assert res.target_weight.entries == (0, Q(2, 5))
    assert res.phi.phi.agrees(mat(F5, 2, {0: E(2, 2, 1, 3)}, 2))
    assert res.replay() and nahc.round_trip_ok(A, res)
    assert parahoric_lie_check(res.phi.phi, res.target_weight).member


def test_inverse_examples(f3u):
    back = nahc.higgs_tau_to_locsys([2, 0], MatSeries.zeros(F5, 2, 2))
    assert back.A.agrees(MatSeries.constant(F5, np.diag([2, 0]), 10))
    u = f3u.gen
    D = elem_matrix(f3u, [[u, 0], [0, 0]])
    back = nahc.higgs_tau_to_locsys([0, 0], MatSeries.constant(f3u, D, 2))
    assert back.A.agrees(MatSeries.constant(f3u, D, 6))
    back = nahc.higgs_tau_to_locsys([0, 2], mat(F5, 2, {0: E(2, 2, 1, 3)}, 2))
    assert back.A.agrees(mat(F5, 2, {0: np.diag([0, 2]), 2: E(2, 2, 1, 3)}, 10))


def test_inverse_preconditions():
    # E_12 at z'^0 violates the bound for weight (0, 2/5)
    with pytest.raises(MembershipViolation):
        nahc.higgs_tau_to_locsys([0, 2], mat(F5, 2, {0: E(2, 1, 2)}, 2))
    with pytest.raises(RationalResidueInHiggs):
        nahc.higgs_tau_to_locsys([0, 0], MatSeries.constant(F5, np.diag([1, 0]), 2))


def test_round_trips_random():
    rng = random.Random(31)
    for p, m, n in [(2, 1, 2), (3, 1, 2), (3, 2, 2), (5, 1, 3), (7, 1, 2)]:
        ctx = gen.field(p, m)
        for _ in range(4):
            A = gen.series(rng, ctx, n, 12)
            res = nahc.locsys_to_higgs_tau(A)
            assert res.replay()
            assert nahc.round_trip_ok(A, res)
            assert parahoric_lie_check(res.phi.phi, res.target_weight).member
            assert residue_decomposition(res.phi.phi.coefficient(0), res.ctx).is_irrational()


def test_classify_examples():
    tau = MatSeries.constant(F5, np.diag([1, 0]), 6)
    out = nahc.pcurv_zero_classify(tau)
    assert out.tau == (0, 1) and out.verify()
    rng = random.Random(2)
    A = gauge_act(gen.gauge(rng, F5, 2, 8), MatSeries.constant(F5, np.diag([1, 0]), 8)).A
    out = nahc.pcurv_zero_classify(A)
    assert isinstance(out, nahc.PCurvatureZero) and out.tau == (0, 1) and out.verify()
    out = nahc.pcurv_zero_classify(MatSeries.constant(F3, E(2, 1, 2), 4))
    assert isinstance(out, nahc.NotZeroPCurvature)
    assert out.psi.agrees(MatSeries.constant(F3, E(2, 1, 2, 2), 4))


@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_zero_pcurvature_biconditional(p):
    rng = random.Random(p)
    ctx = FieldCtx(p)
    for _ in range(4):
        tau = gen.rational_tau(rng, ctx, 3)
        A = gauge_act(gen.gauge(rng, ctx, 3, 9), MatSeries.constant(ctx, gen.diag(ctx, tau), 9)).A
        assert p_curvature(A).is_zero()
        assert nahc.locsys_to_higgs_tau(A).phi.is_zero()
        B = nilpotent_family(rng, ctx, 2, 9)
        assert not p_curvature(B).is_zero()
        assert not nahc.locsys_to_higgs_tau(B).phi.is_zero()


def test_parahoric_example():
    th = TameWeight.of(["1/2", 0], 5)
    res = nahc.parahoric_nahc(MatSeries.constant(F5, np.diag([0, 2]), 6), th)
    assert res.tau == (0, 2)
    assert res.theta_tau.entries == (0, 2)
    assert res.target_weight.entries == (Q(1, 10), Q(2, 5))
    assert res.phi.is_zero() and res.replay()


def test_parahoric_nilpotent_residue():
    # the E_23 block has equal weights, so its nilpotent part survives the lift
    th = TameWeight.of(["1/2", 0, 0], 5)
    A = mat(F5, 3, {0: np.eye(3, dtype=int) + E(3, 2, 3)}, 8)
    res = nahc.parahoric_nahc(A, th)
    assert not res.phi.is_zero()
    assert not p_curvature(A).is_zero()


def test_parahoric_theta_zero_matches_plain():
    rng = random.Random(6)
    for _ in range(8):
        A = gen.series(rng, F5, 2, 10)
        a = nahc.parahoric_nahc(A, TameWeight.zero(2))
        b = nahc.locsys_to_higgs_tau(A)
        assert a.tau == b.tau and a.phi.phi.agrees(b.phi.phi)
        assert a.target_weight == b.target_weight


def test_parahoric_round_trip_random():
    rng = random.Random(41)
    for _ in range(10):
        p = rng.choice([3, 5, 7])
        d = rng.choice([q for q in (2, 3) if q % p])
        th = gen.weight(rng, 2, p, d)
        ctx = FieldCtx(p)
        A = gen.parahoric_member(rng, ctx, th, 14)
        res = nahc.parahoric_nahc(A, th)
        assert res.replay()
        assert parahoric_lie_check(res.phi.phi, res.target_weight).member
        assert nahc.round_trip_ok(A, res)


def test_parahoric_requires_membership():
    with pytest.raises(MembershipViolation):
        nahc.parahoric_nahc(MatSeries.constant(F5, E(2, 2, 1), 6), TameWeight.of(["1/2", 0]))
