import random

import numpy as np
import pytest

from parhodge import FieldCtx, generators as gen
from parhodge.connection import GaugeElement, TameConnection, adjoint_act, gauge_act
from parhodge.covers import parahoric_group_check
from parhodge.errors import DepthViolation, MembershipViolation, NonRationalInput, NonTrivialRationalPart, SupportViolation
from parhodge.normalform import (
    build_gauge_step,
    choose_theta_tau,
    eigenspace_certificate,
    jordan_decompose,
    rational_split,
    residue_decomposition,
    standard_form,
    standard_form_irrational,
    standard_form_parahoric,
    twist_out_rational,
    verify_certificate,
)
from parhodge.rootdata import TameWeight, filtration_depth, parahoric_lie_check
from parhodge.series import MatSeries

from helpers import E, elem_matrix, mat

F5 = FieldCtx(5)
F3 = FieldCtx(3)
I2 = np.eye(2, dtype=np.int64)


def _ints(arr):
    return arr[..., 0]


def test_jordan_examples():
    jd = jordan_decompose(E(2, 1, 2)[..., None], F5)
    assert not jd.s.any() and (_ints(jd.nil) == E(2, 1, 2)).all()
    jd = jordan_decompose(np.diag([1, 2])[..., None], F5)
    assert (_ints(jd.s) == np.diag([1, 2])).all() and not jd.nil.any()
    jd = jordan_decompose(np.array([[1, 1], [0, 1]])[..., None], F5)
    assert (_ints(jd.s) == I2).all() and (_ints(jd.nil) == E(2, 1, 2)).all()


def test_jordan_extends_field():
    # x^2 - 2 is irreducible over F_5: eigenvalues live in F_25
    a = np.array([[0, 2], [1, 0]])[..., None]
    jd = jordan_decompose(a, F5)
    assert jd.ctx.m == 2 and not jd.nil.any()
    assert all(lam * lam == jd.ctx(2) for lam in jd.eigenvalues)


def test_rational_split_examples(f3u):
    u = f3u.gen
    tau, sigma, rat = rational_split(jordan_decompose(elem_matrix(f3u, [[1, 0], [0, u]]), f3u))
    assert (tau == elem_matrix(f3u, [[1, 0], [0, 0]])).all()
    assert (sigma == elem_matrix(f3u, [[0, 0], [0, u]])).all()
    tau, sigma, _ = rational_split(jordan_decompose(np.diag([2, 2])[..., None], F5))
    assert (_ints(tau) == np.diag([2, 2])).all() and not sigma.any()
    tau, sigma, _ = rational_split(jordan_decompose(elem_matrix(f3u, [[u, 0], [0, u + 1]]), f3u))
    assert (tau == elem_matrix(f3u, [[0, 0], [0, 1]])).all()
    assert (sigma == elem_matrix(f3u, [[u, 0], [0, u]])).all()


def test_residue_decomposition_invariants():
    rng = random.Random(4)
    for ctx in (F5, gen.field(3, 2)):
        for _ in range(10):
            a = gen.constant(rng, ctx, 3)
            dec = residue_decomposition(a, ctx)
            F = dec.ctx
            ab = dec.emb.map_array(a)
            assert ((dec.tau + dec.sigma + dec.nil) % F.p == ab).all()
            s = MatSeries.constant(F, (dec.tau + dec.sigma) % F.p, 1)
            nil = MatSeries.constant(F, dec.nil, 1)
            tau = MatSeries.constant(F, dec.tau, 1)
            assert s.commutator(nil).is_zero()
            assert tau.commutator(MatSeries.constant(F, dec.sigma, 1)).is_zero()
            assert dec.splitting_basis[0] == F.one
            for lam in dec.eigenvalues:
                assert dec.emb.rational_part(lam - F(dec.emb.rational_part(lam))) == 0


def test_build_gauge_step():
    X = mat(F5, 2, {1: E(2, 1, 2, 3)}, 6)
    assert build_gauge_step(X, 1).g.agrees(mat(F5, 2, {0: I2, 1: E(2, 1, 2, 3)}, 6))
    X = mat(F5, 2, {1: I2}, 6)
    assert build_gauge_step(X, 1).g.agrees(mat(F5, 2, {0: I2, 1: I2}, 6))
    with pytest.raises(DepthViolation):
        build_gauge_step(X, 0)
    with pytest.raises(DepthViolation):
        build_gauge_step(X, 2)


@pytest.mark.parametrize("k", [1, 2])
def test_build_gauge_step_adjoint_property(k):
    rng = random.Random(k)
    zero = TameWeight.zero(2)
    for _ in range(10):
        X = gen.series(rng, F5, 2, 8).shift(k).truncate(8)
        if X.is_zero():
            continue
        Y = gen.series(rng, F5, 2, 8)
        g = build_gauge_step(X, k)
        R = adjoint_act(g, Y) - Y - X.commutator(Y)
        assert R.is_zero() or filtration_depth(R, zero) > k


def test_standard_form_example():
    A = mat(F5, 2, {0: np.diag([0, 2]), 1: E(2, 1, 2)}, 2)
    res = standard_form(A)
    assert res.B.A.agrees(MatSeries.constant(F5, np.diag([0, 2]), 2))
    assert res.g.g.agrees(mat(F5, 2, {0: I2, 1: E(2, 1, 2, 3)}, 2))
    assert res.verify()


def test_standard_form_trivial_cases():
    A = MatSeries.constant(F5, np.array([[1, 2], [3, 4]]), 6)
    res = standard_form(A)
    assert res.B.A.agrees(A) and res.g.g.agrees(MatSeries.identity(F5, 2, 6))
    A = mat(F3, 2, {1: E(2, 1, 2)}, 2)
    res = standard_form(A)
    assert res.B.A.is_zero()
    assert res.g.g.agrees(mat(F3, 2, {0: I2, 1: E(2, 1, 2, 2)}, 2))


def test_standard_form_certificates_random():
    rng = random.Random(9)
    for p, m, n in [(2, 1, 2), (3, 1, 3), (3, 2, 2), (5, 1, 2), (7, 1, 3)]:
        ctx = gen.field(p, m)
        for _ in range(4):
            A = gen.series(rng, ctx, n, 10)
            res = standard_form(A)
            assert verify_certificate(A, res.g, res.B)
            assert gauge_act(res.g, A).A.agrees(res.B.A)
            assert eigenspace_certificate(res.B)
            assert (res.B.A.coefficient(0) == A.coefficient(0)).all()
            again = standard_form(res.B)
            assert again.B.A.agrees(res.B.A)
            assert again.g.g.agrees(MatSeries.identity(ctx, n, 10))


def test_eigenspace_certificate_reports_bad_coefficient():
    A = mat(F5, 2, {0: np.diag([0, 2]), 1: E(2, 1, 2)}, 3)
    assert eigenspace_certificate(A, report=True) == [1]


def test_irrational_examples(f3u):
    u = f3u.gen
    D = elem_matrix(f3u, [[u, 0], [0, 0]])
    res = standard_form_irrational(MatSeries.constant(f3u, D, 6))
    assert res.B.A.agrees(MatSeries.constant(f3u, D, 6))
    A = MatSeries.from_terms(f3u, 2, {0: D, 1: elem_matrix(f3u, [[0, 1], [0, 0]])}, 3)
    res = standard_form_irrational(A)
    assert res.B.A.agrees(MatSeries.constant(f3u, D, 3))
    with pytest.raises(NonTrivialRationalPart):
        standard_form_irrational(MatSeries.constant(F5, np.diag([1, 0]), 4))


def test_choose_theta_tau():
    assert choose_theta_tau([2, 0], 5).entries == (2, 0)
    assert choose_theta_tau([0, 0], 5).is_zero()
    assert choose_theta_tau(np.diag([2, 1, 0])[..., None], 3).entries == (2, 1, 0)
    with pytest.raises(NonRationalInput):
        choose_theta_tau(E(2, 1, 2)[..., None], 5)


def test_twist_out_rational():
    tau = [0, 2]
    C = twist_out_rational(MatSeries.constant(F5, np.diag(tau), 5), tau)
    assert C.is_zero()
    B = mat(F5, 2, {0: np.diag(tau), 2: E(2, 2, 1, 3)}, 5)
    C = twist_out_rational(B, tau)
    assert C.agrees(mat(F5, 2, {0: E(2, 2, 1, 3)}, 3))
    stray = mat(F5, 2, {0: np.diag(tau), 1: E(2, 2, 1)}, 5)
    with pytest.raises(SupportViolation):
        twist_out_rational(stray, tau)


def test_standard_form_parahoric_examples():
    A = mat(F5, 2, {0: np.diag([0, 2]), 1: E(2, 1, 2, 1) + E(2, 2, 1, 3), 3: [[1, 2], [3, 4]]}, 6)
    flat = standard_form_parahoric(A, TameWeight.zero(2))
    plain = standard_form(A)
    assert flat.B.A.agrees(plain.B.A) and flat.g.g.agrees(plain.g.g)

    th = TameWeight.of(["1/2", 0], 5)
    D = MatSeries.constant(F5, np.diag([1, 3]), 6)
    res = standard_form_parahoric(D, th)
    assert res.B.A.agrees(D) and res.g.g.agrees(MatSeries.identity(F5, 2, 6))

    A = mat(F5, 2, {0: np.diag([0, 2]), 1: E(2, 2, 1)}, 6)
    res = standard_form_parahoric(A, th)
    assert res.verify()
    assert parahoric_group_check(res.g.g, th).member
    assert parahoric_lie_check(res.B.A, th).member

    with pytest.raises(MembershipViolation):
        standard_form_parahoric(MatSeries.constant(F5, E(2, 2, 1), 4), th)


def test_standard_form_parahoric_random():
    rng = random.Random(21)
    for _ in range(6):
        p = rng.choice([3, 5, 7])
        d = rng.choice([q for q in (2, 3, 4) if q % p])
        th = gen.weight(rng, 2, p, d)
        A = gen.parahoric_member(rng, FieldCtx(p), th, 6)
        res = standard_form_parahoric(A, th)
        assert res.verify()
