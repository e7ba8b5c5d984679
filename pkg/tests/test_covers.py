from fractions import Fraction as Q
import random

import numpy as np
import pytest

from parhodge import FieldCtx, generators as gen
from parhodge.connection import GaugeElement, gauge_act
from parhodge.covers import (
    check_gamma_equivariance,
    combined_weight,
    descend_connection,
    descend_group,
    descend_higgs,
    lift_connection,
    lift_group,
    lift_higgs,
    make_cover,
    parahoric_group_check,
    parahoric_group_check_bounds,
)
from parhodge.errors import EquivarianceViolation, MembershipViolation, WildRamification
from parhodge.rootdata import TameWeight
from parhodge.series import MatSeries

from helpers import E, mat

F5 = FieldCtx(5)
F3 = FieldCtx(3)
HALF = TameWeight.of(["1/2", 0])


def test_make_cover_examples():
    cov = make_cover(TameWeight.zero(2), F5)
    assert cov.d == 1 and cov.zeta == F5.one
    cov = make_cover(HALF, F5)
    assert cov.d == 2 and cov.zeta == F5(4)
    assert (cov.rho[..., 0] == np.diag([4, 1])).all()
    cov = make_cover(HALF, F3)
    assert cov.zeta == F3(2) and (cov.rho[..., 0] == np.diag([2, 1])).all()
    with pytest.raises(WildRamification):
        make_cover(TameWeight.of(["1/3", 0]), F3)


def test_cover_extends_field_for_roots_of_unity():
    cov = make_cover(TameWeight.of(["1/4", 0]), F3)
    assert cov.ctx.m == 2
    z = cov.zeta
    assert z**4 == cov.ctx.one and z**2 != cov.ctx.one


def test_delta_property():
    # Delta(zeta w) = rho Delta(w): entry i picks up zeta^(d theta_i)
    th = TameWeight.of(["2/3", "1/3", 0])
    cov = make_cover(th, FieldCtx(7))
    for i, e in enumerate(cov.delta_exps):
        assert (cov.zeta**e).array().tolist() == cov.rho[i, i].tolist()


def test_lift_connection_examples():
    cov = make_cover(HALF, F5)
    B = lift_connection(MatSeries.zeros(F5, 2, 4), cov)
    assert B.agrees(MatSeries.constant(F5, np.diag([1, 0]), B.prec))
    B = lift_connection(mat(F5, 2, {1: E(2, 2, 1)}, 4), cov)
    assert B.agrees(mat(F5, 2, {0: np.diag([1, 0]), 1: E(2, 2, 1, 2)}, B.prec))
    A = gen.series(random.Random(1), F5, 2, 5)
    triv = make_cover(TameWeight.zero(2), F5)
    assert lift_connection(A, triv).agrees(A)
    with pytest.raises(MembershipViolation):
        lift_connection(MatSeries.constant(F5, E(2, 2, 1), 3), cov)


def test_descend_connection_examples():
    cov = make_cover(HALF, F5)
    assert descend_connection(MatSeries.constant(F5, np.diag([1, 0]), 6), cov).is_zero()
    # w E_12 sits at a w-power of the wrong parity for entry (1,2)
    bad = mat(F5, 2, {2: E(2, 1, 2)}, 6)
    with pytest.raises(EquivarianceViolation) as exc:
        descend_connection(bad, cov)
    assert exc.value.violation == {"exponent": 2, "entry": (1, 2)}


def test_equivariance_examples():
    cov = make_cover(HALF, F5)
    assert check_gamma_equivariance(MatSeries.constant(F5, np.diag([3, 2]), 4), cov).ok
    rep = check_gamma_equivariance(mat(F5, 2, {1: np.eye(2, dtype=int)}, 4), cov)
    assert not rep.ok and rep.violation["exponent"] == 1


def test_higgs_examples():
    cov = make_cover(HALF, F5)
    D = mat(F5, 2, {0: np.diag([1, 2]), 1: np.diag([3, 0])}, 4)
    assert lift_higgs(D, cov).agrees(D.substitute_power(2))
    up = lift_higgs(mat(F5, 2, {1: E(2, 2, 1)}, 4), cov)
    assert up.agrees(mat(F5, 2, {1: E(2, 2, 1)}, up.prec))
    assert descend_higgs(up, cov).agrees(mat(F5, 2, {1: E(2, 2, 1)}, 4))


def _random_case(rng):
    p = rng.choice([3, 5, 7])
    d = rng.choice([q for q in (2, 3, 4) if q % p])
    n = rng.choice([2, 3])
    th = gen.weight(rng, n, p, d)
    return FieldCtx(p), th


def test_round_trips_random():
    rng = random.Random(8)
    for _ in range(25):
        ctx, th = _random_case(rng)
        cov = make_cover(th, ctx)
        # each Delta conjugation costs d * spread(theta) terms of uniform precision
        A = gen.parahoric_member(rng, ctx, th, 14)
        up = lift_connection(A, cov)
        assert check_gamma_equivariance(up, cov).ok
        assert descend_connection(up, cov).agrees(A.map_field(cov.emb))
        # lift . descend on the image
        assert lift_connection(descend_connection(up, cov), cov).agrees(up)
        phi = gen.parahoric_member(rng, ctx, th, 5)
        assert descend_higgs(lift_higgs(phi, cov), cov).agrees(phi.map_field(cov.emb))


def test_lift_commutes_with_gauge():
    rng = random.Random(13)
    for _ in range(10):
        ctx, th = _random_case(rng)
        cov = make_cover(th, ctx)
        A = gen.parahoric_member(rng, ctx, th, 6)
        g = gen.gauge(rng, ctx, th.n, 6)
        if not parahoric_group_check(g.g, th).member:
            continue
        lhs = lift_connection(gauge_act(g, A).A, cov)
        h = GaugeElement(lift_group(g.g, cov), check=False)
        rhs = gauge_act(h, lift_connection(A, cov)).A
        assert lhs.agrees(rhs, min(lhs.prec, rhs.prec))
        assert descend_group(lift_group(g.g, cov), cov).agrees(g.g.map_field(cov.emb))


def test_group_check_examples():
    I = MatSeries.identity(F5, 2, 4)
    for th in (HALF, TameWeight.of(["2/3", "1/3"]), TameWeight.zero(2)):
        assert parahoric_group_check(I, th).member
    g = mat(F5, 2, {0: np.eye(2, dtype=int) + E(2, 1, 2)}, 4)
    assert parahoric_group_check(g, HALF).member and parahoric_group_check_bounds(g, HALF).member
    g = mat(F5, 2, {0: np.eye(2, dtype=int) + E(2, 2, 1)}, 4)
    for rep in (parahoric_group_check(g, HALF), parahoric_group_check_bounds(g, HALF)):
        assert not rep.member
    assert parahoric_group_check_bounds(g, HALF).violations[0]["entry"] == (2, 1)


def test_group_check_dual_random():
    rng = random.Random(17)
    for k in range(120):
        ctx, th = _random_case(rng)
        g = gen.k_valued_matrix(rng, ctx, th, 4, member=k % 2 == 0)
        assert parahoric_group_check(g, th).member == parahoric_group_check_bounds(g, th).member


def test_combined_weight_examples():
    assert combined_weight(TameWeight.zero(2), [0, 0], 5).is_zero()
    assert combined_weight(HALF, [2, 0], 5).entries == (Q(1, 2), 0)
    assert combined_weight(TameWeight.zero(2), [1, 0], 3).entries == (Q(1, 3), 0)
    rng = random.Random(3)
    for _ in range(20):
        ctx, th = _random_case(rng)
        w = combined_weight(th, gen.rational_tau(rng, ctx, th.n), ctx.p)
        assert (th.d * ctx.p) % w.d == 0
