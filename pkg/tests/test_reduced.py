from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nilunfold import battery, reduced, unfolding
from nilunfold.linsymp import Tag
from nilunfold.reduced import ReducedParams
from nilunfold.unfolding import CubicCoeffs, ParamsKMN

F = Fraction


def test_reduce_params_requires_a1():
    with pytest.raises(ValueError):
        reduced.reduce_params(0, 0, 0, a1=0)


@settings(max_examples=40, deadline=None)
@given(st.fractions(-1, 1, max_denominator=9), st.fractions(-1, 1, max_denominator=9),
       st.fractions(-1, 1, max_denominator=9), st.sampled_from([F(0), F(1, 10), F(-1, 10)]))
def test_translation_maps_the_family(kappa, mu, nu, r):
    # translating (q1, p2) by (s, -3/4 nu s) carries H_{kappa,mu,nu} to H_r up to a constant
    p = reduced.reduce_params(kappa, mu, nu, r=r)
    shift = reduced.translation(mu, r=r)
    c = CubicCoeffs(F(1), F(0), F(0))
    old = unfolding.hamiltonian(ParamsKMN(kappa, mu, nu), c)
    kmn, _ = reduced.as_unfolding(p)
    new = unfolding.hamiltonian(kmn, CubicCoeffs(F(1), F(0), F(0)))
    x = (F(2, 7), F(-1, 3), F(1, 5), F(3, 4))
    dp2 = -F(3, 4) * nu * shift
    moved = (x[0] + shift, x[1], x[2], x[3] + dp2)
    y = (F(-1, 2), F(2, 9), F(0), F(1, 6))
    moved_y = (y[0] + shift, y[1], y[2], y[3] + dp2)
    assert old(moved) - new(x) == old(moved_y) - new(y)


def test_equilibria_base_point():
    eqs = reduced.equilibria(ReducedParams(0, 0, 0))
    assert [q for q, _ in eqs] == [0.0]


def test_equilibria_hopf_point():
    eqs = reduced.equilibria(ReducedParams(-17 / 16, 1.0, 0.0))
    assert any(abs(q + 1) < 1e-12 for q, _ in eqs)


def test_equilibria_state():
    for q0, x in reduced.equilibria(ReducedParams(-0.01, 0.2, 0.0)):
        assert x == pytest.approx((q0, 0, 0, -0.15 * q0))


@settings(max_examples=60, deadline=None)
@given(st.floats(-1, 1), st.floats(-1, 1), st.floats(-0.2, 0.2))
def test_no_equilibria_above_fold(beta, excess, r):
    alpha = 0.5 * (9 / 16 * beta ** 2 - r) ** 2 + abs(excess) + 1e-6
    assert reduced.equilibria(ReducedParams(alpha, beta, r)) == []
    assert reduced.classify_region(ReducedParams(alpha, beta, r)).tag == reduced.NO_EQUILIBRIA


def test_eigenvalue_examples():
    assert battery.multiset_distance(reduced.eigenvalues(0.0, 1.0), [1, -1, 1j, -1j]) < 1e-15
    w = 1j * math.sqrt(5) / 2
    assert battery.multiset_distance(reduced.eigenvalues(1.0, -1.0), [w, -w, w, -w]) < 1e-15


@settings(max_examples=100, deadline=None)
@given(st.floats(-0.5, 0.5), st.floats(-0.5, 0.5), st.floats(-0.2, 0.2))
def test_eigenvalues_match_jacobian(beta, q0, r):
    # coefficients of the characteristic polynomial are well conditioned
    closed = np.real(np.poly(reduced.eigenvalues(beta, q0, r)))
    numeric = np.real(np.poly(reduced.jacobian_eigenvalues(beta, q0, r)))
    assert np.allclose(closed, numeric, rtol=0, atol=1e-12)


def test_eigenvalues_literal_agrees_away_from_branch_points():
    rng = np.random.default_rng(3)
    for beta, q0 in rng.uniform(-0.5, 0.5, (100, 2)):
        d = battery.multiset_distance(reduced.eigenvalues(beta, q0), reduced.eigenvalues_literal(beta, q0))
        assert d < 1e-12


def test_curves():
    assert reduced.hopf_curve(1) == -1
    assert reduced.fold_curve(1) == F(9, 16)
    assert reduced.alpha_fold(1, 0) == F(81, 512)
    assert reduced.alpha_hopf(1, 0) == F(-17, 16)


@pytest.mark.parametrize("r", [F(-1, 10), F(0), F(1, 10)])
def test_curve_difference(r):
    for beta in (F(1), F(1, 2), F(-3, 7)):
        assert reduced.alpha_fold(beta, r) - reduced.alpha_hopf(beta, r) == F(625, 512) * beta ** 4


@pytest.mark.parametrize("r", [0, 0.1, F(-1, 10)])
def test_tangency_order(r):
    assert reduced.tangency_order(r) == 3


def test_curves_are_alpha_of_surfaces():
    for beta in (F(1, 3), F(-1, 2)):
        assert reduced.alpha_of(beta, reduced.fold_curve(beta)) == reduced.alpha_fold(beta)
        assert reduced.alpha_of(beta, reduced.hopf_curve(beta)) == reduced.alpha_hopf(beta)


def test_classify_point_examples():
    assert reduced.classify_point(0.0, 1.0) == Tag.IMAG_PAIR_REAL_PAIR
    assert reduced.classify_point(1.0, -1.0) == Tag.DOUBLE_IMAG_PAIR
    beta = 0.5
    eig = reduced.eigenvalues(F(1, 2), reduced.fold_curve(F(1, 2)))
    surviving = eig[np.argmax(np.abs(eig))]
    expected = Tag.IMAG_PAIR_ZERO_PAIR if abs(surviving.real) < 1e-12 else Tag.REAL_PAIR_ZERO_PAIR
    assert reduced.classify_point(beta, float(reduced.fold_curve(beta))) == expected


def test_classify_region_orders_equilibria():
    rep = reduced.classify_region(ReducedParams(-0.01, 0.2, 0.0))
    qs = [q for q, _ in rep.equilibria]
    assert qs == sorted(qs) and len(qs) == 2
    assert rep.tag == "+".join(t for _, t in rep.equilibria)


def test_tables():
    rows = reduced.curve_table([0.0, 1.0])
    assert rows[1] == (1.0, 81 / 512, -17 / 16, 0.0)
    grid = reduced.grid_table([0.0, 1.0], [-1.0, 1.0])
    assert [g[:2] for g in grid] == [(0.0, -1.0), (0.0, 1.0), (1.0, -1.0), (1.0, 1.0)]
    assert grid[2][3] == Tag.DOUBLE_IMAG_PAIR.value
