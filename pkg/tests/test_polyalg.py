from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nilunfold import polyalg
from nilunfold.polyalg import EXACT, FLOAT, Polynomial, poisson_bracket, variables

F = Fraction

small = st.fractions(min_value=-5, max_value=5, max_denominator=6)
monomials = st.tuples(*[st.integers(0, 2)] * 4).filter(lambda m: 0 < sum(m) <= 3)


@st.composite
def polys(draw):
    terms = draw(st.dictionaries(monomials, small, max_size=4))
    return Polynomial(terms, EXACT)


def test_parse_roundtrip():
    p = Polynomial.parse("1/2 * p2^2 + -1 * q2 p1")
    assert p == polyalg.standard_nilpotent()
    assert polyalg.parse_polynomial(str(p)) == p


def test_canonical_brackets():
    q1, q2, p1, p2 = variables()
    assert poisson_bracket(q1, p1) == Polynomial.constant(1)
    assert poisson_bracket(q2, p2) == Polynomial.constant(1)
    assert poisson_bracket(q1, p2).is_zero()
    assert poisson_bracket(p1, q1) == Polynomial.constant(-1)


def test_ad_matrix_of_q1_squared():
    q1, _, p1, _ = variables()
    op = polyalg.ad_matrix(q1 ** 2, 1)
    assert op.shape == (4, 4)
    assert polyalg.ad_apply(q1 ** 2, p1) == q1 * 2
    nonzero = [(i, j) for i in range(4) for j in range(4) if op.matrix[i][j] != 0]
    assert len(nonzero) == 1


@pytest.mark.parametrize("n, dim", [(1, 4), (2, 10), (3, 20), (4, 35)])
def test_dim_homogeneous(n, dim):
    assert polyalg.dim_homogeneous(n) == dim
    assert len(polyalg.monomial_basis(n)) == dim


@settings(max_examples=40, deadline=None)
@given(polys(), polys())
def test_bracket_antisymmetric(f, g):
    assert poisson_bracket(f, g) == -poisson_bracket(g, f)


@settings(max_examples=25, deadline=None)
@given(polys(), polys(), polys())
def test_jacobi_identity(f, g, h):
    pb = poisson_bracket
    total = pb(f, pb(g, h)) + pb(g, pb(h, f)) + pb(h, pb(f, g))
    assert total.is_zero()


@settings(max_examples=25, deadline=None)
@given(polys(), polys(), polys())
def test_leibniz_rule(f, g, h):
    assert poisson_bracket(f, g * h) == poisson_bracket(f, g) * h + g * poisson_bracket(f, h)


def test_mixed_fields_rejected():
    q1 = Polynomial.var(0, EXACT)
    p1 = Polynomial.var(2, FLOAT)
    with pytest.raises(TypeError):
        poisson_bracket(q1, p1)


def test_sl2_triple_exact():
    N = polyalg.standard_nilpotent()
    M, T = polyalg.sl2_triple(N)
    pb = poisson_bracket
    assert (pb(N, M) - T).is_zero()
    assert (pb(N, T) - N * 2).is_zero()
    assert (pb(M, T) + M * 2).is_zero()


def test_generators_commute_with_M():
    N = polyalg.standard_nilpotent()
    M, _ = polyalg.sl2_triple(N)
    for g in polyalg.nilpotent_generators():
        assert poisson_bracket(M, g).is_zero()


@pytest.mark.parametrize("n, span", [(1, 1), (2, 2), (3, 3), (4, 5)])
def test_complement_property(n, span):
    N = polyalg.standard_nilpotent()
    rep = polyalg.normal_form_complement(N, n, polyalg.nilpotent_generators())
    assert rep.passed
    assert rep.trivial_intersection
    assert rep.span_dim == span
    assert rep.span_dim + rep.image_dim == polyalg.dim_homogeneous(n)


def test_kernel_and_image_dimensions():
    N = polyalg.standard_nilpotent()
    for n in range(1, 5):
        op = polyalg.ad_matrix(N, n)
        k = len(polyalg.kernel_basis(op))
        i = len(polyalg.image_basis(op))
        assert k + i == polyalg.dim_homogeneous(n)


def test_lie_transform_preserves_quadratic_invariant():
    q1, q2, p1, p2 = variables()
    H = (q1 ** 2 + p1 ** 2) * F(1, 2)
    f = q1 ** 3
    out = polyalg.lie_transform(H, f, 4)
    # exp(-ad_f) H = H - {f, H} + ...; {q1^3, H} = 3 q1^2 p1
    assert out.homogeneous_part(2) == H
    assert out.homogeneous_part(3) == -(q1 ** 2 * p1 * 3)


def test_lie_transform_rejects_low_degree_generator():
    q1, *_ = variables()
    with pytest.raises(ValueError):
        polyalg.lie_transform(q1 ** 2, q1 ** 2, 4)


def test_homological_solve_removes_image():
    N = polyalg.standard_nilpotent()
    gens = polyalg.nilpotent_generators()
    comp = polyalg.generator_products(gens, 3)
    q1, q2, p1, p2 = variables()
    R = q1 * q2 * p1 + p2 ** 3 * 2 + q1 ** 3
    f, residual = polyalg.homological_solve(N, R, 3, comp)
    assert (R + poisson_bracket(N, f) - residual).is_zero()
    assert polyalg.span_rank(comp + [residual], 3) == polyalg.span_rank(comp, 3)


def test_homological_solve_wrong_degree():
    N = polyalg.standard_nilpotent()
    q1, *_ = variables()
    with pytest.raises(ValueError):
        polyalg.homological_solve(N, q1 ** 2, 3, [])
