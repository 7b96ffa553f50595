from __future__ import annotations

import math

import numpy as np
import pytest

from nilunfold import dynamics, normalform, unfolding
from nilunfold.normalform import GradedHamiltonian, HopfBasis
from nilunfold.polyalg import FLOAT, poisson_bracket, variables
from nilunfold.unfolding import CubicCoeffs, ParamsKMN

A100 = CubicCoeffs(1.0, 0.0, 0.0)
SQ2 = math.sqrt(2.0)


@pytest.fixture(scope="module")
def result():
    return normalform.hopf_normal_form(0.1, 0.0, A100)


def test_shift_by_zero():
    H = unfolding.hamiltonian(ParamsKMN(0.1, -0.2, 0.3), A100)
    assert normalform.shift_to_equilibrium(H, (0, 0, 0, 0)) == H.to_float()


def test_shift_removes_linear_terms():
    mu, nu, q0 = -0.05, 0.07, 0.12
    c = CubicCoeffs(1.0, 0.4, -0.3)
    H = unfolding.hamiltonian(ParamsKMN(unfolding.kappa_of(mu, nu, q0, c), mu, nu), c)
    K = normalform.shift_to_equilibrium(H, unfolding.equilibrium_from_q0(q0, mu, nu, c))
    assert K.homogeneous_part(1).max_abs_coefficient() <= 1e-10


def test_shift_example_one():
    mu = 0.04
    K = normalform.shift_to_equilibrium(dynamics.example_centre_saddle(mu), (math.sqrt(mu), 0, 0, 0))
    q1, _, p1, _ = variables(FLOAT)
    expected = q1 ** 2 * (-math.sqrt(mu)) + p1 ** 2 * 0.5 - q1 ** 3 * (1 / 3)
    assert (K - expected).max_abs_coefficient() < 1e-15


def test_apply_linear():
    H = unfolding.hamiltonian(ParamsKMN(0.0, 0.1, 0.2), A100)
    assert (normalform.apply_linear(H, np.eye(4)) - H.to_float()).max_abs_coefficient() == 0
    with pytest.raises(ValueError, match="not symplectic"):
        normalform.apply_linear(H, np.diag([2.0, 1.0, 1.0, 1.0]))


def test_graded_hamiltonian_truncation():
    q1, q2, p1, p2 = variables(FLOAT)
    G = GradedHamiltonian({0: q1 ** 5 + q1 ** 2, 1: q1 ** 4 + q2 ** 2, 3: q1 ** 2}, weight=1, truncation=4)
    assert G.part(0) == q1 ** 2
    assert G.part(1) == q2 ** 2
    assert G.part(3).is_zero()
    assert G.graded_degrees() == [2, 3]
    assert G.evaluate_beta(2.0) == q1 ** 2 + q2 ** 2 * 2.0


def test_graded_lie_transform_rejects_quadratic_generator():
    q1, *_ = variables(FLOAT)
    H = GradedHamiltonian({0: q1 ** 2})
    with pytest.raises(ValueError):
        H.lie_transform(GradedHamiltonian({0: q1 ** 2}))


def test_normal_form_input_is_fixed():
    hb = HopfBasis.standard(FLOAT)
    sigma = 0.5
    H = GradedHamiltonian({0: hb.S * sigma + hb.N + hb.M * hb.M * 3.0 + hb.S * hb.M})
    K, gens = normalform.normalize(H, hb.S * sigma, hb.N)
    assert all(p.max_abs_coefficient() < 1e-12 for G in gens for p in G.parts.values())
    assert (K.part(0) - H.part(0)).max_abs_coefficient() < 1e-14


def test_small_divisor_reported():
    hb = HopfBasis.standard(FLOAT)
    q1, q2, p1, p2 = variables(FLOAT)
    sigma = 1e-14
    H = GradedHamiltonian({0: hb.S * sigma + hb.N + q1 ** 3})
    with pytest.raises(ValueError, match="small divisor"):
        normalform.normalize(H, hb.S * sigma, hb.N)


def test_quartic_coefficient_extraction():
    hb = HopfBasis.standard(FLOAT)
    K = GradedHamiltonian({0: hb.S + hb.M * hb.M * 2.5}, normalized_degree=4)
    assert normalform.extract_m2_coefficient(K) == pytest.approx(2.5)
    with pytest.raises(ValueError):
        normalform.quartic_coefficients(GradedHamiltonian({0: hb.S}, normalized_degree=3))


def test_hopf_basis_relations():
    hb = HopfBasis.standard()
    assert poisson_bracket(hb.S, hb.N).is_zero()
    assert poisson_bracket(hb.S, hb.M).is_zero()
    assert poisson_bracket(hb.N, hb.M) == hb.T
    assert poisson_bracket(hb.N, hb.T) == hb.N * 2
    assert poisson_bracket(hb.M, hb.T) == hb.M * -2


def test_normal_form_lies_in_kernel_of_S(result):
    assert normalform.im_S_residual(result.normal_form) < 1e-9


def test_quartic_part_in_normal_form_span(result):
    assert normalform.quartic_coefficients(result.normal_form)["residual"] < 1e-9


def test_omega_and_leading_quadratic(result):
    assert result.omega == pytest.approx(1.0)
    assert result.quadratic["S"][0] == pytest.approx(1 / (2 * SQ2), rel=1e-12)
    assert result.quadratic["N"][0] == pytest.approx(1.0, rel=1e-12)
    assert abs(result.quadratic["M"][0]) < 1e-12


def test_linear_beta_terms(result):
    # coefficient of (p2 q1 - p1 q2) and of (p1^2 + p2^2) at first order in beta
    assert result.quadratic["S"][1] == pytest.approx(-2 * SQ2, rel=1e-8)
    assert result.quadratic["M"][1] / 2 == pytest.approx(1.0, rel=1e-8)


def _mean_imaginary_part(beta):
    # eigenvalues of the linear part at mu = mu_h + beta, a = (1,0,0), nu = 0.1, q0 = 0
    mu = unfolding.hopf_mu(0.1, 0.0, A100) + beta
    _, _, eig = unfolding.eigenvalues_QP(mu, 0.1, 0.0, A100)
    upper = sorted(eig, key=lambda z: -z.imag)[:2]
    return float(np.mean([z.imag for z in upper]))


def test_semisimple_series_matches_spectrum(result):
    # the S coefficient of the normal form is the mean frequency of the quartet
    S = result.quadratic["S"]
    for beta in (1e-4, 2e-4, -1e-4):
        series = S[0] + S[1] * beta + S[2] * beta ** 2
        assert abs(series - _mean_imaginary_part(beta)) < 5000 * abs(beta) ** 3 + 1e-12


def test_quadratic_invariant_product(result):
    # b c of b (q1^2 + q2^2) + c (p1^2 + p2^2) is fixed by the spectrum: beta/2 + 8 beta^2
    b = np.array(result.quadratic["N"]) / 2
    c = np.array(result.quadratic["M"]) / 2
    prod = np.convolve(b, c)[:3]
    assert prod == pytest.approx([0.0, 0.5, 8.0], abs=1e-8)


def test_m2_independent_sympy_oracle(result):
    sp = pytest.importorskip("sympy")
    import itertools

    q1, q2, p1, p2 = X = sp.symbols("q1 q2 p1 p2")

    def pb(f, g):
        return sp.expand(sum(sp.diff(f, X[i]) * sp.diff(g, X[i + 2]) - sp.diff(f, X[i + 2]) * sp.diff(g, X[i])
                             for i in (0, 1)))

    def monos(n):
        return [q1 ** a * q2 ** b * p1 ** c * p2 ** d
                for a, b, c, d in itertools.product(range(n + 1), repeat=4) if a + b + c + d == n]

    s2 = sp.sqrt(2)
    S = q1 * p2 - q2 * p1
    N = (q1 ** 2 + q2 ** 2) / 2
    M = (p1 ** 2 + p2 ** 2) / 2
    H2 = S / (2 * s2) + N
    H3 = (2 * s2 * q2 + 2 * p1) ** 3 / 6
    cs = sp.symbols(f"c0:{len(monos(3))}")
    f3 = sum(c * m for c, m in zip(cs, monos(3)))
    sol = sp.solve(sp.Poly(pb(S, sp.expand(H3 + pb(H2, f3))), *X).coeffs(), cs, dict=True)[0]
    f3 = f3.subs(sol).subs({c: 0 for c in cs})
    K4 = sp.expand(-pb(f3, H3) + pb(f3, pb(f3, H2)) / 2)
    ds = sp.symbols(f"d0:{len(monos(4))}")
    A, B, C = sp.symbols("A B C")
    g = sum(d * m for d, m in zip(ds, monos(4)))
    expr = sp.expand(K4 + pb(H2, g) - (A * M ** 2 + B * S * M + C * S ** 2))
    sol = sp.solve(sp.Poly(expr, *X).coeffs(), list(ds) + [A, B, C], dict=True)
    assert len({s[A] for s in sol}) == 1
    assert sol[0][A] == sp.Rational(1216, 9)
    # the cubic fed to the oracle is the q1^3/6 term seen through the Hopf matrix
    P = unfolding.hopf_transform(0.1, 0.0, A100)
    assert np.allclose(np.asarray(P, dtype=float)[0], [0, 2 * SQ2, 2, 0], atol=1e-12)
    assert result.cm == pytest.approx(1216 / 9, rel=1e-9)


@pytest.mark.parametrize("nu", [0.05, 0.2])
def test_m2_scales_with_omega(nu):
    r = normalform.hopf_normal_form(nu, 0.0, A100)
    assert r.omega ** 8 * r.cm == pytest.approx(1216 / 9, rel=1e-8)


def test_report_is_deterministic(result):
    again = normalform.hopf_normal_form(0.1, 0.0, A100)
    assert result.to_json() == again.to_json()
    rep = result.report()
    assert set(rep["coefficients"]) == {"S", "N", "M", "M2", "SM", "S2"}
    assert rep["coefficients"]["M2"] > 0


def test_hopf_normal_form_requires_hopf_point():
    with pytest.raises(ValueError):
        normalform.hopf_normal_form(-0.1, 0.0, A100)
