from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nilunfold import battery, linsymp
from nilunfold.linsymp import Tag
from nilunfold.polyalg import Polynomial

F = Fraction
rationals = st.fractions(min_value=-3, max_value=3, max_denominator=20)


def _power(A, k):
    out = linsymp.matrix(np.eye(4, dtype=int).tolist())
    for _ in range(k):
        out = out @ A
    return out


def test_standard_form_is_nilpotent_of_degree_four():
    A = linsymp.hamiltonian_matrix(linsymp.standard_form())
    assert linsymp.max_abs(_power(A, 4)) == 0
    assert linsymp.max_abs(_power(A, 3)) != 0


def test_zero_quadratic_gives_zero_matrix():
    assert linsymp.max_abs(linsymp.hamiltonian_matrix(Polynomial.zero())) == 0


def test_williamson_form_single_jordan_block():
    A = linsymp.hamiltonian_matrix(linsymp.williamson_form())
    assert linsymp.max_abs(_power(A, 4)) == 0
    assert linsymp.max_abs(_power(A, 3)) != 0


def test_quadratic_matrix_roundtrip():
    H = linsymp.williamson_form()
    assert linsymp.quadratic_from_matrix(linsymp.hamiltonian_matrix(H)) == H


def test_symplectic_examples():
    I = linsymp.matrix(np.eye(4, dtype=int).tolist())
    assert linsymp.is_symplectic(I)
    assert linsymp.is_symplectic(linsymp.williamson_to_standard())
    D = linsymp.matrix([[2, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]])
    assert not linsymp.is_symplectic(D)


def test_matrix_P_conjugates_exactly():
    P = linsymp.williamson_to_standard()
    A0 = linsymp.hamiltonian_matrix(linsymp.standard_form())
    A1 = linsymp.hamiltonian_matrix(linsymp.williamson_form())
    assert linsymp.max_abs(linsymp.conjugation_residual(P, A0, A1)) == 0
    assert linsymp.determinant(P) == 1


def test_versal_base_point():
    assert linsymp.phi_map(F(0), F(0)) == (0, 0)
    S = linsymp.versal_S(F(0), F(0))
    assert (S == linsymp.matrix(np.eye(4, dtype=int).tolist())).all()
    eig = linsymp.quartic_eigenvalues(linsymp.versal_J0(F(0), F(0)))
    assert np.all(eig == 0)


def test_phi_map_substitution():
    assert linsymp.phi_map(F(5, 4), F(1)) == (0, 1)


def test_versal_S_at_rational_point():
    mu1, nu1 = F(1, 2), F(1, 3)
    S = linsymp.versal_S(mu1, nu1)
    assert linsymp.max_abs(linsymp.symplectic_residual(S)) == 0
    mu0, nu0 = linsymp.phi_map(mu1, nu1)
    res = linsymp.versal_J1(mu1, nu1) @ S - S @ linsymp.versal_J0(mu0, nu0)
    assert linsymp.max_abs(res) == 0


@settings(max_examples=50, deadline=None)
@given(rationals, rationals)
def test_versal_S_exact_everywhere(mu1, nu1):
    S = linsymp.versal_S(mu1, nu1)
    mu0, nu0 = linsymp.phi_map(mu1, nu1)
    assert linsymp.max_abs(linsymp.symplectic_residual(S)) == 0
    assert linsymp.max_abs(linsymp.versal_J1(mu1, nu1) @ S - S @ linsymp.versal_J0(mu0, nu0)) == 0


@settings(max_examples=100, deadline=None)
@given(st.floats(-0.5, 0.5), st.floats(-0.5, 0.5))
def test_closed_forms_match_numpy(mu0, nu0):
    closed = linsymp.versal_J0_eigenvalues(mu0, nu0)
    numeric = np.linalg.eigvals(np.array(linsymp.versal_J0(mu0, nu0), dtype=float))
    # double roots lose half the digits in a generic eigensolver
    assert battery.multiset_distance(closed, numeric) < 1e-6


@settings(max_examples=100, deadline=None)
@given(st.floats(-0.5, 0.5), st.floats(-0.5, 0.5))
def test_quartic_eigenvalues_are_symmetric(mu0, nu0):
    eig = linsymp.quartic_eigenvalues(np.array(linsymp.versal_J0(mu0, nu0), dtype=float))
    assert battery.multiset_distance(eig, -eig) < 1e-12
    assert battery.multiset_distance(eig, np.conj(eig)) < 1e-12


def test_quartic_eigenvalues_rejects_non_hamiltonian():
    with pytest.raises(ValueError):
        linsymp.quartic_eigenvalues(np.diag([1.0, 2.0, 3.0, 4.0]))


def test_phi_grid_correspondence():
    assert battery.check_phi().passed


@pytest.mark.parametrize("eigs, tag", [
    ([1, -1, 1j, -1j], Tag.IMAG_PAIR_REAL_PAIR),
    ([1 + 1j, 1 - 1j, -1 + 1j, -1 - 1j], Tag.COMPLEX_QUARTET),
    ([1j, -1j, 2j, -2j], Tag.TWO_IMAG_PAIRS),
    ([1, -1, 2, -2], Tag.TWO_REAL_PAIRS),
    ([1j, -1j, 1j, -1j], Tag.DOUBLE_IMAG_PAIR),
    ([1, -1, 1, -1], Tag.DOUBLE_REAL_PAIR),
    ([1j, -1j, 0, 0], Tag.IMAG_PAIR_ZERO_PAIR),
    ([1, -1, 0, 0], Tag.REAL_PAIR_ZERO_PAIR),
    ([0, 0, 0, 0], Tag.QUADRUPLE_ZERO),
])
def test_classify_tags(eigs, tag):
    assert linsymp.classify(eigs).tag == tag


def test_classify_rejects_asymmetric():
    with pytest.raises(ValueError):
        linsymp.classify([1, 2, 3, 4])


def test_zero_pair_surface():
    nu0 = 0.4
    mu0 = 9 / 16 * nu0 ** 2
    eig = linsymp.versal_J0_eigenvalues(mu0, nu0)
    expected = Tag.IMAG_PAIR_ZERO_PAIR if np.max(np.abs(eig.imag)) > 0 else Tag.REAL_PAIR_ZERO_PAIR
    assert linsymp.classify_matrix(linsymp.versal_J0(mu0, nu0)).tag == expected


def test_double_imaginary_surface():
    nu0 = 0.4
    assert linsymp.classify_matrix(linsymp.versal_J0(-nu0 ** 2, nu0)).tag == Tag.DOUBLE_IMAG_PAIR


def test_eigen_grid_ordering():
    rows = linsymp.eigen_grid([-0.1, 0.1], [-0.1, 0.0, 0.1])
    assert [(r[0], r[1]) for r in rows] == [(m, n) for m in (-0.1, 0.1) for n in (-0.1, 0.0, 0.1)]
