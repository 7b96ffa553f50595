from __future__ import annotations

import math

import numpy as np
import pytest

from nilunfold import battery, dynamics, linsymp, unfolding
from nilunfold.dynamics import LEAPFROG, RK4
from nilunfold.polyalg import FLOAT, variables
from nilunfold.unfolding import CubicCoeffs, ParamsKMN


def test_free_particle_drifts_in_a_straight_line():
    _, _, p1, _ = variables(FLOAT)
    H = p1 ** 2 * 0.5
    for method in (RK4, LEAPFROG):
        tr = dynamics.integrate(H, (0.0, 0.0, 0.3, 0.0), 0.01, 1.0, method)
        assert tr.states[-1] == pytest.approx((0.3, 0.0, 0.3, 0.0), abs=1e-14)
        assert tr.energy_drift() == 0.0


def test_centre_stays_bounded():
    H = dynamics.example_centre_saddle(0.04)
    for method in (RK4, LEAPFROG):
        tr = dynamics.integrate(H, (-0.2, 0.0, 0.01, 0.0), 1e-2, 100.0, method)
        assert not tr.escaped
        assert np.max(np.abs(tr.states[:, 0] + 0.2)) < 0.1


def test_centre_at_rest():
    tr = dynamics.integrate(dynamics.example_centre_saddle(0.04), (-0.2, 0, 0, 0), 1e-2, 10.0)
    assert np.max(np.abs(tr.states[-1] - (-0.2, 0, 0, 0))) < 1e-12


def test_saddle_eigenvalues():
    J = dynamics.finite_difference_jacobian(dynamics.example_centre_saddle(0.04), (0.2, 0, 0, 0))
    eig = np.linalg.eigvals(J)
    r = math.sqrt(2 * 0.2)
    assert battery.multiset_distance(eig, [r, -r, 0, 0]) < 1e-6


def test_centre_eigenvalues():
    J = dynamics.finite_difference_jacobian(dynamics.example_centre_saddle(0.04), (-0.2, 0, 0, 0))
    r = 1j * math.sqrt(2 * 0.2)
    assert battery.multiset_distance(np.linalg.eigvals(J), [r, -r, 0, 0]) < 1e-6


def test_escape_is_flagged():
    tr = dynamics.integrate(dynamics.example_centre_saddle(0.04), (0.5, 0, 0.5, 0), 1e-2, 100.0)
    assert tr.escaped
    assert tr.notes and tr.notes[0].startswith("escaped")
    assert np.all(np.linalg.norm(tr.states, axis=1) <= dynamics.ESCAPE_RADIUS)


@pytest.mark.parametrize("mu", [-0.1, 0.0, 0.1])
def test_example_two_eigenvalues(mu):
    A = linsymp.hamiltonian_matrix(dynamics.example_hopf_linear(mu))
    eig = linsymp.quartic_eigenvalues(np.asarray(A, dtype=float))
    assert battery.multiset_distance(eig, dynamics.example_hopf_eigenvalues(mu)) < 1e-12


def test_rk4_energy_drift_example_two():
    H = dynamics.example_hopf_linear(-0.1)
    tr = dynamics.integrate(H, dynamics.stable_start(H), 1e-3, 100.0, RK4)
    assert not tr.escaped
    assert tr.energy_drift() <= 1e-8


def test_leapfrog_falls_back_for_mixed_hamiltonian():
    H = dynamics.example_hopf_linear(0.1)
    tr = dynamics.integrate(H, (0.1, 0, 0, 0), 1e-2, 1.0, LEAPFROG)
    assert tr.fallback and tr.method == LEAPFROG
    ref = dynamics.integrate(H, (0.1, 0, 0, 0), 1e-2, 1.0, RK4)
    assert np.array_equal(tr.states, ref.states)


def test_separable_split():
    T, V = dynamics.split_separable(dynamics.example_centre_saddle(0.04))
    assert all(m[0] == m[1] == 0 for m in T.terms)
    assert all(m[2] == m[3] == 0 for m in V.terms)
    assert dynamics.split_separable(dynamics.example_hopf_linear(0.0)) is None


def test_equilibrium_residual():
    H0 = unfolding.hamiltonian(ParamsKMN(0, 0, 0), CubicCoeffs())
    assert dynamics.equilibrium_residual(H0, (0, 0, 0, 0)) == 0
    assert dynamics.equilibrium_residual(H0, (0.3, -0.2, 0.1, 0.4)) > 0
    c = CubicCoeffs(1.0, 0.2, -0.4)
    mu, nu, q0 = -0.03, 0.05, 0.1
    H = unfolding.hamiltonian(ParamsKMN(unfolding.kappa_of(mu, nu, q0, c), mu, nu), c)
    assert dynamics.equilibrium_residual(H, unfolding.equilibrium_from_q0(q0, mu, nu, c)) <= 1e-12


def test_compiled_polynomial_matches_evaluation():
    H = unfolding.hamiltonian(ParamsKMN(0.1, -0.2, 0.3), CubicCoeffs(1.0, 0.5, -0.5))
    f = dynamics.compile_polynomial(H)
    x = (0.1, -0.2, 0.3, 0.05)
    assert f(*x) == pytest.approx(float(H.to_float()(x)), abs=1e-15)


def test_bad_arguments():
    H = dynamics.example_centre_saddle(0.04)
    with pytest.raises(ValueError):
        dynamics.integrate(H, (0, 0, 0, 0), 0.0, 1.0)
    with pytest.raises(ValueError):
        dynamics.integrate(H, (0, 0, 0, 0), 0.1, 0.01)
    with pytest.raises(ValueError):
        dynamics.integrate(H, (0, 0, 0, 0), 0.1, 1.0, "euler")


def test_run_many_ordering():
    H = dynamics.example_centre_saddle(0.04)
    jobs = [(H, (-0.2 + 0.01 * k, 0, 0, 0), 1e-2, 1.0) for k in range(4)]
    a = dynamics.run_many(jobs, threads=1)
    b = dynamics.run_many(jobs, threads=3)
    assert all(np.array_equal(x.states, y.states) for x, y in zip(a, b))
