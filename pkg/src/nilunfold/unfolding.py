"""Three-parameter unfolding of the degree-4 nilpotent equilibrium.

The family is

    H = p2^2/2 - p1 q2 + kappa q1 + mu q1^2/2 + nu g2
        + a1 q1^3/6 + a2 q1 g2 + a3 g3,

with ``g2 = q2^2/2 + 3/4 p2 q1`` and
``g3 = 3/2 p1 q1^2 + 3/2 p2 q1 q2 + 2/3 q2^3``.  Equilibria are labelled by
their ``q1``-coordinate ``q0``; the triple ``(mu, nu, q0)`` fixes both the
Hamiltonian (through ``kappa_of``) and the equilibrium.

Closed forms are written so that ``Fraction`` inputs give exact results.
"""

from __future__ import annotations

import cmath
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from . import linsymp
from .linsymp import EigenConfig, Mat4, Tag, classify, even_quartic_roots
from .polyalg import EXACT, FLOAT, Polynomial, variables
from .tolerances import (
    CLASSIFY_TOL,
    NEWTON_MAX_ITER,
    ROOT_CLUSTER_TOL,
    ROOT_IMAG_TOL,
    ROOT_RESIDUAL_REL,
    negligible,
)

F = Fraction


@dataclass(frozen=True)
class CubicCoeffs:
    a1: float = 1.0
    a2: float = 0.0
    a3: float = 0.0

    def require_a1(self) -> None:
        if self.a1 == 0:
            raise ValueError("a1 must be nonzero")


@dataclass(frozen=True)
class ParamsKMN:
    kappa: float = 0.0
    mu: float = 0.0
    nu: float = 0.0


@dataclass(frozen=True)
class ParamsMNQ:
    mu: float = 0.0
    nu: float = 0.0
    q0: float = 0.0


@dataclass(frozen=True)
class EquilibriumRecord:
    """One equilibrium with its linear data.

    ``multiplicity`` is the multiplicity of ``q0`` as a root of the
    equilibrium polynomial.
    """

    state: tuple[float, float, float, float]
    q0: float
    eigenvalues: tuple[complex, complex, complex, complex]
    config: EigenConfig
    Q: float
    P: float
    multiplicity: int = 1

    def as_dict(self) -> dict:
        return {
            "q0": self.q0,
            "state": list(self.state),
            "multiplicity": self.multiplicity,
            "Q": self.Q,
            "P": self.P,
            "config": self.config.tag.value,
            "eigenvalues": [[z.real, z.imag] for z in self.eigenvalues],
        }


def _exact_scalar(x) -> bool:
    return isinstance(x, (int, Fraction)) and not isinstance(x, bool)


# Hamiltonian and vector field


def hamiltonian(p: ParamsKMN, c: CubicCoeffs) -> Polynomial:
    """The cubic-truncated Hamiltonian; exact when all inputs are rational."""
    values = (p.kappa, p.mu, p.nu, c.a1, c.a2, c.a3)
    field = EXACT if all(_exact_scalar(v) for v in values) else FLOAT
    half = F(1, 2) if field == EXACT else 0.5
    q1, q2, p1, p2 = variables(field)
    g2 = q2 ** 2 * half + q1 * p2 * (F(3, 4) if field == EXACT else 0.75)
    g3 = (q1 ** 2 * p1 + q1 * q2 * p2) * (F(3, 2) if field == EXACT else 1.5) \
        + q2 ** 3 * (F(2, 3) if field == EXACT else 2.0 / 3.0)
    H = p2 ** 2 * half - p1 * q2
    H = H + q1 * p.kappa + q1 ** 2 * p.mu * half + g2 * p.nu
    sixth = F(1, 6) if field == EXACT else 1.0 / 6.0
    H = H + q1 ** 3 * c.a1 * sixth + q1 * g2 * c.a2 + g3 * c.a3
    return H


def vector_field(x: Sequence[float], p: ParamsKMN, c: CubicCoeffs) -> np.ndarray:
    """Hamiltonian vector field ``Omega grad H`` in closed form."""
    q1, q2, p1, p2 = (float(v) for v in x)
    kappa, mu, nu = float(p.kappa), float(p.mu), float(p.nu)
    a1, a2, a3 = float(c.a1), float(c.a2), float(c.a3)
    dq1 = 1.5 * a3 * q1 ** 2 - q2
    dq2 = p2 + 0.75 * nu * q1 + 0.75 * a2 * q1 ** 2 + 1.5 * a3 * q1 * q2
    dp1 = -(kappa + mu * q1 + 0.75 * nu * p2 + 0.5 * a1 * q1 ** 2
            + a2 * (0.5 * q2 ** 2 + 1.5 * p2 * q1) + a3 * (3.0 * p1 * q1 + 1.5 * p2 * q2))
    dp2 = p1 - nu * q2 - a2 * q1 * q2 - a3 * (1.5 * p2 * q1 + 2.0 * q2 ** 2)
    return np.array([dq1, dq2, dp1, dp2])


def jacobian(x: Sequence[float], p: ParamsKMN, c: CubicCoeffs) -> np.ndarray:
    """``Omega Hess H(x)`` from the polynomial Hamiltonian."""
    H = hamiltonian(p, c).to_float()
    pt = [float(v) for v in x]
    hess = np.array([[float(H.diff(i).diff(j)(pt)) for j in range(4)] for i in range(4)])
    return linsymp.omega(False) @ hess


# equilibria


def equilibrium_from_q0(q0, mu, nu, c: CubicCoeffs) -> tuple:
    """The equilibrium with ``q1 = q0`` of the member ``kappa = kappa_of(...)``."""
    a2, a3 = c.a2, c.a3
    return (
        q0,
        F(3, 2) * a3 * q0 ** 2,
        F(3, 8) * (a3 * nu * q0 ** 2 + a2 * a3 * q0 ** 3 + 3 * a3 ** 3 * q0 ** 4),
        -F(3, 4) * (nu * q0 + a2 * q0 ** 2 + 3 * a3 ** 2 * q0 ** 3),
    )


def _kappa_terms(mu, nu, q0, c: CubicCoeffs) -> list:
    a1, a2, a3 = c.a1, c.a2, c.a3
    return [
        F(27, 16) * a3 ** 4 * q0 ** 5,
        F(45, 16) * a2 * a3 ** 2 * q0 ** 4,
        F(9, 4) * a3 ** 2 * nu * q0 ** 3,
        F(9, 8) * a2 ** 2 * q0 ** 3,
        F(27, 16) * a2 * nu * q0 ** 2,
        -F(1, 2) * a1 * q0 ** 2,
        F(9, 16) * nu ** 2 * q0,
        -mu * q0,
    ]


def kappa_of(mu, nu, q0, c: CubicCoeffs):
    """``kappa`` for which ``q0`` labels an equilibrium."""
    return sum(_kappa_terms(mu, nu, q0, c))


def equilibrium_polynomial(p: ParamsKMN, c: CubicCoeffs) -> list:
    """Coefficients (highest first) of ``kappa_of(mu, nu, q0) - kappa`` in ``q0``."""
    a1, a2, a3 = c.a1, c.a2, c.a3
    mu, nu = p.mu, p.nu
    return [
        F(27, 16) * a3 ** 4,
        F(45, 16) * a2 * a3 ** 2,
        F(9, 4) * a3 ** 2 * nu + F(9, 8) * a2 ** 2,
        F(27, 16) * a2 * nu - F(1, 2) * a1,
        F(9, 16) * nu ** 2 - mu,
        -p.kappa,
    ]


def _trim(coeffs: Sequence[float]) -> list[float]:
    out = [float(v) for v in coeffs]
    while out and out[0] == 0.0:
        out.pop(0)
    return out


def _newton(coeffs: np.ndarray, x: complex) -> complex:
    deriv = np.polyder(coeffs) if len(coeffs) > 1 else np.zeros(1)
    for _ in range(NEWTON_MAX_ITER):
        d = np.polyval(deriv, x)
        if d == 0:
            break
        step = np.polyval(coeffs, x) / d
        x = x - step
        if abs(step) <= 1e-16 * max(1.0, abs(x)):
            break
    return x


def _residual_ok(coeffs: np.ndarray, x: float) -> bool:
    scale = float(np.polyval(np.abs(coeffs), abs(x)))
    return abs(np.polyval(coeffs, x)) <= max(ROOT_RESIDUAL_REL * scale, 1e-300)


def _real_roots(coeffs: list[float]) -> list[tuple[float, int]]:
    """Distinct real roots with multiplicities, polished by Newton."""
    c = np.array(coeffs, dtype=float)
    roots = list(np.roots(c))
    # single-linkage clustering of nearly coincident roots
    clusters: list[list[complex]] = []
    for z in sorted(roots, key=lambda z: (z.real, z.imag)):
        for cl in clusters:
            if any(abs(z - w) <= 1e-6 * max(1.0, abs(w)) for w in cl):
                cl.append(z)
                break
        else:
            clusters.append([z])
    found: list[tuple[float, int]] = []
    for cl in clusters:
        m = len(cl)
        centre = sum(cl) / m
        if m == 1:
            x = _newton(c, complex(centre))
            if abs(x.imag) <= ROOT_IMAG_TOL * max(1.0, abs(x)):
                found.append((x.real, 1))
            continue
        if abs(centre.imag) > 1e-6 * max(1.0, abs(centre)):
            continue
        dm = c
        for _ in range(m - 1):
            dm = np.polyder(dm)
        x = _newton(dm, complex(centre.real)).real
        if m == 2:
            # local quadratic model around the critical point decides the split
            p0 = np.polyval(c, x)
            p2 = np.polyval(np.polyder(c, 2), x)
            h2 = -2.0 * p0 / p2 if p2 != 0 else 0.0
            if negligible(p0, float(np.polyval(np.abs(c), abs(x)))):
                h2 = 0.0
            if abs(h2) ** 0.5 <= ROOT_CLUSTER_TOL * max(1.0, abs(x)):
                found.append((x, 2))
            elif h2 > 0:
                h = h2 ** 0.5
                for s in (-1.0, 1.0):
                    found.append((_newton(c, complex(x + s * h)).real, 1))
            continue
        found.append((x, m))
    return sorted(found)


def solve_equilibria(p: ParamsKMN, c: CubicCoeffs, tol: float = CLASSIFY_TOL) -> list[EquilibriumRecord]:
    """All real equilibria of the member ``p``, ordered by ``q0``."""
    coeffs = _trim(equilibrium_polynomial(p, c))
    if not coeffs:
        raise ValueError("equilibrium equation is identically satisfied")
    if len(coeffs) == 1:
        return []
    out = []
    for q0, mult in _real_roots(coeffs):
        if not _residual_ok(np.array(coeffs), q0) and mult == 1:
            continue
        Q, P, eigs = eigenvalues_QP(p.mu, p.nu, q0, c)
        state = tuple(float(v) for v in equilibrium_from_q0(q0, float(p.mu), float(p.nu), c))
        out.append(EquilibriumRecord(state, float(q0), tuple(eigs), classify(eigs, tol),
                                     float(Q), float(P), mult))
    return out


# eigenvalues


def Q_value(nu, q0, c: CubicCoeffs):
    return 3 * c.a3 ** 2 * q0 ** 2 - 16 * c.a2 * q0 - 10 * nu


def _P_terms(mu, nu, q0, c: CubicCoeffs) -> list:
    a1, a2, a3 = c.a1, c.a2, c.a3
    return [
        -531 * a3 ** 4 * q0 ** 4,
        -816 * a2 * a3 ** 2 * q0 ** 3,
        -492 * a3 ** 2 * nu * q0 ** 2,
        40 * a2 ** 2 * q0 ** 2,
        104 * a2 * nu * q0,
        64 * nu ** 2,
        64 * a1 * q0,
        64 * mu,
    ]


def P_value(mu, nu, q0, c: CubicCoeffs):
    return sum(_P_terms(mu, nu, q0, c))


def _fold_terms(nu, q0, c: CubicCoeffs) -> list:
    a1, a2, a3 = c.a1, c.a2, c.a3
    return [
        F(9, 16) * nu ** 2,
        -a1 * q0,
        F(27, 8) * a2 * nu * q0,
        F(27, 8) * a2 ** 2 * q0 ** 2,
        F(27, 4) * a3 ** 2 * nu * q0 ** 2,
        F(45, 4) * a2 * a3 ** 2 * q0 ** 3,
        F(135, 16) * a3 ** 4 * q0 ** 4,
    ]


def _abs_sum(terms: Iterable) -> float:
    return float(sum(abs(float(t)) for t in terms))


def eigenvalues_QP(mu, nu, q0, c: CubicCoeffs) -> tuple:
    """``(Q, P, eigs)`` with eigenvalues ``+-sqrt(2)/4 sqrt(Q +- sqrt(P))``.

    The characteristic polynomial is ``l^4 - Q/4 l^2 + (Q^2 - P)/64`` and
    ``(Q^2 - P)/64 = fold_mu - mu``; that form is used for the constant
    term so it vanishes exactly on the fold surface.
    """
    Q = Q_value(nu, q0, c)
    P = P_value(mu, nu, q0, c)
    const = fold_mu(nu, q0, c) - mu
    q_scale = _abs_sum([3 * c.a3 ** 2 * q0 ** 2, 16 * c.a2 * q0, 10 * nu]) / 4
    c_scale = _abs_sum(_fold_terms(nu, q0, c)) + abs(float(mu))
    b = -F(Q) / 4 if _exact_scalar(Q) else -float(Q) / 4
    if _exact_scalar(b) and _exact_scalar(const):
        eigs = even_quartic_roots(F(b), F(const))
    else:
        eigs = even_quartic_roots(float(b), float(const), q_scale, c_scale)
    return Q, P, eigs


def eigenvalues_closed_form(mu, nu, q0, c: CubicCoeffs) -> np.ndarray:
    """The literal closed form with principal square roots, symmetrized."""
    Q = complex(float(Q_value(nu, q0, c)))
    root = cmath.sqrt(complex(float(P_value(mu, nu, q0, c))))
    out = []
    for s in (1, -1):
        lam = math.sqrt(2) / 4 * cmath.sqrt(Q + s * root)
        out += [lam, -lam]
    return np.array(out, dtype=complex)


# Hamiltonian-Hopf surface


def hopf_mu(nu, q0, c: CubicCoeffs):
    """``mu`` on the surface ``P = 0``."""
    a1, a2, a3 = c.a1, c.a2, c.a3
    return (-a1 * q0 - nu ** 2 - F(13, 8) * a2 * nu * q0 - F(5, 8) * a2 ** 2 * q0 ** 2
            + F(123, 16) * a3 ** 2 * nu * q0 ** 2 + F(51, 4) * a2 * a3 ** 2 * q0 ** 3
            + F(531, 64) * a3 ** 4 * q0 ** 4)


def _omega_squared_hopf(nu, q0, c: CubicCoeffs):
    Q = Q_value(nu, q0, c)
    scale = _abs_sum([3 * c.a3 ** 2 * q0 ** 2, 16 * c.a2 * q0, 10 * nu])
    if Q >= 0 or negligible(float(Q), scale):
        raise ValueError("real double pair, not a Hopf point (Q >= 0)")
    return -Q


def hopf_frequency(nu, q0, c: CubicCoeffs) -> float:
    """``omega = sqrt(-Q)``; the Hopf eigenvalues are ``+-i omega/(2 sqrt 2)``."""
    return math.sqrt(float(_omega_squared_hopf(nu, q0, c)))


def hopf_transform(nu, q0, c: CubicCoeffs) -> Mat4:
    """Symplectic ``P`` with ``P J_H = J' P`` at the Hopf equilibrium."""
    w = hopf_frequency(nu, q0, c)
    a2, a3, q0 = float(c.a2), float(c.a3), float(q0)
    s2 = math.sqrt(2.0)
    pt = np.array([
        [0.0, 1 / w, -3 * (4 * a2 * q0 - 87 * a3 ** 2 * q0 ** 2 + 6 * w ** 2) / (40 * w),
         -9 * a3 * q0 / (2 * w)],
        [2 * s2 / w ** 2, 6 * s2 * a3 * q0 / w ** 2,
         -3 * a3 * q0 * (a2 * q0 - 63 * a3 ** 2 * q0 ** 2 - 16 * w ** 2) / (10 * s2 * w ** 2),
         -3 * (4 * a2 * q0 + 93 * a3 ** 2 * q0 ** 2 + 6 * w ** 2) / (10 * s2 * w ** 2)],
        [2 / w, 6 * a3 * q0 / w,
         -3 * a3 * q0 * (a2 * q0 - 63 * a3 ** 2 * q0 ** 2 + 4 * w ** 2) / (20 * w),
         -(12 * a2 * q0 + 279 * a3 ** 2 * q0 ** 2 - 2 * w ** 2) / (20 * w)],
        [0.0, 1 / s2, (-12 * a2 * q0 + 261 * a3 ** 2 * q0 ** 2 + 2 * w ** 2) / (40 * s2),
         -9 * a3 * q0 / (2 * s2)],
    ])
    return pt.T.copy()


def hopf_quadratic(omega: float) -> Polynomial:
    """``omega/(2 sqrt 2) (p2 q1 - p1 q2) + 1/2 (q1^2 + q2^2)``."""
    q1, q2, p1, p2 = variables(FLOAT)
    sigma = omega / (2 * math.sqrt(2.0))
    return (p2 * q1 - p1 * q2) * sigma + (q1 ** 2 + q2 ** 2) * 0.5


def hopf_target(omega: float) -> Mat4:
    return linsymp.hamiltonian_matrix(hopf_quadratic(omega))


def cm_numerator(nu, q0, c: CubicCoeffs, omega2=None):
    """``omega^8 C_m`` as a polynomial in ``a``, ``q0`` and ``omega^2``."""
    if omega2 is None:
        omega2 = _omega_squared_hopf(nu, q0, c)
    a1, a2, a3 = c.a1, c.a2, c.a3
    w2 = omega2
    return (
        F(320, 3) * a1 ** 2 - 288 * a1 * a2 ** 2 * q0 + F(972, 5) * a2 ** 4 * q0 ** 2
        - 2808 * a1 * a2 * a3 ** 2 * q0 ** 2 + F(18954, 5) * a2 ** 3 * a3 ** 2 * q0 ** 3
        - 8064 * a1 * a3 ** 4 * q0 ** 3 + F(587331, 20) * a2 ** 2 * a3 ** 4 * q0 ** 4
        + F(530712, 5) * a2 * a3 ** 6 * q0 ** 5 + F(762048, 5) * a3 ** 8 * q0 ** 6
        + F(16, 3) * a1 * a2 * w2 - F(36, 5) * a2 ** 3 * q0 * w2 - 344 * a1 * a3 ** 2 * q0 * w2
        + F(11907, 50) * a2 ** 2 * a3 ** 2 * q0 ** 2 * w2
        + F(180513, 50) * a2 * a3 ** 4 * q0 ** 3 * w2 + F(609093, 50) * a3 ** 6 * q0 ** 4 * w2
        - F(36, 5) * a2 ** 2 * w2 ** 2 - F(682, 25) * a2 * a3 ** 2 * q0 * w2 ** 2
        + F(25959, 100) * a3 ** 4 * q0 ** 2 * w2 ** 2 + F(1328, 75) * a3 ** 2 * w2 ** 3
    )


def cm_coefficient(nu, q0, c: CubicCoeffs) -> float:
    """Coefficient of ``M^2`` in the Hopf normal form."""
    w2 = _omega_squared_hopf(nu, q0, c)
    return float(cm_numerator(nu, q0, c, w2)) / float(w2) ** 4


# centre-saddle (fold) surface


def fold_mu(nu, q0, c: CubicCoeffs):
    """``mu`` on the fold surface, where ``d kappa / d q0 = 0``."""
    return sum(_fold_terms(nu, q0, c))


def fold_second_derivative(nu, q0, c: CubicCoeffs):
    """``d^2 kappa / d q0^2`` on the fold surface."""
    a1, a2, a3 = c.a1, c.a2, c.a3
    return (-a1 + F(27, 8) * a2 * nu + F(27, 4) * a2 ** 2 * q0 + F(27, 2) * a3 ** 2 * nu * q0
            + F(135, 4) * a2 * a3 ** 2 * q0 ** 2 + F(135, 4) * a3 ** 4 * q0 ** 3)


def fold_lambda(nu, q0, c: CubicCoeffs):
    """``lambda = -20 nu - 32 a2 q0 + 6 a3^2 q0^2``; its sign picks the branch."""
    return -20 * nu - 32 * c.a2 * q0 + 6 * c.a3 ** 2 * q0 ** 2


def _fold_lambda_checked(nu, q0, c: CubicCoeffs):
    lam = fold_lambda(nu, q0, c)
    scale = _abs_sum([20 * nu, 32 * c.a2 * q0, 6 * c.a3 ** 2 * q0 ** 2])
    if lam == 0 or negligible(float(lam), scale):
        raise ValueError("lambda = 0: point on the nilpotent line")
    return lam


def fold_frequency(nu, q0, c: CubicCoeffs) -> float:
    """``omega = sqrt(|lambda|/8)``, the modulus of the nonzero eigenvalue pair."""
    return math.sqrt(abs(float(_fold_lambda_checked(nu, q0, c))) / 8.0)


def fold_branch(nu, q0, c: CubicCoeffs) -> str:
    return "hyperbolic" if _fold_lambda_checked(nu, q0, c) > 0 else "elliptic"


def fold_quadratic(omega: float, branch: str) -> Polynomial:
    q1, q2, p1, p2 = variables(FLOAT)
    if branch == "hyperbolic":
        return p1 ** 2 * 0.5 + (p2 ** 2 - q2 ** 2) * (0.5 * omega)
    if branch == "elliptic":
        return p1 ** 2 * (-0.5) + (p2 ** 2 + q2 ** 2) * (0.5 * omega)
    raise ValueError(f"unknown branch {branch!r}")


def fold_target(omega: float, branch: str) -> Mat4:
    return linsymp.hamiltonian_matrix(fold_quadratic(omega, branch))


def fold_transform(nu, q0, c: CubicCoeffs, branch: str) -> Mat4:
    """Symplectic ``P`` taking the fold linearization to the branch target."""
    if branch not in ("hyperbolic", "elliptic"):
        raise ValueError(f"unknown branch {branch!r}")
    actual = fold_branch(nu, q0, c)
    if actual != branch:
        raise ValueError(f"branch mismatch: lambda selects the {actual} branch")
    w = fold_frequency(nu, q0, c)
    a2, a3, q0 = float(c.a2), float(c.a3), float(q0)
    sw, w32 = math.sqrt(w), w ** 1.5
    if branch == "hyperbolic":
        pt = np.array([
            [-1 / w, -3 * a3 * q0 / w,
             3 * a3 * q0 * (a2 * q0 - 63 * a3 ** 2 * q0 ** 2 + 4 * w ** 2) / (40 * w),
             3 * (4 * a2 * q0 + 93 * a3 ** 2 * q0 ** 2 - 4 * w ** 2) / (40 * w)],
            [0.0, -1 / sw, -3 * (-4 * a2 * q0 + 87 * a3 ** 2 * q0 ** 2 + 4 * w ** 2) / (40 * sw),
             9 * a3 * q0 / (2 * sw)],
            [0.0, 1 / w, -(12 * a2 * q0 - 261 * a3 ** 2 * q0 ** 2 + 28 * w ** 2) / (40 * w),
             -9 * a3 * q0 / (2 * w)],
            [1 / w32, 3 * a3 * q0 / w32,
             3 * a3 * q0 * (-a2 * q0 + 63 * a3 ** 2 * q0 ** 2 + 36 * w ** 2) / (40 * w32),
             (-12 * a2 * q0 - 279 * a3 ** 2 * q0 ** 2 - 28 * w ** 2) / (40 * w32)],
        ])
    else:
        pt = np.array([
            [1 / w, 3 * a3 * q0 / w,
             -3 * a2 * a3 * q0 ** 2 / (40 * w) + 189 * a3 ** 3 * q0 ** 3 / (40 * w) + 3 * a3 * q0 * w / 10,
             -3 * a2 * q0 / (10 * w) - 279 * a3 ** 2 * q0 ** 2 / (40 * w) - 3 * w / 10],
            [0.0, 1 / sw,
             -3 * a2 * q0 / (10 * sw) + 261 * a3 ** 2 * q0 ** 2 / (40 * sw) - 3 * w32 / 10,
             -9 * a3 * q0 / (2 * sw)],
            [0.0, 1 / w, -3 * a2 * q0 / (10 * w) + 261 * a3 ** 2 * q0 ** 2 / (40 * w) + 7 * w / 10,
             -9 * a3 * q0 / (2 * w)],
            [1 / w32, 3 * a3 * q0 / w32,
             -3 * a2 * a3 * q0 ** 2 / (40 * w32) + 189 * a3 ** 3 * q0 ** 3 / (40 * w32)
             - 2.7 * a3 * q0 * sw,
             -3 * a2 * q0 / (10 * w32) - 279 * a3 ** 2 * q0 ** 2 / (40 * w32) + 7 * sw / 10],
        ])
    return pt.T.copy()


def _cubic_formula(q0, c: CubicCoeffs, w2):
    a1, a2, a3 = c.a1, c.a2, c.a3
    return (-a1 / 6 if not _exact_scalar(a1) else -F(a1) / 6) \
        + F(9, 40) * a2 ** 2 * q0 + F(351, 160) * a2 * a3 ** 2 * q0 ** 2 \
        + F(63, 10) * a3 ** 4 * q0 ** 3 - F(9, 40) * a2 * w2 - F(9, 10) * a3 ** 2 * q0 * w2


def fold_cubic_scaled(nu, q0, c: CubicCoeffs):
    """``omega^3`` times the ``q1^3`` coefficient after the fold transformation.

    Hyperbolic branch: ``-a1/6 + 9/40 a2^2 q0 + ... - 9/10 a3^2 q0 omega^2``
    with ``omega^2 = lambda/8``.  Elliptic branch: the negative of the same
    polynomial evaluated at ``-omega^2 = lambda/8``.  Rational inputs give a
    rational result.
    """
    lam = _fold_lambda_checked(nu, q0, c)
    eighth = lam / 8 if not _exact_scalar(lam) else F(lam) / 8
    if lam > 0:
        return _cubic_formula(q0, c, eighth)
    return -_cubic_formula(q0, c, eighth)


def fold_cubic_coefficient(nu, q0, c: CubicCoeffs) -> float:
    """Coefficient of ``q1^3`` in the shifted, transformed Hamiltonian."""
    return float(fold_cubic_scaled(nu, q0, c)) / fold_frequency(nu, q0, c) ** 3


# nilpotent line


def nilpotent_line(q0, c: CubicCoeffs):
    """``nu(q0)`` along which fold and Hopf surfaces are tangent."""
    return -F(8, 5) * c.a2 * q0 + F(3, 10) * c.a3 ** 2 * q0 ** 2


def nilpotent_point(q0, c: CubicCoeffs) -> tuple:
    """``(kappa, mu, nu, q0)`` on the nilpotent line."""
    nu = nilpotent_line(q0, c)
    mu = fold_mu(nu, q0, c)
    return kappa_of(mu, nu, q0, c), mu, nu, q0


# surface sampling


SURFACE_COLUMNS = ("mu", "nu", "q0", "kappa", "Q", "P", "config", "on_fold", "on_hopf")


@dataclass(frozen=True)
class SurfaceRow:
    mu: float
    nu: float
    q0: float
    kappa: float
    Q: float
    P: float
    config: str
    on_fold: bool
    on_hopf: bool

    def as_tuple(self) -> tuple:
        return tuple(getattr(self, k) for k in SURFACE_COLUMNS)


def classify_point(mu, nu, q0, c: CubicCoeffs, tol: float = CLASSIFY_TOL) -> SurfaceRow:
    Q, P, eigs = eigenvalues_QP(mu, nu, q0, c)
    config = classify(eigs, tol).tag
    const = float(fold_mu(nu, q0, c)) - float(mu)
    on_fold = const == 0.0 or negligible(const, _abs_sum(_fold_terms(nu, q0, c)) + abs(float(mu)))
    p_scale = _abs_sum(_P_terms(mu, nu, q0, c))
    on_hopf = config == Tag.DOUBLE_IMAG_PAIR or (
        (float(P) == 0.0 or negligible(float(P), p_scale)) and float(Q) < 0)
    return SurfaceRow(float(mu), float(nu), float(q0), float(kappa_of(mu, nu, q0, c)),
                      float(Q), float(P), config.value, bool(on_fold), bool(on_hopf))


def surface_sample(c: CubicCoeffs, mu_values: Sequence[float], nu_values: Sequence[float],
                   q0_values: Sequence[float], surfaces: bool = False, threads: int = 1,
                   tol: float = CLASSIFY_TOL) -> list[SurfaceRow]:
    """Classify every grid point of ``(mu, nu, q0)``.

    Rows are ordered by ``nu``, then ``q0``, then ``mu``.  With ``surfaces``
    the fold point ``mu = fold_mu`` and, where ``Q < 0``, the Hopf point
    ``mu = hopf_mu`` are appended after the ``mu`` values of each
    ``(nu, q0)`` pair.
    """
    points = []
    for nu in nu_values:
        for q0 in q0_values:
            for mu in mu_values:
                points.append((float(mu), float(nu), float(q0)))
            if surfaces:
                points.append((float(fold_mu(float(nu), float(q0), c)), float(nu), float(q0)))
                if Q_value(float(nu), float(q0), c) < 0:
                    points.append((float(hopf_mu(float(nu), float(q0), c)), float(nu), float(q0)))
    work = lambda pt: classify_point(pt[0], pt[1], pt[2], c, tol)  # noqa: E731
    if threads > 1 and len(points) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(work, points))
    return [work(pt) for pt in points]
