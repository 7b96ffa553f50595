"""Linear Hamiltonian algebra on R^4.

Matrices are 4x4 numpy arrays.  Exact matrices use ``dtype=object`` with
``Fraction`` entries, so ``@`` and ``.T`` keep working and every check on
them is an exact identity; float matrices are ordinary ``float64`` arrays.
"""

from __future__ import annotations

import cmath
import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from . import exact
from .polyalg import EXACT, FLOAT, Polynomial
from .tolerances import CLASSIFY_TOL, negligible

Mat4 = np.ndarray


def _is_exact_scalar(x) -> bool:
    return isinstance(x, (int, Fraction)) and not isinstance(x, bool)


def matrix(rows: Sequence[Sequence]) -> Mat4:
    """Build a 4x4 matrix, exact when every entry is an int or Fraction."""
    flat = [x for row in rows for x in row]
    if all(_is_exact_scalar(x) for x in flat):
        out = np.empty((len(rows), len(rows[0])), dtype=object)
        for i, row in enumerate(rows):
            for j, x in enumerate(row):
                out[i, j] = Fraction(x)
        return out
    return np.array([[float(x) for x in row] for row in rows], dtype=float)


def is_exact(a: Mat4) -> bool:
    return a.dtype == object


def omega(exact_entries: bool = True) -> Mat4:
    rows = [[0, 0, 1, 0], [0, 0, 0, 1], [-1, 0, 0, 0], [0, -1, 0, 0]]
    return matrix(rows) if exact_entries else np.array(rows, dtype=float)


def _omega_like(a: Mat4) -> Mat4:
    return omega(is_exact(a))


def max_abs(a: Mat4) -> float:
    return max((abs(float(x)) for x in np.ravel(a)), default=0.0)


# quadratic forms


def quadratic_vector(H2: Polynomial) -> list:
    """Coefficients of a quadratic in the degree-2 monomial basis."""
    return H2.to_vector(2)


def quadratic_from_vector(vec: Sequence, field: str = EXACT) -> Polynomial:
    return Polynomial.from_vector(vec, 2, field)


def hessian(H2: Polynomial) -> Mat4:
    if H2.degree() > 2 or (not H2.is_zero() and H2.lowest_degree() < 2):
        raise ValueError("hessian expects a homogeneous quadratic")
    zero = Fraction(0) if H2.field == EXACT else 0.0
    rows = [[zero] * 4 for _ in range(4)]
    for m, c in H2.terms.items():
        idx = [i for i, e in enumerate(m) for _ in range(e)]
        i, j = idx
        if i == j:
            rows[i][i] += 2 * c
        else:
            rows[i][j] += c
            rows[j][i] += c
    if H2.field == EXACT:
        return matrix(rows)
    return np.array(rows, dtype=float)


def hamiltonian_matrix(H2: Polynomial | Sequence) -> Mat4:
    """``Omega @ Hessian(H2)``, the linear vector field of ``H2``."""
    if not isinstance(H2, Polynomial):
        vec = list(H2)
        field = EXACT if all(_is_exact_scalar(x) for x in vec) else FLOAT
        H2 = quadratic_from_vector(vec, field)
    hess = hessian(H2)
    return _omega_like(hess) @ hess


def quadratic_from_matrix(A: Mat4) -> Polynomial:
    """Inverse of :func:`hamiltonian_matrix`: ``H = x^T (-Omega A) x / 2``."""
    S = -(_omega_like(A) @ A)
    field = EXACT if is_exact(A) else FLOAT
    half = Fraction(1, 2) if field == EXACT else 0.5
    terms = {}
    for i in range(4):
        for j in range(i, 4):
            m = [0, 0, 0, 0]
            m[i] += 1
            m[j] += 1
            c = S[i, i] * half if i == j else (S[i, j] + S[j, i]) * half
            terms[tuple(m)] = c
    return Polynomial(terms, field)


def is_hamiltonian_matrix(A: Mat4, tol: float = 0.0) -> bool:
    S = _omega_like(A) @ A
    return max_abs(S - S.T) <= tol


# symplectic checks


def symplectic_residual(P: Mat4) -> Mat4:
    W = _omega_like(P)
    return P.T @ W @ P - W


def is_symplectic(P: Mat4, tol: float = 0.0) -> bool:
    return max_abs(symplectic_residual(P)) <= tol


def conjugation_residual(P: Mat4, source: Mat4, target: Mat4) -> Mat4:
    """``P @ source - target @ P``; zero when ``x = P y`` carries one into the other."""
    return P @ source - target @ P


def determinant(a: Mat4):
    if is_exact(a):
        return exact.det([list(row) for row in a])
    return float(np.linalg.det(a))


# normal forms of the nilpotent block


def standard_form() -> Polynomial:
    return Polynomial.parse("1/2 * p2^2 + -1 * q2 p1")


def williamson_form() -> Polynomial:
    return Polynomial.parse("1/2 * p1^2 + -1 * q1 q2 + -1 * q2 p1")


def williamson_to_standard() -> Mat4:
    """Symplectic ``P`` with ``P Omega A0 = Omega A1 P``.

    ``A0`` and ``A1`` are the Hessians of the standard and Williamson forms.
    """
    return matrix([[0, 1, 0, -1], [0, 0, 1, 0], [0, 0, 0, 1], [-1, 0, 0, 0]])


def versal_hamiltonian_0(mu0, nu0) -> Polynomial:
    """``p2^2/2 - p1 q2 + mu0 q1^2/2 + nu0 (q2^2/2 + 3/4 p2 q1)``."""
    field = EXACT if _is_exact_scalar(mu0) and _is_exact_scalar(nu0) else FLOAT
    half = Fraction(1, 2) if field == EXACT else 0.5
    q = Fraction(3, 4) if field == EXACT else 0.75
    return Polynomial(
        {
            (0, 0, 0, 2): half,
            (0, 1, 1, 0): -1,
            (2, 0, 0, 0): mu0 * half,
            (0, 2, 0, 0): nu0 * half,
            (1, 0, 0, 1): nu0 * q,
        },
        field,
    )


def versal_hamiltonian_1(mu1, nu1) -> Polynomial:
    """``p2^2/2 - p1 q2 + nu1 q1^2/2 + mu1 p2 q1``."""
    field = EXACT if _is_exact_scalar(mu1) and _is_exact_scalar(nu1) else FLOAT
    half = Fraction(1, 2) if field == EXACT else 0.5
    return Polynomial(
        {(0, 0, 0, 2): half, (0, 1, 1, 0): -1, (2, 0, 0, 0): nu1 * half, (1, 0, 0, 1): mu1},
        field,
    )


def versal_J0(mu0, nu0) -> Mat4:
    return hamiltonian_matrix(versal_hamiltonian_0(mu0, nu0))


def versal_J1(mu1, nu1) -> Mat4:
    return hamiltonian_matrix(versal_hamiltonian_1(mu1, nu1))


def phi_map(mu1, nu1) -> tuple:
    """Parameter change ``(mu1, nu1) -> (mu0, nu0)`` between the two charts.

    ``nu0 = +4/5 mu1``: with the opposite sign ``J0(phi)`` would carry the
    eigenvalues of ``J1(-mu1, nu1)`` instead of ``J1(mu1, nu1)``.
    """
    if _is_exact_scalar(mu1) and _is_exact_scalar(nu1):
        return nu1 - Fraction(16, 25) * mu1 ** 2, Fraction(4, 5) * mu1
    return nu1 - 16.0 / 25.0 * mu1 ** 2, 0.8 * mu1


def versal_S(mu1, nu1) -> Mat4:
    """Symplectic ``S`` with ``J1(mu1, nu1) S = S J0(phi(mu1, nu1))``."""
    s = Fraction(-2, 5) * mu1 if _is_exact_scalar(mu1) else -0.4 * mu1
    zero = 0 if _is_exact_scalar(mu1) else 0.0
    return matrix([[1, 0, 0, 0], [0, 1, 0, 0], [zero, s, 1, 0], [s, zero, 0, 1]])


def _snap(z: complex, scale: float) -> complex:
    return 0j if negligible(abs(z), scale) else z


def versal_J0_eigenvalues(mu0: float, nu0: float) -> np.ndarray:
    """``+-1/2 sqrt(-5 nu0 +- 4 sqrt(mu0 + nu0^2))``.

    A radicand inside the rounding noise of its two terms is taken as zero.
    """
    rad = mu0 + nu0 ** 2
    if negligible(rad, abs(mu0) + nu0 ** 2):
        rad = 0.0
    r = cmath.sqrt(rad)
    out = []
    for s in (1, -1):
        lam = 0.5 * cmath.sqrt(_snap(-5 * nu0 + s * 4 * r, 5 * abs(nu0) + 4 * abs(r)))
        out += [lam, -lam]
    return np.array(out, dtype=complex)


def versal_J1_eigenvalues(mu1: float, nu1: float) -> np.ndarray:
    """``+-sqrt(-mu1 +- sqrt(nu1))``."""
    r = cmath.sqrt(nu1)
    out = []
    for s in (1, -1):
        lam = cmath.sqrt(_snap(-mu1 + s * r, abs(mu1) + abs(r)))
        out += [lam, -lam]
    return np.array(out, dtype=complex)


# eigenvalues


def even_quartic_roots(b, c, b_scale: float | None = None, c_scale: float | None = None) -> np.ndarray:
    """Roots of ``l^4 + b l^2 + c``, returned as ``[l1, -l1, l2, -l2]``.

    ``b_scale`` and ``c_scale`` are the magnitudes of the sums that produced
    ``b`` and ``c``; values inside their rounding noise are treated as zero.
    Exact (``Fraction``) inputs are decided exactly.
    """
    if isinstance(b, Fraction) and isinstance(c, Fraction):
        disc = b * b - 4 * c
        c_zero, disc_zero = c == 0, disc == 0
        b, c, disc = float(b), float(c), float(disc)
    else:
        b, c = float(b), float(c)
        if b_scale is not None and negligible(b, b_scale):
            b = 0.0
        c_zero = c == 0 or (c_scale is not None and negligible(c, c_scale))
        if c_zero:
            c = 0.0
        disc = b * b - 4 * c
        disc_zero = disc == 0 or negligible(disc, b * b + 4 * abs(c) + (b_scale or 0) * abs(b))
    if c_zero:
        z1, z2 = -b, 0.0
    elif disc_zero:
        z1 = z2 = -b / 2
    elif disc > 0:
        root = disc ** 0.5
        z1 = (-b - root) / 2 if b > 0 else (-b + root) / 2
        z2 = c / z1
    else:
        root = (-disc) ** 0.5
        z1 = complex(-b / 2, root / 2)
        z2 = z1.conjugate()
    l1 = cmath.sqrt(complex(z1))
    l2 = cmath.sqrt(complex(z2))
    return np.array([l1, -l1, l2, -l2], dtype=complex)


def quartic_eigenvalues(A: Mat4, tol: float = 1e-9) -> np.ndarray:
    """Eigenvalues of a 4x4 Hamiltonian matrix via ``l^4 + b l^2 + c``.

    ``b = -tr(A^2)/2`` and ``c = det A``.  The output is closed under
    negation by construction.
    """
    A2 = A @ A
    trace = sum(A[i, i] for i in range(4))
    trace3 = sum((A2 @ A)[i, i] for i in range(4))
    norm = max(1.0, max_abs(A))
    if is_exact(A):
        if trace != 0 or trace3 != 0:
            raise ValueError("matrix is not Hamiltonian (odd characteristic coefficients)")
        b = -Fraction(sum(A2[i, i] for i in range(4))) / 2
        return even_quartic_roots(b, exact.det([list(r) for r in A]))
    if abs(trace) > tol * norm or abs(trace3) > tol * norm ** 3:
        raise ValueError("matrix is not Hamiltonian (odd characteristic coefficients)")
    b = -float(np.trace(A2)) / 2
    b_scale = float(np.sum(np.abs(A) * np.abs(A.T))) / 2
    with np.errstate(all="ignore"):  # subnormal entries
        c = float(np.linalg.det(A))
    c_scale = 24.0 * max_abs(A) ** 4
    return even_quartic_roots(b, c, b_scale, c_scale)


# configurations


class Tag(str, enum.Enum):
    COMPLEX_QUARTET = "ComplexQuartet"
    TWO_IMAG_PAIRS = "TwoImagPairs"
    TWO_REAL_PAIRS = "TwoRealPairs"
    IMAG_PAIR_REAL_PAIR = "ImagPairRealPair"
    DOUBLE_IMAG_PAIR = "DoubleImagPair"
    DOUBLE_REAL_PAIR = "DoubleRealPair"
    IMAG_PAIR_ZERO_PAIR = "ImagPairZeroPair"
    REAL_PAIR_ZERO_PAIR = "RealPairZeroPair"
    QUADRUPLE_ZERO = "QuadrupleZero"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class EigenConfig:
    tag: Tag
    eigenvalues: tuple[complex, ...]

    def __str__(self) -> str:
        return self.tag.value


def _has_partner(lam: complex, eigs: Sequence[complex], tol: float) -> bool:
    return min(abs(lam - e) for e in eigs) <= tol


def classify(eigs: Iterable[complex], tol: float = CLASSIFY_TOL) -> EigenConfig:
    """Configuration of a Hamiltonian eigenvalue quartet."""
    eigs = [complex(e) for e in eigs]
    if len(eigs) != 4:
        raise ValueError("expected four eigenvalues")
    scale = max(1.0, max(abs(e) for e in eigs))
    t = tol * scale
    for e in eigs:
        if not (_has_partner(-e, eigs, 1e3 * t) and _has_partner(e.conjugate(), eigs, 1e3 * t)):
            raise ValueError("eigenvalues are not symmetric under negation and conjugation")
    zero = [e for e in eigs if abs(e) <= t]
    rest = [e for e in eigs if abs(e) > t]
    config = tuple(eigs)
    if len(zero) == 4:
        return EigenConfig(Tag.QUADRUPLE_ZERO, config)
    if len(zero) == 2:
        e = rest[0]
        if abs(e.real) <= t:
            return EigenConfig(Tag.IMAG_PAIR_ZERO_PAIR, config)
        if abs(e.imag) <= t:
            return EigenConfig(Tag.REAL_PAIR_ZERO_PAIR, config)
        raise ValueError("a single nonzero pair must be real or imaginary")
    if zero:
        raise ValueError("zero eigenvalues must come in pairs")
    imag = [e for e in eigs if abs(e.real) <= t]
    real = [e for e in eigs if abs(e.imag) <= t]
    if len(imag) + len(real) < 4:
        return EigenConfig(Tag.COMPLEX_QUARTET, config)
    if len(imag) == 4:
        upper = sorted((e for e in eigs if e.imag > 0), key=lambda e: e.imag)
        double = abs(upper[0] - upper[1]) <= t
        return EigenConfig(Tag.DOUBLE_IMAG_PAIR if double else Tag.TWO_IMAG_PAIRS, config)
    if len(real) == 4:
        upper = sorted((e for e in eigs if e.real > 0), key=lambda e: e.real)
        double = abs(upper[0] - upper[1]) <= t
        return EigenConfig(Tag.DOUBLE_REAL_PAIR if double else Tag.TWO_REAL_PAIRS, config)
    return EigenConfig(Tag.IMAG_PAIR_REAL_PAIR, config)


def classify_matrix(A: Mat4, tol: float = CLASSIFY_TOL) -> EigenConfig:
    return classify(quartic_eigenvalues(A), tol)


def eigen_grid(mu_values: Sequence[float], nu_values: Sequence[float],
               tol: float = CLASSIFY_TOL) -> list[tuple[float, float, Tag]]:
    """Configuration tags of ``J0(mu0, nu0)`` over a grid, row-major in ``mu``."""
    rows = []
    for mu in mu_values:
        for nu in nu_values:
            rows.append((float(mu), float(nu), classify_matrix(versal_J0(float(mu), float(nu)), tol).tag))
    return rows
