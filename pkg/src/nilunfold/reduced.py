"""Two-parameter reduced families.

Translating ``q1`` removes the ``q1^2`` term up to a chosen remainder ``r``:

    H_r = p2^2/2 - p1 q2 + alpha q1 + r q1^2/2 + beta (q2^2/2 + 3/4 p2 q1) + a1 q1^3/6.

``r = 0`` is the natural reduction.  ``H_r`` is the unfolding member with
``kappa = alpha``, ``mu = r``, ``nu = beta`` and ``a = (a1, 0, 0)``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import exact, unfolding
from .linsymp import EigenConfig, Tag, classify, even_quartic_roots
from .tolerances import CLASSIFY_TOL, REDUCED_DOUBLE_ROOT_TOL, negligible
from .unfolding import CubicCoeffs, ParamsKMN

F = Fraction
NO_EQUILIBRIA = "NoEquilibria"


@dataclass(frozen=True)
class ReducedParams:
    alpha: float
    beta: float
    r: float = 0.0


def _exact(*vals) -> bool:
    return all(isinstance(v, (int, Fraction)) and not isinstance(v, bool) for v in vals)


def reduce_params(kappa, mu, nu, a1=1, r=0) -> ReducedParams:
    """``(alpha, beta)`` of ``H_{kappa,mu,nu}`` (with ``a2 = a3 = 0``) after the translation."""
    if a1 == 0:
        raise ValueError("a1 must be nonzero")
    one = F(1) if _exact(kappa, mu, nu, a1, r) else 1.0
    alpha = (r ** 2 / (2 * a1 * one) + kappa - mu ** 2 / (2 * a1 * one)
             - F(9, 16) * nu ** 2 * r / a1 + F(9, 16) * mu * nu ** 2 / a1)
    return ReducedParams(alpha, nu, r)


def translation(mu, a1=1, r=0):
    """Shift ``s = (r - mu)/a1`` with ``q1_old = q1_new + s``.

    The momentum moves with it, ``p2_old = p2_new - 3/4 nu s``.
    """
    return (r - mu) / a1 if not _exact(mu, a1, r) else F(r - mu) / a1


def as_unfolding(p: ReducedParams, a1=1) -> tuple[ParamsKMN, CubicCoeffs]:
    return ParamsKMN(p.alpha, p.r, p.beta), CubicCoeffs(a1, 0, 0)


def equilibrium_coefficients(p: ReducedParams, a1=1) -> tuple:
    """``(A, B, C)`` of ``A q0^2 + B q0 + C = 0``."""
    half = F(1, 2) if _exact(a1) else 0.5
    return a1 * half, -F(9, 16) * p.beta ** 2 + p.r, p.alpha


def equilibria(p: ReducedParams, a1=1) -> list[tuple[float, tuple[float, float, float, float]]]:
    """Real equilibria ``(q0, (q0, 0, 0, -3/4 beta q0))`` ordered by ``q0``."""
    A, B, C = (float(v) for v in equilibrium_coefficients(p, a1))
    disc = B * B - 4 * A * C
    scale = B * B + 4 * abs(A * C)
    if negligible(disc, scale):
        disc = 0.0
    if disc < 0:
        return []
    root = math.sqrt(disc)
    if root == 0.0:
        roots = [-B / (2 * A)]
    else:
        # stable pair: the larger-magnitude root first, the other from Vieta
        big = (-B - root) / (2 * A) if B > 0 else (-B + root) / (2 * A)
        small = C / (A * big) if big != 0 else 0.0
        roots = sorted([big, small])
        if abs(roots[1] - roots[0]) <= REDUCED_DOUBLE_ROOT_TOL * max(1.0, abs(roots[0])):
            roots = [0.5 * (roots[0] + roots[1])]
    beta = float(p.beta)
    return [(q0, (q0, 0.0, 0.0, -0.75 * beta * q0)) for q0 in roots]


def eigenvalues(beta, q0, r=0) -> np.ndarray:
    """``+-sqrt(-5/4 beta +- sqrt(r + beta^2 + q0))`` as ``[l1, -l1, l2, -l2]``.

    Computed from ``l^4 + 5/2 beta l^2 + (9/16 beta^2 - r - q0)``.
    """
    if _exact(beta, q0, r):
        return even_quartic_roots(F(5, 2) * beta, F(9, 16) * beta ** 2 - r - q0)
    beta, q0, r = float(beta), float(q0), float(r)
    b = 2.5 * beta
    c = 0.5625 * beta ** 2 - r - q0
    c_scale = 0.5625 * beta ** 2 + abs(r) + abs(q0)
    return even_quartic_roots(b, c, abs(b), c_scale)


def eigenvalues_literal(beta, q0, r=0) -> np.ndarray:
    """The closed form with principal complex square roots."""
    inner = cmath.sqrt(complex(r + beta ** 2 + q0))
    out = []
    for s in (1, -1):
        lam = cmath.sqrt(-1.25 * beta + s * inner)
        out += [lam, -lam]
    return np.array(out, dtype=complex)


def hopf_curve(beta, r=0):
    """``q0 = -r - beta^2``."""
    return -r - beta ** 2


def fold_curve(beta, r=0):
    """``q0 = -r + 9/16 beta^2``."""
    return -r + F(9, 16) * beta ** 2


def alpha_of(beta, q0, r=0):
    """``alpha`` for which ``q0`` is an equilibrium (``a1 = 1``)."""
    return F(9, 16) * beta ** 2 * q0 - q0 ** 2 / (2 if _exact(q0) else 2.0) - r * q0


def alpha_fold(beta, r=0):
    """``1/2 r^2 - 9/16 r beta^2 + 81/512 beta^4``."""
    return F(1, 2) * r ** 2 - F(9, 16) * r * beta ** 2 + F(81, 512) * beta ** 4


def alpha_hopf(beta, r=0):
    """``1/2 r^2 - 9/16 r beta^2 - 17/16 beta^4``."""
    return F(1, 2) * r ** 2 - F(9, 16) * r * beta ** 2 - F(17, 16) * beta ** 4


def _curve_coefficients(curve, r) -> list:
    """Coefficients of ``beta^0..beta^4`` of an even quartic curve in ``beta``."""
    # the curves are quartic in beta, so five exact samples determine them
    xs = [F(k) for k in range(5)]
    ys = [F(curve(x, r)) for x in xs]
    vander = [[x ** k for k in range(5)] for x in xs]
    sol = exact.solve(vander, ys)
    return sol


def tangency_order(r=0) -> int:
    """Order of contact of ``alpha_fold`` and ``alpha_hopf`` at ``beta = 0``.

    Equals (lowest power of ``beta`` in the difference) minus one.
    """
    r = F(r).limit_denominator(10 ** 12) if not _exact(r) else F(r)
    diff = [a - b for a, b in zip(_curve_coefficients(alpha_fold, r), _curve_coefficients(alpha_hopf, r))]
    for k, d in enumerate(diff):
        if d != 0:
            return k - 1
    raise ValueError("curves coincide")


def classify_point(beta, q0, r=0, tol: float = CLASSIFY_TOL) -> Tag:
    """Eigenvalue configuration at ``(beta, q0)`` of the ``(beta, q0)`` chart."""
    return classify(eigenvalues(beta, q0, r), tol).tag


@dataclass(frozen=True)
class RegionReport:
    tag: str
    equilibria: tuple[tuple[float, str], ...]


def classify_region(p: ReducedParams, tol: float = CLASSIFY_TOL) -> RegionReport:
    """Configurations of every equilibrium at ``(alpha, beta)``.

    ``tag`` joins the per-equilibrium tags with ``+`` in order of ``q0``,
    or is ``NoEquilibria``.
    """
    eqs = equilibria(p)
    if not eqs:
        return RegionReport(NO_EQUILIBRIA, ())
    items = tuple((q0, classify_point(p.beta, q0, p.r, tol).value) for q0, _ in eqs)
    return RegionReport("+".join(t for _, t in items), items)


def jacobian_eigenvalues(beta, q0, r=0) -> np.ndarray:
    """Eigenvalues of the Jacobian of ``H_r`` at its equilibrium ``q0`` (oracle)."""
    p = ReducedParams(alpha_of(beta, q0, r), beta, r)
    kmn, c = as_unfolding(p)
    state = (q0, 0.0, 0.0, -0.75 * beta * q0)
    return np.linalg.eigvals(unfolding.jacobian(state, kmn, c))


# tables

GRID_COLUMNS = ("beta", "q0", "r", "config")
CURVE_COLUMNS = ("beta", "alpha_fold", "alpha_hopf", "r")


def grid_table(beta_values: Sequence[float], q0_values: Sequence[float], r: float = 0.0,
               tol: float = CLASSIFY_TOL) -> list[tuple]:
    return [(float(b), float(q), float(r), classify_point(float(b), float(q), float(r), tol).value)
            for b in beta_values for q in q0_values]


def curve_table(beta_values: Sequence[float], r: float = 0.0) -> list[tuple]:
    return [(float(b), float(alpha_fold(b, r)), float(alpha_hopf(b, r)), float(r)) for b in beta_values]
