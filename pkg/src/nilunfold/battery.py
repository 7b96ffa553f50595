"""Exact verification battery for the linear and polynomial algebra."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import linsymp, polyalg

F = Fraction


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str = ""

    def as_dict(self) -> dict:
        return {"name": self.name, "passed": self.passed, "detail": self.detail}


def multiset_distance(a: Sequence[complex], b: Sequence[complex]) -> float:
    """Smallest max-distance over matchings of two 4-element multisets."""
    return min(max(abs(x - y) for x, y in zip(a, perm)) for perm in itertools.permutations(b))


def rational_points(count: int = 20) -> list[tuple[Fraction, Fraction]]:
    """Deterministic rational ``(mu1, nu1)`` sample."""
    pts = []
    for k in range(count):
        pts.append((F((-1) ** k * (k + 1), 7 + 3 * k), F(2 * k - 19, 11 + k)))
    return pts


def check_matrix_P(P=None) -> list[Check]:
    P = linsymp.williamson_to_standard() if P is None else P
    A0 = linsymp.hessian(linsymp.standard_form())
    A1 = linsymp.hessian(linsymp.williamson_form())
    Om = linsymp.omega()
    symp = linsymp.symplectic_residual(P)
    conj = P @ Om @ A0 - Om @ A1 @ P
    det = linsymp.determinant(P)
    return [
        Check("symplecticity:matrix_P", linsymp.max_abs(symp) == 0, f"max residual {linsymp.max_abs(symp)}"),
        Check("conjugation:matrix_P", linsymp.max_abs(conj) == 0, f"max residual {linsymp.max_abs(conj)}"),
        Check("determinant:matrix_P", det == 1, f"det {det}"),
    ]


def check_versal_S(points: Sequence[tuple] | None = None) -> list[Check]:
    points = rational_points() if points is None else points
    worst_s = worst_c = 0.0
    for mu1, nu1 in points:
        S = linsymp.versal_S(mu1, nu1)
        worst_s = max(worst_s, linsymp.max_abs(linsymp.symplectic_residual(S)))
        mu0, nu0 = linsymp.phi_map(mu1, nu1)
        conj = linsymp.versal_J1(mu1, nu1) @ S - S @ linsymp.versal_J0(mu0, nu0)
        worst_c = max(worst_c, linsymp.max_abs(conj))
    n = len(points)
    return [
        Check("symplecticity:S", worst_s == 0, f"{n} rational points, max residual {worst_s}"),
        Check("conjugation:S", worst_c == 0, f"{n} rational points, max residual {worst_c}"),
    ]


def check_phi(steps: int = 21, lim: float = 0.1, tol: float = 1e-10) -> Check:
    worst = 0.0
    for mu1 in np.linspace(-lim, lim, steps):
        for nu1 in np.linspace(-lim, lim, steps):
            mu0, nu0 = linsymp.phi_map(float(mu1), float(nu1))
            e1 = linsymp.versal_J1_eigenvalues(float(mu1), float(nu1))
            e0 = linsymp.versal_J0_eigenvalues(mu0, nu0)
            worst = max(worst, multiset_distance(e0, e1))
    return Check("eigenvalues:phi_map", worst <= tol, f"{steps}x{steps} grid, max distance {worst:.3e}")


def sl2_residuals(N: polyalg.Polynomial, M: polyalg.Polynomial, T: polyalg.Polynomial) -> list:
    pb = polyalg.poisson_bracket
    return [pb(N, M) - T, pb(N, T) - N * 2, pb(M, T) + M * 2]


def check_sl2() -> Check:
    N = polyalg.standard_nilpotent()
    M, T = polyalg.sl2_triple(N)
    res = sl2_residuals(N, M, T)
    ok = all(r.is_zero() for r in res)
    return Check("sl2_triple", ok, f"M = {M}; T = {T}")


def check_complement() -> list[Check]:
    N = polyalg.standard_nilpotent()
    gens = polyalg.nilpotent_generators()
    out = []
    for n in range(1, 5):
        rep = polyalg.normal_form_complement(N, n, gens)
        out.append(Check(f"complement:degree_{n}", rep.passed,
                         f"span {rep.span_dim} + image {rep.image_dim} = {rep.space_dim}"))
    return out


def run_battery(P=None) -> list[Check]:
    """All exact checks; ``P`` replaces the transformation matrix (fault injection)."""
    return [*check_matrix_P(P), *check_versal_S(), check_phi(), check_sl2(), *check_complement()]
