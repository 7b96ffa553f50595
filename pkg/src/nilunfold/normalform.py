"""Lie-series normalization around a Hamiltonian-Hopf equilibrium.

The unfolding parameter ``beta`` is a commuting symbol with no bracket
action.  A :class:`GradedHamiltonian` stores one float polynomial per power
of ``beta``; the graded degree of ``beta^j x^m`` is ``m + weight * j``.

Normalization follows the semisimple/nilpotent splitting of the quadratic
part ``H2 = S + N``: first every graded part is pushed into ``ker ad_S``,
then, for polynomial degree >= 3, the ``ker ad_S`` part is pushed into
``ker ad_S`` intersected with ``ker ad_M``, where ``(N, M)`` sits in an
sl(2) triple.  The ``beta``-dependent quadratic terms are only treated by
the first step; that keeps the ``beta N`` terms in the normal form.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Mapping, Sequence

import numpy as np

from . import linsymp, unfolding
from .polyalg import (
    EXACT,
    FLOAT,
    Polynomial,
    ad_matrix,
    dim_homogeneous,
    image_basis,
    kernel_basis,
    monomial_basis,
    poisson_bracket,
    variables,
)
from .tolerances import MATRIX_RESIDUAL_TOL, SMALL_DIVISOR_TOL
from .unfolding import CubicCoeffs

BETA_WEIGHT = 1
TRUNCATION = 4


@dataclass(frozen=True)
class HopfBasis:
    """``S = q1 p2 - q2 p1``, ``N = (q1^2 + q2^2)/2``, ``M = (p1^2 + p2^2)/2``."""

    S: Polynomial
    N: Polynomial
    M: Polynomial
    T: Polynomial

    @classmethod
    def standard(cls, field: str = FLOAT) -> "HopfBasis":
        q1, q2, p1, p2 = variables(EXACT)
        S = q1 * p2 - q2 * p1
        N = (q1 ** 2 + q2 ** 2) / 2
        M = (p1 ** 2 + p2 ** 2) / 2
        T = q1 * p1 + q2 * p2
        if field == FLOAT:
            return cls(S.to_float(), N.to_float(), M.to_float(), T.to_float())
        return cls(S, N, M, T)


class GradedHamiltonian:
    """Polynomial in ``(q1, q2, p1, p2)`` with coefficients polynomial in ``beta``."""

    def __init__(self, parts: Mapping[int, Polynomial], weight: int = BETA_WEIGHT,
                 truncation: int = TRUNCATION, normalized_degree: int = 0):
        self.weight = int(weight)
        self.truncation = int(truncation)
        self.normalized_degree = int(normalized_degree)
        clean: dict[int, Polynomial] = {}
        for j, poly in parts.items():
            if poly.field != FLOAT:
                poly = poly.to_float()
            limit = self.truncation - self.weight * j
            if limit < 0:
                continue
            poly = Polynomial({m: c for m, c in poly.terms.items() if 0 < sum(m) <= limit}, FLOAT)
            if not poly.is_zero():
                clean[j] = poly
        self.parts = clean

    @classmethod
    def from_polynomial(cls, H: Polynomial, **kw) -> "GradedHamiltonian":
        return cls({0: H}, **kw)

    def _like(self, parts: Mapping[int, Polynomial], normalized_degree: int | None = None) -> "GradedHamiltonian":
        nd = self.normalized_degree if normalized_degree is None else normalized_degree
        return GradedHamiltonian(parts, self.weight, self.truncation, nd)

    def part(self, j: int) -> Polynomial:
        return self.parts.get(j, Polynomial.zero(FLOAT))

    def graded_part(self, g: int) -> dict[int, Polynomial]:
        """``{j: x-polynomial}`` of the terms with graded degree ``g``."""
        out = {}
        for j, poly in self.parts.items():
            n = g - self.weight * j
            if n >= 0:
                h = poly.homogeneous_part(n)
                if not h.is_zero():
                    out[j] = h
        return out

    def graded_degrees(self) -> list[int]:
        return sorted({sum(m) + self.weight * j for j, p in self.parts.items() for m in p.terms})

    def __add__(self, other: "GradedHamiltonian") -> "GradedHamiltonian":
        parts = dict(self.parts)
        for j, p in other.parts.items():
            parts[j] = parts[j] + p if j in parts else p
        return self._like(parts)

    def scale(self, s: float) -> "GradedHamiltonian":
        return self._like({j: p * s for j, p in self.parts.items()})

    def bracket(self, other: "GradedHamiltonian") -> "GradedHamiltonian":
        parts: dict[int, Polynomial] = {}
        for i, f in self.parts.items():
            for j, g in other.parts.items():
                if self.weight * (i + j) > self.truncation:
                    continue
                b = poisson_bracket(f, g)
                parts[i + j] = parts[i + j] + b if i + j in parts else b
        return self._like(parts)

    def min_graded_degree(self) -> int:
        degs = self.graded_degrees()
        return degs[0] if degs else -1

    def lie_transform(self, F: "GradedHamiltonian") -> "GradedHamiltonian":
        """``exp(-ad_F) self`` truncated at the graded truncation degree."""
        if not F.parts:
            return self
        if F.min_graded_degree() < 3:
            raise ValueError("generator must have graded degree >= 3")
        result = self
        term = self
        k = 0
        while term.parts:
            k += 1
            term = F.bracket(term).scale(-1.0 / k)
            result = result + term
        return result

    def evaluate_beta(self, beta: float) -> Polynomial:
        out = Polynomial.zero(FLOAT)
        for j, p in self.parts.items():
            out = out + p * beta ** j
        return out

    def as_dict(self) -> dict:
        return {
            "weight": self.weight,
            "truncation": self.truncation,
            "parts": {str(j): str(p) for j, p in sorted(self.parts.items())},
        }


# polynomial maps


def shift_to_equilibrium(H: Polynomial, xstar: Sequence[float]) -> Polynomial:
    """``H(x + x*)`` with the constant term dropped."""
    field = H.field
    if field == EXACT and any(isinstance(v, float) for v in xstar):
        H, field = H.to_float(), FLOAT
    shifted = [v + s for v, s in zip(variables(field), xstar)]
    out = Polynomial.zero(field)
    for mono, c in H.terms.items():
        term = Polynomial.constant(c, field)
        for v, e in zip(shifted, mono):
            if e:
                term = term * v ** e
        out = out + term
    return Polynomial({m: c for m, c in out.terms.items() if sum(m) > 0}, field)


def linear_substitution(H: Polynomial, P: np.ndarray) -> Polynomial:
    """``H(P y)`` without any check on ``P``."""
    H = H.to_float()
    ys = variables(FLOAT)
    images = [sum((ys[j] * float(P[i, j]) for j in range(4)), Polynomial.zero(FLOAT)) for i in range(4)]
    out = Polynomial.zero(FLOAT)
    for mono, c in H.terms.items():
        term = Polynomial.constant(c, FLOAT)
        for v, e in zip(images, mono):
            if e:
                term = term * v ** e
        out = out + term
    return out


def apply_linear(H: Polynomial, P: np.ndarray, max_degree: int | None = None) -> Polynomial:
    """``H(P y)`` for a symplectic ``P``."""
    P = np.asarray(P, dtype=float)
    if linsymp.max_abs(linsymp.symplectic_residual(P)) > MATRIX_RESIDUAL_TOL:
        raise ValueError("transformation is not symplectic")
    out = linear_substitution(H, P)
    return out.truncate(max_degree) if max_degree is not None else out


# exact splitting data


@dataclass(frozen=True)
class _Splitting:
    degree: int
    image: np.ndarray        # columns span im ad_S
    kernel: np.ndarray       # columns span ker ad_S
    change: np.ndarray       # [image | kernel]
    ad_S_im: np.ndarray      # ad_S on im ad_S, in image coordinates
    ad_N_im: np.ndarray      # ad_N on im ad_S, in image coordinates
    ad_N_ker: np.ndarray     # ad_N on ker ad_S, in kernel coordinates
    nil_split: np.ndarray    # [im ad_N | ker ad_M] inside ker ad_S, kernel coordinates
    nil_rank: int            # number of im ad_N columns in nil_split


def _vectors(polys: Sequence[Polynomial], n: int) -> np.ndarray:
    if not polys:
        return np.zeros((dim_homogeneous(n), 0))
    return np.array([[float(x) for x in p.to_vector(n)] for p in polys]).T


def _coords(basis: np.ndarray, vecs: np.ndarray) -> np.ndarray:
    sol, *_ = np.linalg.lstsq(basis, vecs, rcond=None)
    return sol


@lru_cache(maxsize=None)
def _splitting(n: int) -> _Splitting:
    hb = HopfBasis.standard(EXACT)
    ad_S = ad_matrix(hb.S, n)
    im = _vectors(image_basis(ad_S), n)
    ker = _vectors(kernel_basis(ad_S), n)
    AS = ad_S.as_array()
    AN = ad_matrix(hb.N, n).as_array()
    AM = ad_matrix(hb.M, n).as_array()
    change = np.hstack([im, ker])
    ad_S_im = _coords(im, AS @ im) if im.size else np.zeros((0, 0))
    ad_N_im = _coords(im, AN @ im) if im.size else np.zeros((0, 0))
    if ker.size:
        ad_N_ker = _coords(ker, AN @ ker)
        ad_M_ker = _coords(ker, AM @ ker)
        # exact structure lives in small integers, so rounding recovers it
        ad_N_ker = np.round(ad_N_ker * 1e9) / 1e9
        ad_M_ker = np.round(ad_M_ker * 1e9) / 1e9
        u, s, vt = np.linalg.svd(ad_N_ker)
        r = int(np.sum(s > 1e-9))
        im_N = u[:, :r]
        _, sm, vmt = np.linalg.svd(ad_M_ker)
        rm = int(np.sum(sm > 1e-9))
        ker_M = vmt[rm:].T
        nil_split = np.hstack([im_N, ker_M])
        if nil_split.shape[1] != ker.shape[1] or np.linalg.matrix_rank(nil_split) != ker.shape[1]:
            raise ValueError(f"ker ad_M does not complement im ad_N in degree {n}")
    else:
        ad_N_ker = np.zeros((0, 0))
        nil_split = np.zeros((0, 0))
        r = 0
    return _Splitting(n, im, ker, change, ad_S_im, ad_N_im, ad_N_ker, nil_split, r)


def _semisimple_coefficient(H2: Polynomial, S: Polynomial) -> float:
    """``sigma`` with ``S = sigma (q1 p2 - q2 p1)``."""
    unit = HopfBasis.standard(FLOAT).S
    sigma = S.coefficient((1, 0, 0, 1))
    if sigma == 0 or (S - unit * sigma).max_abs_coefficient() > 1e-12 * abs(sigma):
        raise ValueError("semisimple part must be a multiple of q1 p2 - q2 p1")
    return float(sigma)


def _step1(poly: Polynomial, n: int, sigma: float, nil_scale: float) -> Polynomial:
    """Generator removing the ``im ad_S`` component of ``poly``."""
    sp = _splitting(n)
    if sp.image.shape[1] == 0:
        return Polynomial.zero(FLOAT)
    v = np.array(poly.to_vector(n), dtype=float)
    coords = np.linalg.solve(sp.change, v)
    c_im = coords[: sp.image.shape[1]]
    if not np.any(c_im):
        return Polynomial.zero(FLOAT)
    L = sigma * sp.ad_S_im + nil_scale * sp.ad_N_im
    u, s, vt = np.linalg.svd(L)
    if s[-1] < SMALL_DIVISOR_TOL:
        bad = sp.image @ vt[-1]
        mono = monomial_basis(n)[int(np.argmax(np.abs(bad)))]
        raise ValueError(f"small divisor {s[-1]:.3e} at monomial {Polynomial({mono: 1}, FLOAT)}")
    y = np.linalg.solve(L, -c_im)
    return Polynomial.from_vector(sp.image @ y, n, FLOAT)


def _step2(poly: Polynomial, n: int, nil_scale: float) -> Polynomial:
    """Generator in ``ker ad_S`` removing the ``im ad_N`` component of ``poly``."""
    sp = _splitting(n)
    if sp.kernel.shape[1] == 0 or sp.nil_rank == 0:
        return Polynomial.zero(FLOAT)
    v = np.array(poly.to_vector(n), dtype=float)
    coords = np.linalg.solve(sp.change, v)
    c_ker = coords[sp.image.shape[1]:]
    split = np.linalg.solve(sp.nil_split, c_ker)
    target = sp.nil_split[:, : sp.nil_rank] @ split[: sp.nil_rank]
    if not np.any(np.abs(target) > 0):
        return Polynomial.zero(FLOAT)
    g, *_ = np.linalg.lstsq(nil_scale * sp.ad_N_ker, -target, rcond=None)
    return Polynomial.from_vector(sp.kernel @ g, n, FLOAT)


def _nil_scale(H2: Polynomial, S: Polynomial, N: Polynomial) -> float:
    hb = HopfBasis.standard(FLOAT)
    rest = H2 - S
    if (rest - N).max_abs_coefficient() > 1e-9 * max(1.0, N.max_abs_coefficient()):
        raise ValueError("quadratic part is not S + N")
    scale = N.coefficient((2, 0, 0, 0)) / hb.N.coefficient((2, 0, 0, 0))
    if (N - hb.N * scale).max_abs_coefficient() > 1e-12 * max(1.0, abs(scale)):
        raise ValueError("nilpotent part must be a multiple of (q1^2 + q2^2)/2")
    return float(scale)


def normalize(H: GradedHamiltonian, S: Polynomial, N: Polynomial,
              max_graded_degree: int = TRUNCATION) -> tuple[GradedHamiltonian, list[GradedHamiltonian]]:
    """Normalize ``H`` grade by grade up to ``max_graded_degree``.

    Returns the normal form and the generators (step 1 and step 2 per grade,
    in order of application).
    """
    if max_graded_degree > H.truncation:
        raise ValueError("max_graded_degree exceeds the truncation")
    H2 = H.part(0).homogeneous_part(2)
    sigma = _semisimple_coefficient(H2, S)
    nil = _nil_scale(H2, S, N)
    K = H
    generators: list[GradedHamiltonian] = []
    for g in range(3, max_graded_degree + 1):
        gens = {}
        for j, poly in K.graded_part(g).items():
            f = _step1(poly, g - H.weight * j, sigma, nil)
            if not f.is_zero():
                gens[j] = f
        F = GradedHamiltonian(gens, H.weight, H.truncation)
        K = K.lie_transform(F)
        generators.append(F)
        gens = {}
        for j, poly in K.graded_part(g).items():
            n = g - H.weight * j
            if n < 3:
                continue
            f = _step2(poly, n, nil)
            if not f.is_zero():
                gens[j] = f
        G = GradedHamiltonian(gens, H.weight, H.truncation)
        K = K.lie_transform(G)
        generators.append(G)
    K = K._like(K.parts, normalized_degree=max_graded_degree)
    return K, generators


def im_S_residual(K: GradedHamiltonian, max_graded_degree: int | None = None) -> float:
    """Largest ``im ad_S`` component of any graded part of ``K``."""
    top = K.normalized_degree if max_graded_degree is None else max_graded_degree
    worst = 0.0
    for g in range(2, top + 1):
        for j, poly in K.graded_part(g).items():
            n = g - K.weight * j
            if n == 2 and j == 0:
                continue
            sp = _splitting(n)
            coords = np.linalg.solve(sp.change, np.array(poly.to_vector(n), dtype=float))
            if sp.image.shape[1]:
                worst = max(worst, float(np.max(np.abs(coords[: sp.image.shape[1]]))))
    return worst


# coefficient extraction


def quadratic_coefficients(poly: Polynomial) -> dict[str, float]:
    """Coordinates of a ``ker ad_S`` quadratic in the basis ``S, N, M, T``."""
    hb = HopfBasis.standard(FLOAT)
    basis = np.array([p.to_vector(2) for p in (hb.S, hb.N, hb.M, hb.T)], dtype=float).T
    v = np.array(poly.to_vector(2), dtype=float)
    x, *_ = np.linalg.lstsq(basis, v, rcond=None)
    resid = float(np.max(np.abs(basis @ x - v))) if v.size else 0.0
    return {"S": float(x[0]), "N": float(x[1]), "M": float(x[2]), "T": float(x[3]), "residual": resid}


def quartic_coefficients(K: GradedHamiltonian) -> dict[str, float]:
    """Coordinates of the ``beta^0`` quartic part in ``M^2, S M, S^2``."""
    if K.normalized_degree < 4:
        raise ValueError("normal form is not computed through graded degree 4")
    hb = HopfBasis.standard(FLOAT)
    basis_polys = (hb.M * hb.M, hb.S * hb.M, hb.S * hb.S)
    basis = np.array([p.to_vector(4) for p in basis_polys], dtype=float).T
    v = np.array(K.part(0).homogeneous_part(4).to_vector(4), dtype=float)
    x, *_ = np.linalg.lstsq(basis, v, rcond=None)
    resid = float(np.max(np.abs(basis @ x - v)))
    return {"M2": float(x[0]), "SM": float(x[1]), "S2": float(x[2]), "residual": resid}


def extract_m2_coefficient(K: GradedHamiltonian) -> float:
    """Coefficient of ``M^2 = (p1^2 + p2^2)^2 / 4`` in a normal form."""
    return quartic_coefficients(K)["M2"]


# pipeline


def hopf_hamiltonian(nu, q0, c: CubicCoeffs, weight: int = BETA_WEIGHT,
                     truncation: int = TRUNCATION) -> tuple[GradedHamiltonian, float, np.ndarray]:
    """Hopf member shifted to its equilibrium and transformed by the Hopf matrix.

    ``mu = mu_h + beta``.  The equilibrium does not depend on ``mu``, so after
    the shift ``beta`` only enters as ``beta q1^2 / 2``.
    """
    omega = unfolding.hopf_frequency(nu, q0, c)
    P = unfolding.hopf_transform(nu, q0, c)
    mu = float(unfolding.hopf_mu(nu, q0, c))
    nu_f, q0_f = float(nu), float(q0)
    cf = CubicCoeffs(float(c.a1), float(c.a2), float(c.a3))
    kappa = float(unfolding.kappa_of(mu, nu_f, q0_f, cf))
    H = unfolding.hamiltonian(unfolding.ParamsKMN(kappa, mu, nu_f), cf)
    xstar = [float(v) for v in unfolding.equilibrium_from_q0(q0_f, mu, nu_f, cf)]
    K0 = apply_linear(shift_to_equilibrium(H, xstar), P)
    q1 = variables(FLOAT)[0]
    K1 = apply_linear(q1 * q1 * 0.5, P)
    return GradedHamiltonian({0: K0, 1: K1}, weight, truncation), omega, P


@dataclass
class NormalFormResult:
    parameters: dict
    omega: float
    normal_form: GradedHamiltonian
    generators: list[GradedHamiltonian] = field(repr=False)
    quadratic: dict[str, list[float]]
    quartic: dict[str, float]

    @property
    def cm(self) -> float:
        return self.quartic["M2"]

    def report(self) -> dict:
        gens = []
        for k, G in enumerate(self.generators):
            grade = 3 + k // 2
            gens.append({
                "grade": grade,
                "step": 1 + k % 2,
                "terms": sum(len(p.terms) for p in G.parts.values()),
                "max_abs_coefficient": max((p.max_abs_coefficient() for p in G.parts.values()), default=0.0),
            })
        return {
            "parameters": self.parameters,
            "omega": self.omega,
            "coefficients": {
                "S": self.quadratic["S"],
                "N": self.quadratic["N"],
                "M": self.quadratic["M"],
                "M2": self.quartic["M2"],
                "SM": self.quartic["SM"],
                "S2": self.quartic["S2"],
            },
            "generators_summary": gens,
        }

    def to_json(self) -> str:
        return json.dumps(self.report(), indent=2, sort_keys=True)


def hopf_normal_form(nu, q0, c: CubicCoeffs, max_graded_degree: int = TRUNCATION) -> NormalFormResult:
    """Full pipeline: shift, Hopf transformation, two-step normalization.

    ``quadratic`` lists, for ``S``, ``N`` and ``M``, the coefficients of
    ``beta^0, beta^1, beta^2`` in the normalized quadratic part.
    """
    H, omega, _ = hopf_hamiltonian(nu, q0, c, truncation=max_graded_degree)
    hb = HopfBasis.standard(FLOAT)
    sigma = omega / (2 * math.sqrt(2.0))
    K, gens = normalize(H, hb.S * sigma, hb.N, max_graded_degree)
    series: dict[str, list[float]] = {"S": [], "N": [], "M": [], "T": []}
    for j in range(3):
        coeffs = quadratic_coefficients(K.part(j).homogeneous_part(2))
        for key in series:
            series[key].append(coeffs[key])
    quartic = quartic_coefficients(K) if max_graded_degree >= 4 else {}
    params = {"a1": float(c.a1), "a2": float(c.a2), "a3": float(c.a3), "nu": float(nu), "q0": float(q0),
              "mu_h": float(unfolding.hopf_mu(nu, q0, c)), "beta_weight": H.weight,
              "truncation": max_graded_degree}
    return NormalFormResult(params, omega, K, gens, series, quartic)
