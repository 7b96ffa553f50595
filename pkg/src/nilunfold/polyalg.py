"""Sparse polynomials on R^4 with the canonical Poisson bracket.

Variables are ordered ``(q1, q2, p1, p2)`` and a monomial is the 4-tuple of
its exponents.  Coefficients live either in the rationals (``Fraction``) or
in floats; the two are never mixed silently.

Homogeneous pieces are handled through a fixed monomial basis: graded, and
within one degree lexicographic with ``q1 < q2 < p1 < p2`` (so the degree-1
basis is ``q1, q2, p1, p2``).  All matrices built here index rows and
columns by that basis.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import product
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import exact

VARS = ("q1", "q2", "p1", "p2")
EXACT = "exact"
FLOAT = "float"

Monomial = tuple[int, int, int, int]


def monomial_key(m: Monomial) -> tuple:
    return (sum(m), m[::-1])


@lru_cache(maxsize=None)
def monomial_basis(n: int) -> tuple[Monomial, ...]:
    """All exponent tuples of total degree ``n`` in basis order."""
    if n < 0:
        return ()
    out = [m for m in product(range(n + 1), repeat=4) if sum(m) == n]
    return tuple(sorted(out, key=monomial_key))


@lru_cache(maxsize=None)
def _basis_index(n: int) -> dict[Monomial, int]:
    return {m: i for i, m in enumerate(monomial_basis(n))}


def dim_homogeneous(n: int) -> int:
    return math.comb(n + 3, 3) if n >= 0 else 0


def _coerce(c, fld: str):
    if fld == EXACT:
        if isinstance(c, float):
            raise TypeError("float coefficient in an exact polynomial")
        return Fraction(c)
    if fld == FLOAT:
        return float(c)
    raise ValueError(f"unknown coefficient field {fld!r}")


class Polynomial:
    """Immutable sparse polynomial in ``q1, q2, p1, p2``."""

    __slots__ = ("_terms", "_field")

    def __init__(self, terms: Mapping[Monomial, object] | None = None, field: str = EXACT):
        clean: dict[Monomial, object] = {}
        for mono, c in (terms or {}).items():
            mono = tuple(int(e) for e in mono)
            if len(mono) != 4 or min(mono) < 0:
                raise ValueError(f"bad monomial {mono}")
            c = _coerce(c, field)
            if c != 0:
                clean[mono] = clean.get(mono, 0) + c
                if clean[mono] == 0:
                    del clean[mono]
        self._terms = clean
        self._field = field

    # construction helpers

    @classmethod
    def var(cls, name: str | int, field: str = EXACT) -> "Polynomial":
        i = VARS.index(name) if isinstance(name, str) else name
        mono = [0, 0, 0, 0]
        mono[i] = 1
        return cls({tuple(mono): 1}, field)

    @classmethod
    def constant(cls, c, field: str = EXACT) -> "Polynomial":
        return cls({(0, 0, 0, 0): c}, field)

    @classmethod
    def zero(cls, field: str = EXACT) -> "Polynomial":
        return cls({}, field)

    @classmethod
    def from_vector(cls, vec: Sequence, n: int, field: str = EXACT) -> "Polynomial":
        return cls(dict(zip(monomial_basis(n), vec)), field)

    # basic accessors

    @property
    def terms(self) -> Mapping[Monomial, object]:
        return MappingProxyType(self._terms)

    @property
    def field(self) -> str:
        return self._field

    def coefficient(self, mono: Monomial):
        return self._terms.get(tuple(mono), _coerce(0, self._field))

    def is_zero(self) -> bool:
        return not self._terms

    def degree(self) -> int:
        return max((sum(m) for m in self._terms), default=-1)

    def lowest_degree(self) -> int:
        return min((sum(m) for m in self._terms), default=-1)

    def is_homogeneous(self) -> bool:
        return len({sum(m) for m in self._terms}) <= 1

    def homogeneous_part(self, n: int) -> "Polynomial":
        return Polynomial({m: c for m, c in self._terms.items() if sum(m) == n}, self._field)

    def truncate(self, max_degree: int) -> "Polynomial":
        return Polynomial({m: c for m, c in self._terms.items() if sum(m) <= max_degree}, self._field)

    def to_vector(self, n: int) -> list:
        zero = _coerce(0, self._field)
        return [self._terms.get(m, zero) for m in monomial_basis(n)]

    def to_float(self) -> "Polynomial":
        return Polynomial({m: float(c) for m, c in self._terms.items()}, FLOAT)

    def max_abs_coefficient(self) -> float:
        return max((abs(float(c)) for c in self._terms.values()), default=0.0)

    def sorted_terms(self) -> list[tuple[Monomial, object]]:
        return sorted(self._terms.items(), key=lambda kv: monomial_key(kv[0]))

    # arithmetic

    def _same_field(self, other: "Polynomial") -> None:
        if self._field != other._field:
            raise TypeError(f"mixed coefficient fields: {self._field} and {other._field}")

    def _lift(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            self._same_field(other)
            return other
        return Polynomial.constant(other, self._field)

    def __add__(self, other) -> "Polynomial":
        other = self._lift(other)
        out = dict(self._terms)
        for m, c in other._terms.items():
            out[m] = out.get(m, 0) + c
        return Polynomial(out, self._field)

    __radd__ = __add__

    def __neg__(self) -> "Polynomial":
        return Polynomial({m: -c for m, c in self._terms.items()}, self._field)

    def __sub__(self, other) -> "Polynomial":
        return self + (-self._lift(other))

    def __rsub__(self, other) -> "Polynomial":
        return self._lift(other) - self

    def __mul__(self, other) -> "Polynomial":
        if not isinstance(other, Polynomial):
            s = _coerce(other, self._field)
            return Polynomial({m: c * s for m, c in self._terms.items()}, self._field)
        self._same_field(other)
        out: dict[Monomial, object] = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                m = (m1[0] + m2[0], m1[1] + m2[1], m1[2] + m2[2], m1[3] + m2[3])
                out[m] = out.get(m, 0) + c1 * c2
        return Polynomial(out, self._field)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "Polynomial":
        s = _coerce(other, self._field)
        return Polynomial({m: c / s for m, c in self._terms.items()}, self._field)

    def __pow__(self, k: int) -> "Polynomial":
        if not isinstance(k, int) or k < 0:
            raise ValueError("only non-negative integer powers")
        out = Polynomial.constant(1, self._field)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self._field == other._field and self._terms == other._terms

    def __hash__(self) -> int:
        return hash((self._field, frozenset(self._terms.items())))

    def diff(self, var: str | int) -> "Polynomial":
        i = VARS.index(var) if isinstance(var, str) else var
        out = {}
        for m, c in self._terms.items():
            if m[i]:
                mm = list(m)
                mm[i] -= 1
                out[tuple(mm)] = c * m[i]
        return Polynomial(out, self._field)

    def gradient(self) -> list["Polynomial"]:
        return [self.diff(i) for i in range(4)]

    def __call__(self, x: Sequence):
        total = 0
        for m, c in self._terms.items():
            total += c * x[0] ** m[0] * x[1] ** m[1] * x[2] ** m[2] * x[3] ** m[3]
        return total

    # text format

    def __str__(self) -> str:
        return format_polynomial(self)

    def __repr__(self) -> str:
        return f"Polynomial({format_polynomial(self)!r}, field={self._field!r})"

    @classmethod
    def parse(cls, text: str, field: str = EXACT) -> "Polynomial":
        return parse_polynomial(text, field)


def _format_coeff(c) -> str:
    if isinstance(c, Fraction):
        return str(c)
    return repr(float(c))


def _format_mono(m: Monomial) -> str:
    parts = []
    for name, e in zip(VARS, m):
        if e == 1:
            parts.append(name)
        elif e > 1:
            parts.append(f"{name}^{e}")
    return " ".join(parts)


def format_polynomial(p: Polynomial) -> str:
    """Render as ``c * q1^a q2^b p1^c p2^d + ...`` in basis order."""
    if p.is_zero():
        return "0"
    out = []
    for m, c in p.sorted_terms():
        mono = _format_mono(m)
        out.append(f"{_format_coeff(c)} * {mono}" if mono else _format_coeff(c))
    return " + ".join(out)


_FACTOR = re.compile(r"^(q1|q2|p1|p2)(?:\^(\d+))?$")


def parse_polynomial(text: str, field: str = EXACT) -> Polynomial:
    text = text.strip()
    if text in ("", "0"):
        return Polynomial.zero(field)
    terms: dict[Monomial, object] = {}
    for chunk in text.split(" + "):
        chunk = chunk.strip()
        if "*" in chunk:
            coeff_txt, mono_txt = (s.strip() for s in chunk.split("*", 1))
        elif chunk[0] in "qp":
            coeff_txt, mono_txt = "1", chunk
        else:
            coeff_txt, mono_txt = chunk, ""
        coeff = Fraction(coeff_txt) if field == EXACT else float(coeff_txt)
        mono = [0, 0, 0, 0]
        for factor in mono_txt.split():
            match = _FACTOR.match(factor)
            if not match:
                raise ValueError(f"cannot parse factor {factor!r}")
            mono[VARS.index(match.group(1))] += int(match.group(2) or 1)
        key = tuple(mono)
        terms[key] = terms.get(key, 0) + coeff
    return Polynomial(terms, field)


def variables(field: str = EXACT) -> tuple[Polynomial, Polynomial, Polynomial, Polynomial]:
    """The coordinate functions ``q1, q2, p1, p2``."""
    return tuple(Polynomial.var(i, field) for i in range(4))  # type: ignore[return-value]


# brackets


def poisson_bracket(f: Polynomial, g: Polynomial) -> Polynomial:
    """``{f, g} = sum_i df/dq_i dg/dp_i - df/dp_i dg/dq_i``."""
    if f.field != g.field:
        raise TypeError(f"mixed coefficient fields: {f.field} and {g.field}")
    out: dict[Monomial, object] = {}
    for a, ca in f.terms.items():
        for b, cb in g.terms.items():
            for qi, pi in ((0, 2), (1, 3)):
                w = a[qi] * b[pi] - a[pi] * b[qi]
                if not w:
                    continue
                m = [a[k] + b[k] for k in range(4)]
                m[qi] -= 1
                m[pi] -= 1
                key = tuple(m)
                out[key] = out.get(key, 0) + w * ca * cb
    return Polynomial(out, f.field)


def ad_apply(f: Polynomial, g: Polynomial) -> Polynomial:
    return poisson_bracket(f, g)


@dataclass(frozen=True)
class GradedOperator:
    """Matrix of a linear map between homogeneous polynomial spaces.

    Column ``j`` holds the image of ``monomial_basis(source_degree)[j]``
    expanded in ``monomial_basis(target_degree)``.
    """

    source_degree: int
    target_degree: int
    matrix: list = field(repr=False)
    field: str = EXACT

    @property
    def shape(self) -> tuple[int, int]:
        return dim_homogeneous(self.target_degree), dim_homogeneous(self.source_degree)

    def as_array(self) -> np.ndarray:
        return np.array([[float(x) for x in row] for row in self.matrix], dtype=float).reshape(self.shape)

    def rank(self) -> int:
        if self.field == EXACT:
            return exact.rank(self.matrix)
        return int(np.linalg.matrix_rank(self.as_array()))


def ad_matrix(f: Polynomial, n: int) -> GradedOperator:
    """Matrix of ``ad_f`` restricted to homogeneous degree ``n``."""
    if not f.is_homogeneous():
        raise ValueError("ad_matrix needs a homogeneous polynomial")
    if n < 0:
        raise ValueError("degree must be non-negative")
    d = f.degree()
    target = n + d - 2 if d >= 0 else n
    rows = dim_homogeneous(target)
    index = _basis_index(target) if target >= 0 else {}
    zero = _coerce(0, f.field)
    mat = [[zero] * dim_homogeneous(n) for _ in range(rows)]
    for j, mono in enumerate(monomial_basis(n)):
        img = poisson_bracket(f, Polynomial({mono: 1}, f.field))
        for m, c in img.terms.items():
            mat[index[m]][j] = c
    return GradedOperator(n, target, mat, f.field)


def _require_exact(op: GradedOperator) -> None:
    if op.field != EXACT:
        raise ValueError("exact coefficients required")


def kernel_basis(op: GradedOperator) -> list[Polynomial]:
    _require_exact(op)
    ncols = dim_homogeneous(op.source_degree)
    vecs = exact.nullspace(op.matrix, ncols) if op.matrix else exact.nullspace([], ncols)
    return [Polynomial.from_vector(v, op.source_degree) for v in vecs]


def image_basis(op: GradedOperator) -> list[Polynomial]:
    _require_exact(op)
    return [Polynomial.from_vector(v, op.target_degree) for v in exact.column_basis(op.matrix)]


def span_rank(polys: Sequence[Polynomial], n: int) -> int:
    """Dimension of the span of exact degree-``n`` polynomials."""
    if not polys:
        return 0
    return exact.rank([p.to_vector(n) for p in polys])


# sl(2) triples


def sl2_triple(N: Polynomial) -> tuple[Polynomial, Polynomial]:
    """Quadratics ``M, T`` with ``{N,M}=T, {N,T}=2N, {M,T}=-2M``.

    ``T`` is taken from ``ad_N(P_2)`` subject to ``{N,T} = 2N``, which is a
    linear condition; once ``T`` is fixed both remaining relations are
    linear in ``M``.
    """
    if N.field != EXACT or N.degree() != 2 or not N.is_homogeneous():
        raise ValueError("sl2_triple needs an exact homogeneous quadratic")
    ad = ad_matrix(N, 2).matrix
    ad2 = exact.matmul(ad, ad)
    target = [2 * c for c in N.to_vector(2)]
    x = exact.solve(ad2, target)
    if x is None:
        raise ValueError("sl2 embedding not found")
    T = poisson_bracket(N, Polynomial.from_vector(x, 2))

    # {N, M} = T and {M, T} = -2M  <=>  ad_N M = T and (ad_T - 2) M = 0
    adT = ad_matrix(T, 2).matrix
    lower = [[adT[i][j] - (2 if i == j else 0) for j in range(10)] for i in range(10)]
    rhs = T.to_vector(2) + [Fraction(0)] * 10
    m = exact.solve(ad + lower, rhs)
    if m is None:
        raise ValueError("sl2 embedding not found")
    M = Polynomial.from_vector(m, 2)
    if (poisson_bracket(N, M) != T or poisson_bracket(N, T) != 2 * N
            or poisson_bracket(M, T) != -2 * M):
        raise ValueError("sl2 embedding not found")
    return M, T


# normal-form complements


def standard_nilpotent() -> Polynomial:
    """The quadratic ``p2^2/2 - p1 q2`` with a single 4x4 Jordan block."""
    return Polynomial.parse("1/2 * p2^2 + -1 * q2 p1")


def nilpotent_generators() -> list[Polynomial]:
    """Generators of the normal-form terms for ``p2^2/2 - p1 q2``."""
    return [
        Polynomial.parse("q1"),
        Polynomial.parse("1/2 * q2^2 + 3/4 * q1 p2"),
        Polynomial.parse("2/3 * q2^3 + 3/2 * q1^2 p1 + 3/2 * q1 q2 p2"),
        Polynomial.parse(
            "3/4 * q1^2 p1^2 + 3/2 * q1 q2 p1 p2 + -1/2 * q1 p2^3 + 2/3 * q2^3 p1 + -1/4 * q2^2 p2^2"
        ),
    ]


def generator_products(generators: Sequence[Polynomial], n: int) -> list[Polynomial]:
    """All products of generators whose total degree is ``n``."""
    degs = [g.degree() for g in generators]
    out: list[Polynomial] = []

    def rec(i: int, remaining: int, acc: Polynomial) -> None:
        if i == len(generators):
            if remaining == 0:
                out.append(acc)
            return
        k = 0
        term = acc
        while k * degs[i] <= remaining:
            rec(i + 1, remaining - k * degs[i], term)
            term = term * generators[i]
            k += 1

    rec(0, n, Polynomial.constant(1, generators[0].field if generators else EXACT))
    return out


@dataclass
class ComplementReport:
    degree: int
    products: list[Polynomial]
    span_dim: int
    image_dim: int
    space_dim: int
    trivial_intersection: bool

    @property
    def passed(self) -> bool:
        return self.trivial_intersection and self.span_dim + self.image_dim == self.space_dim

    def as_dict(self) -> dict:
        return {
            "degree": self.degree,
            "products": [str(p) for p in self.products],
            "span_dim": self.span_dim,
            "image_dim": self.image_dim,
            "space_dim": self.space_dim,
            "trivial_intersection": self.trivial_intersection,
            "passed": self.passed,
        }


def normal_form_complement(N: Polynomial, n: int, generators: Sequence[Polynomial]) -> ComplementReport:
    """Check that generator products complement ``im ad_N`` in degree ``n``."""
    products = generator_products(generators, n)
    image = image_basis(ad_matrix(N, n))
    span_dim = span_rank(products, n)
    joint = span_rank(list(products) + image, n)
    return ComplementReport(
        degree=n,
        products=products,
        span_dim=span_dim,
        image_dim=len(image),
        space_dim=dim_homogeneous(n),
        trivial_intersection=joint == span_dim + len(image),
    )


# Lie series


def lie_transform(H: Polynomial, f: Polynomial, max_degree: int) -> Polynomial:
    """``exp(-ad_f) H`` truncated to total degree ``max_degree``."""
    if f.is_zero():
        return H.truncate(max_degree)
    if f.lowest_degree() < 3:
        raise ValueError("generator must have lowest degree >= 3")
    result = H.truncate(max_degree)
    term = result
    k = 0
    while not term.is_zero():
        k += 1
        term = poisson_bracket(f, term).truncate(max_degree)
        scale = Fraction(-1, k) if H.field == EXACT else -1.0 / k
        term = term * scale
        result = result + term
    return result


def homological_solve(
    H2: Polynomial, R: Polynomial, n: int, complement: Sequence[Polynomial]
) -> tuple[Polynomial, Polynomial]:
    """Split ``R`` into a removable part and a part in ``span(complement)``.

    Returns ``(f, residual)`` with ``R + {H2, f} = residual``, so that the
    Lie transform generated by ``f`` replaces ``R`` by ``residual``.
    """
    if R.field != H2.field:
        raise TypeError("mixed coefficient fields")
    if not R.is_zero() and (not R.is_homogeneous() or R.degree() != n):
        raise ValueError(f"R must be homogeneous of degree {n}")
    ad = ad_matrix(H2, n)
    dim = dim_homogeneous(n)
    comp = [c.to_vector(n) for c in complement]
    if H2.field == EXACT:
        image = exact.column_basis(ad.matrix)
        if exact.rank([list(v) for v in image] + comp) != dim or len(image) + len(comp) != dim:
            raise ValueError("complement does not span a complement of the image")
        # unknowns: f (dim entries) then residual weights (len(comp))
        a = [ad.matrix[i] + [-v[i] for v in comp] for i in range(dim)]
        x = exact.solve(a, [-c for c in R.to_vector(n)])
        if x is None:
            raise ValueError("complement does not span a complement of the image")
    else:
        a = np.hstack([ad.as_array(), -np.array(comp, dtype=float).T.reshape(dim, len(comp))])
        if np.linalg.matrix_rank(a) != dim:
            raise ValueError("complement does not span a complement of the image")
        x, *_ = np.linalg.lstsq(a, -np.array(R.to_vector(n), dtype=float), rcond=None)
    f = Polynomial.from_vector(x[:dim], n, H2.field)
    residual = Polynomial.zero(H2.field)
    for w, c in zip(x[dim:], complement):
        residual = residual + c * w
    return f, residual
