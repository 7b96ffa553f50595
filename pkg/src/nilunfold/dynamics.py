"""Trajectories of polynomial Hamiltonians with energy monitoring."""

from __future__ import annotations

import cmath
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .linsymp import hamiltonian_matrix
from .polyalg import FLOAT, Polynomial, VARS, variables
from .tolerances import ESCAPE_RADIUS

RK4 = "rk4"
LEAPFROG = "leapfrog-split"
METHODS = (RK4, LEAPFROG)
TRAJECTORY_COLUMNS = ("t", "q1", "q2", "p1", "p2", "H")


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray
    energies: np.ndarray
    method: str
    escaped: bool = False
    fallback: bool = False
    notes: list[str] = field(default_factory=list)

    def energy_drift(self) -> float:
        if len(self.energies) == 0:
            return 0.0
        return float(np.max(np.abs(self.energies - self.energies[0])))

    def rows(self) -> list[tuple]:
        return [(float(t), *map(float, x), float(h))
                for t, x, h in zip(self.times, self.states, self.energies)]


def _expression(poly: Polynomial) -> str:
    if poly.is_zero():
        return "0.0"
    parts = []
    for mono, c in poly.sorted_terms():
        factors = [repr(float(c))]
        for name, e in zip(VARS, mono):
            factors += [name] * e
        parts.append("*".join(factors))
    return " + ".join(parts)


def compile_polynomial(poly: Polynomial) -> Callable[[float, float, float, float], float]:
    """Plain-float evaluator for a polynomial."""
    src = f"def _f(q1, q2, p1, p2):\n    return {_expression(poly.to_float())}\n"
    scope: dict = {}
    exec(compile(src, "<polynomial>", "exec"), scope)
    return scope["_f"]


def compile_field(H: Polynomial) -> Callable[[np.ndarray], np.ndarray]:
    """Evaluator of ``Omega grad H = (dH/dp, -dH/dq)``."""
    g = H.to_float().gradient()
    exprs = [_expression(g[2]), _expression(g[3]), f"-({_expression(g[0])})", f"-({_expression(g[1])})"]
    src = "def _f(x):\n    q1, q2, p1, p2 = x\n    return _array([" + ", ".join(exprs) + "])\n"
    scope: dict = {"_array": np.array}
    exec(compile(src, "<field>", "exec"), scope)
    return scope["_f"]


def equilibrium_residual(H: Polynomial, x: Sequence[float]) -> float:
    """Max-norm of the Hamiltonian vector field at ``x``."""
    return float(np.max(np.abs(compile_field(H)(np.asarray(x, dtype=float)))))


def split_separable(H: Polynomial) -> tuple[Polynomial, Polynomial] | None:
    """``(T(p), V(q))`` when ``H`` has no mixed ``q``/``p`` monomials."""
    T, V = {}, {}
    for mono, c in H.terms.items():
        has_q = mono[0] or mono[1]
        has_p = mono[2] or mono[3]
        if has_q and has_p:
            return None
        (V if has_q else T)[mono] = c
    return Polynomial(T, H.field), Polynomial(V, H.field)


def _rk4_step(f, x: np.ndarray, h: float) -> np.ndarray:
    k1 = f(x)
    k2 = f(x + 0.5 * h * k1)
    k3 = f(x + 0.5 * h * k2)
    k4 = f(x + h * k3)
    return x + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)


def _leapfrog_stepper(T: Polynomial, V: Polynomial):
    dT = compile_field(T)  # (dT/dp, 0): drift of q
    dV = compile_field(V)  # (0, -dV/dq): kick of p

    def step(x: np.ndarray, h: float) -> np.ndarray:
        x = x + 0.5 * h * dV(x)
        x = x + h * dT(x)
        return x + 0.5 * h * dV(x)

    return step


def integrate(H: Polynomial, x0: Sequence[float], dt: float, T: float, method: str = RK4,
              escape_radius: float = ESCAPE_RADIUS) -> Trajectory:
    """Integrate ``x' = Omega grad H`` from ``x0`` over ``[0, T]``.

    ``leapfrog-split`` is Stormer-Verlet on ``H = T(p) + V(q)``; Hamiltonians
    that do not split this way fall back to ``rk4`` and set ``fallback``.
    The run stops early with ``escaped`` set once the state is non-finite or
    leaves the ball of radius ``escape_radius``.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    if T < dt:
        raise ValueError("T must be at least dt")
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}")
    H = H.to_float()
    energy = compile_polynomial(H)
    notes: list[str] = []
    fallback = False
    if method == LEAPFROG:
        split = split_separable(H)
        if split is None:
            fallback = True
            notes.append("Hamiltonian is not separable; integrated with rk4")
            f = compile_field(H)
            step = lambda x, h: _rk4_step(f, x, h)  # noqa: E731
        else:
            step = _leapfrog_stepper(*split)
    else:
        f = compile_field(H)
        step = lambda x, h: _rk4_step(f, x, h)  # noqa: E731
    n = int(round(T / dt))
    x = np.asarray(x0, dtype=float).copy()
    times = [0.0]
    states = [x.copy()]
    energies = [energy(*x)]
    escaped = False
    for k in range(1, n + 1):
        x = step(x, dt)
        if not np.all(np.isfinite(x)) or float(np.linalg.norm(x)) > escape_radius:
            escaped = True
            notes.append(f"escaped at t={k * dt:.17g}")
            break
        times.append(k * dt)
        states.append(x.copy())
        energies.append(energy(*x))
    return Trajectory(np.array(times), np.array(states), np.array(energies), method,
                      escaped, fallback, notes)


# fixtures


def example_centre_saddle(mu: float) -> Polynomial:
    """``p^2/2 - q^3/3 + mu q`` on the ``(q1, p1)`` pair."""
    q1, _, p1, _ = variables(FLOAT)
    return p1 ** 2 * 0.5 - q1 ** 3 * (1.0 / 3.0) + q1 * mu


def example_hopf_linear(mu: float) -> Polynomial:
    """``q1 p2 - q2 p1 + (q1^2 + q2^2)/2 + mu (p1^2 + p2^2)/2``."""
    q1, q2, p1, p2 = variables(FLOAT)
    return q1 * p2 - q2 * p1 + (q1 ** 2 + q2 ** 2) * 0.5 + (p1 ** 2 + p2 ** 2) * (0.5 * mu)


def example_hopf_eigenvalues(mu: float) -> np.ndarray:
    """``+-sqrt(-1 - mu +- 2 sqrt(mu))`` with principal complex roots."""
    r = cmath.sqrt(complex(mu))
    out = []
    for s in (1, -1):
        lam = cmath.sqrt(-1 - mu + s * 2 * r)
        out += [lam, -lam]
    return np.array(out, dtype=complex)


def stable_start(H: Polynomial, size: float = 0.5) -> np.ndarray:
    """Point of the stable subspace of the linear part of ``H`` at the origin.

    Real part of an eigenvector with the most negative real part, scaled to
    max-norm ``size``.  Starting there keeps a linearly unstable fixture
    bounded over long runs.
    """
    A = np.asarray(hamiltonian_matrix(H.to_float().homogeneous_part(2)), dtype=float)
    vals, vecs = np.linalg.eig(A)
    k = int(np.argmin(vals.real))
    if vals[k].real >= 0:
        raise ValueError("linear part has no stable direction")
    v = vecs[:, k]
    v = v / v[np.argmax(np.abs(v))]
    x = v.real
    return size * x / np.max(np.abs(x))


def finite_difference_jacobian(H: Polynomial, x: Sequence[float], h: float = 1e-6) -> np.ndarray:
    """Central differences of the vector field."""
    f = compile_field(H)
    x = np.asarray(x, dtype=float)
    J = np.zeros((4, 4))
    for j in range(4):
        e = np.zeros(4)
        e[j] = h
        J[:, j] = (f(x + e) - f(x - e)) / (2 * h)
    return J


def run_many(jobs: Sequence[tuple], threads: int = 1) -> list[Trajectory]:
    """Integrate independent ``(H, x0, dt, T, method)`` jobs, results in job order."""
    if threads <= 1:
        return [integrate(*job) for job in jobs]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda job: integrate(*job), jobs))


__all__ = [
    "Trajectory", "integrate", "equilibrium_residual", "compile_field", "compile_polynomial",
    "split_separable", "example_centre_saddle", "example_hopf_linear", "example_hopf_eigenvalues",
    "finite_difference_jacobian", "stable_start", "run_many", "RK4", "LEAPFROG", "TRAJECTORY_COLUMNS",
]
