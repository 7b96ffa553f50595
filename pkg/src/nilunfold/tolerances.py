"""Numerical tolerances shared across the package."""

# eigenvalue classification: absolute, scaled by max(1, max |lambda|)
CLASSIFY_TOL = 1e-9

# a computed quantity whose magnitude is below GUARD * eps * (sum of the
# magnitudes that produced it) is indistinguishable from zero
ROUNDING_GUARD = 64.0
EPS = 2.220446049250313e-16

# equilibria
ROOT_IMAG_TOL = 1e-10
ROOT_CLUSTER_TOL = 1e-8
ROOT_RESIDUAL_REL = 1e-12
NEWTON_MAX_ITER = 100

# residual checks on transformation matrices
MATRIX_RESIDUAL_TOL = 1e-9

# quadratic discriminant clustering in the reduced family
REDUCED_DOUBLE_ROOT_TOL = 1e-10

# normalization
SMALL_DIVISOR_TOL = 1e-12

# dynamics
ESCAPE_RADIUS = 10.0


def negligible(value: float, scale: float) -> bool:
    """True when ``value`` is within rounding noise of a sum of size ``scale``."""
    return abs(value) <= ROUNDING_GUARD * EPS * scale
