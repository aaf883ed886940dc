"""Coefficient formulas, Bethe ansatz residuals and ODE certification.

For X S'' + Y S' + Z S = 0 with S = prod(z - z_i) and Z = c2 z^2 + c1 z + c0,
the c-coefficients are closed-form symmetric functions of the roots and the
roots solve the Bethe ansatz equations

    sum_{j != i} 2 / (z_i - z_j) + Y(z_i) / X(z_i) = 0.

The solver works on the cleared form of these equations (multiplied through by
X(z_i) * prod_{j != i}(z_i - z_j)), which is polynomial in the roots.
"""
import math
from typing import Sequence, Tuple, Union

import numpy as np
from numpy.polynomial import polynomial as npoly

from qes.errors import DependenceConditionError, InvalidInputError
from qes.models import BetheSolution, OdeSpec, RootConfig, SolverConfig
from qes.poly import ComplexPoly

Roots = Union[Sequence[complex], np.ndarray, RootConfig]


def as_root_array(roots: Roots) -> np.ndarray:
    if isinstance(roots, RootConfig):
        return roots.as_array()
    return np.asarray(roots, dtype=complex).reshape(-1)


def _checked_roots(spec: OdeSpec, roots: Roots) -> np.ndarray:
    z = as_root_array(roots)
    if z.size != spec.n:
        raise InvalidInputError(f"Expected {spec.n} roots, got {z.size}")
    return z


def pair_sum(z: np.ndarray) -> complex:
    """sum_{i<j} z_i z_j"""
    if z.size < 2:
        return 0j
    i, j = np.triu_indices(z.size, k=1)
    return complex(np.sum(z[i] * z[j]))


def coeff_c2(spec: OdeSpec) -> complex:
    n = spec.n
    return -n * (n - 1) * spec.a[4] - n * spec.b[3]


def coeff_c1(spec: OdeSpec, roots: Roots) -> complex:
    z = _checked_roots(spec, roots)
    n = spec.n
    a, b = spec.a, spec.b
    return -(2 * (n - 1) * a[4] + b[3]) * complex(z.sum()) - n * (n - 1) * a[3] - n * b[2]


def coeff_c0(spec: OdeSpec, roots: Roots) -> complex:
    z = _checked_roots(spec, roots)
    n = spec.n
    a, b = spec.a, spec.b
    return (
        -(2 * (n - 1) * a[4] + b[3]) * complex(np.sum(z**2))
        - 2 * a[4] * pair_sum(z)
        - (2 * (n - 1) * a[3] + b[2]) * complex(z.sum())
        - n * (n - 1) * a[2]
        - n * b[1]
    )


def coefficients(spec: OdeSpec, roots: Roots) -> Tuple[complex, complex, complex]:
    return coeff_c2(spec), coeff_c1(spec, roots), coeff_c0(spec, roots)


def _difference_products(z: np.ndarray):
    """Products of root differences with one or two factors deleted.

    Returns (p, drop_one, drop_two) where
      p[i]             = prod_{k != i} (z_i - z_k)
      drop_one[i, j]   = prod_{k != i, j} (z_i - z_k)
      drop_two[i, j, l] = prod_{k != i, j, l} (z_i - z_k)
    """
    n = z.size
    d = z[:, None] - z[None, :]
    np.fill_diagonal(d, 1.0)
    eye = np.eye(n, dtype=bool)
    p = d.prod(axis=1)
    drop_one = np.where(eye[None, :, :], 1.0, d[:, None, :]).prod(axis=2)
    deleted = eye[:, None, :] | eye[None, :, :]
    drop_two = np.where(deleted[None], 1.0, d[:, None, None, :]).prod(axis=3)
    return p, drop_one, drop_two


def _bae_terms(spec: OdeSpec, z: np.ndarray):
    n = z.size
    off = ~np.eye(n, dtype=bool)
    p, drop_one, drop_two = _difference_products(z)
    q = np.where(off, drop_one, 0.0).sum(axis=1)
    x = npoly.polyval(z, spec.a)
    y = npoly.polyval(z, spec.b)
    return x, y, p, q, drop_one, drop_two, off


def bae_residual_cleared(spec: OdeSpec, roots: Roots) -> np.ndarray:
    z = _checked_roots(spec, roots)
    if z.size == 0:
        return np.zeros(0, dtype=complex)
    x, y, p, q, *_ = _bae_terms(spec, z)
    return 2.0 * x * q + y * p


def bae_row_scale(spec: OdeSpec, roots: Roots) -> np.ndarray:
    z = _checked_roots(spec, roots)
    if z.size == 0:
        return np.zeros(0)
    x, y, p, q, *_ = _bae_terms(spec, z)
    return np.maximum(1.0, 2.0 * np.abs(x) * np.abs(q) + np.abs(y) * np.abs(p))


def bae_residual_norm(spec: OdeSpec, roots: Roots) -> float:
    """Largest cleared residual, each row divided by the size of its two terms."""
    z = _checked_roots(spec, roots)
    if z.size == 0:
        return 0.0
    x, y, p, q, *_ = _bae_terms(spec, z)
    f = 2.0 * x * q + y * p
    scale = np.maximum(1.0, 2.0 * np.abs(x) * np.abs(q) + np.abs(y) * np.abs(p))
    return float(np.max(np.abs(f) / scale))


def bae_jacobian(spec: OdeSpec, roots: Roots) -> np.ndarray:
    z = _checked_roots(spec, roots)
    n = z.size
    if n == 0:
        return np.zeros((0, 0), dtype=complex)
    x, y, p, q, drop_one, drop_two, off = _bae_terms(spec, z)
    dx = npoly.polyval(z, npoly.polyder(spec.a))
    dy = npoly.polyval(z, npoly.polyder(spec.b))

    valid = off[:, :, None] & off[:, None, :] & off[None, :, :]
    h1 = np.where(valid, drop_two, 0.0).sum(axis=2)
    g2 = h1.sum(axis=1)

    jac = -2.0 * x[:, None] * h1 - y[:, None] * drop_one
    jac[~off] = 2.0 * dx * q + 2.0 * x * g2 + dy * p + y * q
    return jac


def guard_violation(spec: OdeSpec, roots: Roots, cfg: SolverConfig) -> Union[str, None]:
    z = as_root_array(roots)
    if z.size == 0:
        return None
    if z.size > 1:
        gaps = np.abs(z[:, None] - z[None, :])
        np.fill_diagonal(gaps, np.inf)
        if gaps.min() < cfg.sep_tol:
            return "separation"
    if np.min(np.abs(npoly.polyval(z, spec.a))) < cfg.pole_tol * spec.x_scale:
        return "pole"
    return None


def ode_residual(spec: OdeSpec, roots: Roots, c2: complex, c1: complex, c0: complex) -> float:
    s = ComplexPoly.from_roots(as_root_array(roots))
    z_poly = ComplexPoly([c0, c1, c2])
    t = spec.X * s.derivative(2) + spec.Y * s.derivative() + z_poly * s
    largest = max(spec.coefficient_scale, abs(c2), abs(c1), abs(c0))
    scale = max(1.0, largest * math.factorial(spec.n))
    return t.max_abs_coeff / scale


def certify_ode(spec: OdeSpec, sol: BetheSolution) -> float:
    return ode_residual(spec, sol.roots, sol.c2, sol.c1, sol.c0)


def make_solution(spec: OdeSpec, roots: Roots, cfg: SolverConfig) -> BetheSolution:
    z = _checked_roots(spec, roots)
    c2, c1, c0 = coefficients(spec, z)
    bae = bae_residual_norm(spec, z)
    ode = ode_residual(spec, z, c2, c1, c0)
    certified = (
        ode <= cfg.cert_tol
        and bae <= cfg.cert_tol
        and guard_violation(spec, z, cfg) is None
    )
    return BetheSolution(
        config=RootConfig(tuple(z)),
        c2=c2,
        c1=c1,
        c0=c0,
        bae_residual=bae,
        ode_residual=ode,
        certified=certified,
    )


def symmetric_identity_suite(points: Roots) -> Tuple[float, float, float, float]:
    """|LHS - RHS| of the four double-sum identities sum_{i != j} z_i^k / (z_i - z_j), k = 0..3."""
    z = as_root_array(points)
    n = z.size
    if n < 2:
        return (0.0, 0.0, 0.0, 0.0)

    d = z[:, None] - z[None, :]
    off = ~np.eye(n, dtype=bool)
    if np.any(np.abs(d[off]) == 0.0):
        raise InvalidInputError("Identity suite requires pairwise distinct points")
    inverse_row_sums = np.where(off, 1.0 / np.where(off, d, 1.0), 0.0).sum(axis=1)

    s1 = complex(z.sum())
    s2 = complex(np.sum(z**2))
    expected = (0.0, n * (n - 1) / 2, (n - 1) * s1, (n - 1) * s2 + pair_sum(z))
    return tuple(
        float(abs(complex(np.sum(z**k * inverse_row_sums)) - rhs))
        for k, rhs in enumerate(expected)
    )


def dependent_linear_z(spec: OdeSpec, tol: float = 1e-12) -> ComplexPoly:
    """The single Z shared by every solution when a4 = b3 = 0 and b2 = -2(n-1)a3."""
    n = spec.n
    a, b = spec.a, spec.b
    scale = max(1.0, spec.coefficient_scale)
    if abs(a[4]) > tol * scale or abs(b[3]) > tol * scale or abs(b[2] + 2 * (n - 1) * a[3]) > tol * scale:
        raise DependenceConditionError(
            f"Linear-Z condition needs a4 = b3 = 0 and b2 = -2(n-1)a3 (n={n}, a={a}, b={b})"
        )
    return ComplexPoly([-n * (n - 1) * a[2] - n * b[1], -n * ((n - 1) * a[3] + b[2])])
