"""Independent checks on the Bethe solver.

* the sl(2) route: when b3 = -2(n-1)a4 the operator X d^2 + Y d + c2 z^2 + c1 z
  preserves polynomials of degree <= n, and its (n+1)x(n+1) matrix has the
  values -c0 of all n+1 solutions as eigenvalues;
* brute-force coefficient matching on X S'' + Y S' + Z S = 0, solved for the
  coefficients of S and (c1, c0) with scipy.

Neither route calls into the Bethe residuals or their Newton loop.
"""
import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from loguru import logger
from numpy.polynomial import polynomial as npoly
from scipy import linalg, optimize

from qes.errors import DependenceConditionError, InvalidInputError, QESError
from qes.models import OdeSpec, SolverConfig, canonical_root_key
from qes.poly import ComplexPoly

DEPENDENCE_TOL = 1e-12
MAX_ORACLE_DEGREE = 4
COEFF_MATCH_TOL = 1e-7


@dataclass(frozen=True)
class Sl2Matrix:
    n: int
    entries: np.ndarray
    spec: OdeSpec

    @property
    def dimension(self) -> int:
        return self.n + 1


@dataclass(frozen=True)
class CoefficientSolution:
    s_coeffs: Tuple[complex, ...]
    c2: complex
    c1: complex
    c0: complex
    roots: Tuple[complex, ...]
    residual: float

    @property
    def coefficients(self) -> Tuple[complex, complex, complex]:
        return (self.c2, self.c1, self.c0)


def is_dependent(spec: OdeSpec, tol: float = DEPENDENCE_TOL) -> bool:
    gap = abs(spec.b[3] + 2 * (spec.n - 1) * spec.a[4])
    return gap <= tol * max(1.0, spec.coefficient_scale)


def _j_plus(p: ComplexPoly, n: int) -> ComplexPoly:
    return ComplexPoly.monomial(2) * p.derivative() - ComplexPoly.monomial(1, n) * p


def _j_zero(p: ComplexPoly, n: int) -> ComplexPoly:
    return ComplexPoly.monomial(1) * p.derivative() - p.scale(n / 2)


def _j_minus(p: ComplexPoly) -> ComplexPoly:
    return p.derivative()


def apply_sl2_hamiltonian(spec: OdeSpec, p: ComplexPoly) -> ComplexPoly:
    """H p for H written as a quadratic element in J+, J0, J- of spin n/2."""
    n = spec.n
    a0, a1, a2, a3, a4 = spec.a
    b0, b1, b2, _ = spec.b

    jp, j0, jm = _j_plus(p, n), _j_zero(p, n), _j_minus(p)
    result = (
        _j_plus(jp, n).scale(a4)
        + _j_plus(j0, n).scale(a3)
        + _j_zero(j0, n).scale(a2)
        + _j_zero(jm, n).scale(a1)
        + _j_minus(jm).scale(a0)
        + jp.scale(0.5 * (3 * n - 2) * a3 + b2)
        + j0.scale((n - 1) * a2 + b1)
        + jm.scale(0.5 * n * a1 + b0)
    )
    constant = -0.25 * n * n * a2 + 0.5 * n * ((n - 1) * a2 + b1)
    return result + p.scale(constant)


def build_sl2_matrix(spec: OdeSpec) -> Sl2Matrix:
    if not is_dependent(spec):
        raise DependenceConditionError(
            f"sl(2) matrix needs b3 = -2(n-1)a4; got b3={spec.b[3]}, a4={spec.a[4]}, n={spec.n}"
        )
    n = spec.n
    entries = np.zeros((n + 1, n + 1), dtype=complex)
    for k in range(n + 1):
        image = apply_sl2_hamiltonian(spec, ComplexPoly.monomial(k))
        if image.degree > n:
            raise QESError(f"H maps z^{k} to degree {image.degree} > {n}")
        for row in range(image.degree + 1):
            entries[row, k] = image.coeff(row)
    return Sl2Matrix(n=n, entries=entries, spec=spec)


def _sort_values(values: Sequence[complex]) -> List[complex]:
    return sorted((complex(v) for v in values), key=canonical_root_key)


def sl2_spectrum(m: Sl2Matrix) -> List[complex]:
    return _sort_values(linalg.eigvals(m.entries))


def _scale(spec: OdeSpec, coefficients: Sequence[complex]) -> float:
    largest = max([spec.coefficient_scale] + [abs(c) for c in coefficients])
    return max(1.0, largest * math.factorial(spec.n))


def _ode_image(spec: OdeSpec, s: np.ndarray, c2: complex, c1: complex, c0: complex) -> np.ndarray:
    """Coefficients of z^0 .. z^{n+2} of X S'' + Y S' + Z S."""
    a = np.array(spec.a, dtype=complex)
    b = np.array(spec.b, dtype=complex)
    terms = npoly.polyadd(
        npoly.polyadd(npoly.polymul(a, npoly.polyder(s, 2)), npoly.polymul(b, npoly.polyder(s))),
        npoly.polymul(np.array([c0, c1, c2], dtype=complex), s),
    )
    image = np.zeros(spec.n + 3, dtype=complex)
    image[: min(terms.size, image.size)] = terms[: image.size]
    return image


def _distinct_off_poles(spec: OdeSpec, roots: np.ndarray, cfg: SolverConfig) -> bool:
    if roots.size > 1:
        gaps = np.abs(roots[:, None] - roots[None, :])
        np.fill_diagonal(gaps, np.inf)
        if gaps.min() < cfg.sep_tol:
            return False
    if roots.size and np.min(np.abs(npoly.polyval(roots, np.array(spec.a)))) < cfg.pole_tol * spec.x_scale:
        return False
    return True


def sl2_solutions(m: Sl2Matrix, cfg: SolverConfig) -> List[CoefficientSolution]:
    """Eigenvectors of H read as monic polynomials S, with c0 = -eigenvalue."""
    spec = m.spec
    n = spec.n
    c2 = complex(n * (n - 1) * spec.a[4])
    c1 = complex(-n * ((n - 1) * spec.a[3] + spec.b[2]))
    values, vectors = linalg.eig(m.entries)

    found = []
    for value, vector in zip(values, vectors.T):
        if abs(vector[-1]) < 1e-12 * np.abs(vector).max():
            continue
        s = vector / vector[-1]
        roots = np.asarray(npoly.polyroots(s), dtype=complex) if n else np.zeros(0, dtype=complex)
        c0 = complex(-value)
        residual = float(np.abs(_ode_image(spec, s, c2, c1, c0)).max() / _scale(spec, (c2, c1, c0)))
        if not _distinct_off_poles(spec, roots, cfg):
            continue
        found.append(_record(s, c2, c1, c0, roots, residual))
    return _canonical(found)


def _record(s, c2, c1, c0, roots, residual) -> CoefficientSolution:
    return CoefficientSolution(
        s_coeffs=tuple(complex(v) for v in s),
        c2=complex(c2),
        c1=complex(c1),
        c0=complex(c0),
        roots=tuple(_sort_values(roots)),
        residual=float(residual),
    )


def _canonical(found: List[CoefficientSolution]) -> List[CoefficientSolution]:
    return sorted(
        found,
        key=lambda r: (
            canonical_root_key(r.c0),
            canonical_root_key(r.c1),
            canonical_root_key(r.c2),
            tuple(canonical_root_key(z) for z in r.roots),
        ),
    )


def _split(values: np.ndarray) -> np.ndarray:
    return np.concatenate([values.real, values.imag])


def _join(values: np.ndarray) -> np.ndarray:
    half = values.size // 2
    return values[:half] + 1j * values[half:]


def coeff_system_solve(spec: OdeSpec, cfg: SolverConfig) -> List[CoefficientSolution]:
    n = spec.n
    if n > MAX_ORACLE_DEGREE:
        raise InvalidInputError(f"Coefficient oracle supports n <= {MAX_ORACLE_DEGREE}, got {n}")

    # z^{n+2}: n(n-1)a4 + n b3 + c2 = 0
    c2 = complex(-n * (n - 1) * spec.a[4] - n * spec.b[3])

    def unpack(unknowns: np.ndarray):
        s = np.concatenate([unknowns[:n], [1.0]])
        return s, unknowns[n], unknowns[n + 1]

    def equations(real_unknowns: np.ndarray) -> np.ndarray:
        s, c1, c0 = unpack(_join(real_unknowns))
        return _split(_ode_image(spec, s, c2, c1, c0)[: n + 2])

    rng = np.random.default_rng(cfg.seed)
    x_roots = npoly.polyroots(np.array(spec.a)) if spec.X.degree >= 1 else np.zeros(0)
    radius = 2.0 * (1.0 + (float(np.abs(x_roots).max()) if len(x_roots) else 0.0))

    found: List[CoefficientSolution] = []
    for _ in range(cfg.restarts):
        guess_roots = radius * np.sqrt(rng.random(n)) * np.exp(2j * np.pi * rng.random(n))
        s0 = npoly.polyfromroots(guess_roots) if n else np.ones(1, dtype=complex)
        c1_guess, c0_guess = _linear_z_guess(spec, s0, c2)
        start = np.concatenate([s0[:n], [c1_guess, c0_guess]]).astype(complex)

        result = optimize.root(equations, _split(start), method="hybr", options={"xtol": 1e-14})
        if not np.all(np.isfinite(result.x)):
            continue
        s, c1, c0 = unpack(_join(result.x))
        residual = float(np.abs(_ode_image(spec, s, c2, c1, c0)).max() / _scale(spec, (c2, c1, c0)))
        if residual > cfg.cert_tol:
            continue

        roots = np.asarray(npoly.polyroots(s), dtype=complex) if n else np.zeros(0, dtype=complex)
        if not _distinct_off_poles(spec, roots, cfg):
            continue
        if any(_same_coefficients(s, c1, c0, other) for other in found):
            continue
        found.append(_record(s, c2, c1, c0, roots, residual))

    logger.debug(f"Coefficient oracle: {len(found)} solution(s) for n={n}")
    return _canonical(found)


def _linear_z_guess(spec: OdeSpec, s: np.ndarray, c2: complex) -> Tuple[complex, complex]:
    """Least-squares (c1, c0) for a fixed S; the residual is linear in them."""
    n = spec.n
    rhs = -_ode_image(spec, s, c2, 0.0, 0.0)
    columns = np.zeros((n + 3, 2), dtype=complex)
    columns[1 : n + 2, 0] = s
    columns[0 : n + 1, 1] = s
    (c1, c0), *_ = np.linalg.lstsq(columns, rhs, rcond=None)
    return complex(c1), complex(c0)


def _same_coefficients(s: np.ndarray, c1: complex, c0: complex, other: CoefficientSolution) -> bool:
    mine = np.concatenate([s, [c1, c0]])
    theirs = np.concatenate([np.array(other.s_coeffs), [other.c1, other.c0]])
    return float(np.abs(mine - theirs).max()) <= COEFF_MATCH_TOL * max(1.0, float(np.abs(theirs).max()))


def dependent_c0_printed(spec: OdeSpec, roots: Sequence[complex]) -> complex:
    """c0 in the dependent case with the n-prefixed term carrying 2 b1."""
    z = np.asarray(roots, dtype=complex).reshape(-1)
    n = spec.n
    a, b = spec.a, spec.b
    pairs = sum(z[i] * z[j] for i in range(n) for j in range(i + 1, n))
    return complex(
        -n * ((n - 1) * a[2] + 2 * b[1])
        - 2 * a[4] * pairs
        - (2 * (n - 1) * a[3] + b[2]) * z.sum()
    )


def dependent_c0_discrepancy(spec: OdeSpec, solutions, cfg: SolverConfig) -> List[Dict[str, object]]:
    """Compare the printed dependent-case c0 with the general one on certified roots."""
    rows = []
    for sol in solutions:
        printed = dependent_c0_printed(spec, sol.roots)
        s = npoly.polyfromroots(np.array(sol.roots, dtype=complex)) if sol.roots else np.ones(1, dtype=complex)
        image = _ode_image(spec, s, sol.c2, sol.c1, printed)
        printed_residual = float(np.abs(image).max() / _scale(spec, (sol.c2, sol.c1, printed)))
        rows.append({
            "general_c0": sol.c0,
            "printed_c0": printed,
            "difference": abs(printed - sol.c0),
            "general_residual": sol.ode_residual,
            "printed_residual": printed_residual,
            "general_certifies": sol.ode_residual <= cfg.cert_tol,
            "printed_certifies": printed_residual <= cfg.cert_tol,
        })
    return rows


def spectrum_matches(spectrum: Sequence[complex], values: Sequence[complex]) -> Optional[float]:
    """Greedy match of two multisets; the worst relative gap, or None if sizes differ."""
    remaining = list(spectrum)
    if len(remaining) < len(values):
        return None
    worst = 0.0
    scale = max([1.0] + [abs(v) for v in spectrum])
    for value in values:
        gaps = [abs(value - s) for s in remaining]
        k = int(np.argmin(gaps))
        worst = max(worst, gaps[k] / scale)
        remaining.pop(k)
    return worst
