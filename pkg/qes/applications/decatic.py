"""Radial Schrodinger equation with a decatic potential in N dimensions.

With R(r) = r^l exp(-alpha r^2/2 - beta r^4/4 - gamma r^6/6) S(r^2) and
gamma = sqrt(2), S solves z S'' + Y S' + Z S = 0 where

    Y = -gamma z^3 - beta z^2 - alpha z + l + N/2,
    beta = lambda4 / sqrt(2),   alpha = (lambda3 - lambda4^2/4) / sqrt(2).

The c2 and c1 identities fix (lambda3, lambda4) for given (lambda1, lambda2);
c0 then gives the energy E = alpha (4n + N + 2l)/2 + 2 beta sum z + 2 gamma sum z^2.
"""
import math
from dataclasses import dataclass
from typing import Dict, List, NamedTuple, Optional, Tuple

import numpy as np
from loguru import logger
from scipy.optimize import brentq

from qes.applications.base import AppSolution, WavefunctionDescriptor, identification, real_part_if_real
from qes.augmented import AugmentedSystem, ParameterSpec, solve_augmented
from qes.errors import InvalidInputError
from qes.models import OdeSpec, SolveStats, SolverConfig
from qes.poly import ComplexPoly

SYSTEM = "decatic"
UNITS = "hbar = 2m = 1; r dimensionless"
GAMMA = math.sqrt(2.0)
SQRT2 = math.sqrt(2.0)
SCAN = np.geomspace(1e-3, 1e3, 4000)


@dataclass(frozen=True)
class DecaticParams:
    lambda1: float
    lambda2: float
    n: int
    N: int = 3
    l: int = 0

    def __post_init__(self):
        if self.N < 1 or self.l < 0 or self.n < 0:
            raise InvalidInputError(f"need N >= 1, l >= 0, n >= 0; got N={self.N}, l={self.l}, n={self.n}")

    @property
    def eta(self) -> float:
        return self.l + self.N / 2.0


class DecaticReference(NamedTuple):
    lambda3: float
    lambda4: float
    energy: float
    z1: Optional[float] = None


def drift(p: Dict[str, complex]) -> Tuple[complex, complex]:
    """(alpha, beta) for the current (lambda3, lambda4)."""
    lam3, lam4 = p["lambda3"], p["lambda4"]
    return (lam3 - lam4 * lam4 / 4.0) / SQRT2, lam4 / SQRT2


def decatic_spec(p: Dict[str, complex], params: DecaticParams) -> OdeSpec:
    alpha, beta = drift(p)
    return OdeSpec(a=(0, 1, 0, 0, 0), b=(params.eta, -alpha, -beta, -GAMMA), n=params.n)


def target_coefficients(p: Dict[str, complex], params: DecaticParams) -> Tuple[complex, complex, complex]:
    alpha, beta = drift(p)
    nl = params.N + 2 * params.l
    c2 = (2 * alpha * beta - GAMMA * (nl + 4) - 2 * params.lambda2) / 4.0
    c1 = (alpha * alpha - beta * (nl + 2) - 2 * params.lambda1) / 4.0
    return c2, c1, 0j


def energy_from(c0: complex, p: Dict[str, complex], params: DecaticParams) -> complex:
    alpha, _ = drift(p)
    return 2.0 * c0 + alpha * (params.N + 2 * params.l) / 2.0


def build_system(params: DecaticParams) -> AugmentedSystem:
    def target(p):
        return target_coefficients(p, params)

    return AugmentedSystem(
        params=(
            ParameterSpec("lambda3", 0.0, 20.0),
            ParameterSpec("lambda4", 0.05, 10.0, positive=True),
        ),
        spec_builder=lambda p: decatic_spec(p, params),
        constraints=(identification(target, 0), identification(target, 1)),
        n=params.n,
        label=f"{SYSTEM} n={params.n}",
    )


def real_cubic_roots(p: float, q: float) -> List[float]:
    """Real roots of t^3 + p t + q = 0, using real cube roots when there is one real root."""
    disc = (q / 2.0) ** 2 + (p / 3.0) ** 3
    if disc >= 0:
        root = math.sqrt(disc)
        return [float(np.cbrt(-q / 2.0 + root) + np.cbrt(-q / 2.0 - root))]
    radius = 2.0 * math.sqrt(-p / 3.0)
    theta = math.acos(max(-1.0, min(1.0, (3.0 * q / (2.0 * p)) * math.sqrt(-3.0 / p))))
    return sorted(radius * math.cos(theta / 3.0 - 2.0 * math.pi * k / 3.0) for k in range(3))


def reference_n0(params: DecaticParams, printed: bool = False) -> List[DecaticReference]:
    """Nodeless states from the cubic in lambda4.

    printed=True keeps the published constant term, which lacks the factor
    sqrt(2) that the c1 identity puts in front of W^2 / M.
    """
    nl = params.N + 2 * params.l
    m = nl + 2.0
    w = nl + 4.0 + SQRT2 * params.lambda2
    lam1 = params.lambda1
    p = -24.0 * lam1**2 / (9.0 * m**2)
    q = 32.0 * SQRT2 * lam1**3 / (27.0 * m**3) - (1.0 if printed else SQRT2) * w * w / m
    shift = -2.0 * SQRT2 * lam1 / (3.0 * m)

    found = []
    for t in real_cubic_roots(p, q):
        lam4 = t + shift
        if lam4 <= 0:
            continue
        lam3 = lam4**2 / 4.0 + SQRT2 * w / lam4
        found.append(DecaticReference(lam3, lam4, w * nl / (2.0 * lam4)))
    return found


def _n1_pieces(lam4: float, params: DecaticParams) -> Tuple[float, float]:
    nl = params.N + 2 * params.l
    k1 = SQRT2 * (nl + 8.0) + 2.0 * params.lambda2
    z1 = (0.5 * (k1 / lam4) ** 2 - lam4 * (nl + 6.0) / SQRT2 - 2.0 * params.lambda1) / (4.0 * SQRT2)
    return k1, z1


def _n1_bae(lam4: float, params: DecaticParams) -> float:
    k1, z1 = _n1_pieces(lam4, params)
    return SQRT2 * z1**3 + (lam4 / SQRT2) * z1**2 + (k1 / (SQRT2 * lam4)) * z1 - params.eta


def reference_n1(params: DecaticParams) -> List[DecaticReference]:
    """One-node states: the c2 and c1 identities leave a scalar equation in lambda4."""
    values = np.array([_n1_bae(x, params) for x in SCAN])
    found = []
    for i in np.flatnonzero(np.sign(values[:-1]) * np.sign(values[1:]) < 0):
        lam4 = brentq(_n1_bae, SCAN[i], SCAN[i + 1], args=(params,), xtol=1e-15, rtol=1e-14)
        k1, z1 = _n1_pieces(lam4, params)
        alpha = k1 / (SQRT2 * lam4)
        beta = lam4 / SQRT2
        energy = alpha * (4 + params.N + 2 * params.l) / 2.0 + 2.0 * beta * z1 + 2.0 * GAMMA * z1 * z1
        found.append(DecaticReference(lam4**2 / 4.0 + k1 / lam4, lam4, energy, z1))
    return found


def n1_root_cardano(lam3: float, lam4: float, params: DecaticParams, printed: bool = False) -> List[float]:
    """Real roots of the one-node Bethe cubic.

    printed=True uses the published shift and depressed coefficients, which do
    not reduce z^3 + (lambda4/2) z^2 + ((lambda3 - lambda4^2/4)/2) z - (N + 2l)/(2 sqrt 2).
    """
    nl = params.N + 2 * params.l
    if printed:
        u = lam4**2 / 24.0 - lam3 / 2.0
        v = 5.0 * lam4**3 / 432.0 - lam3 / 2.0 + nl / (2.0 * SQRT2)
        return [lam4 / 6.0 + t for t in real_cubic_roots(u, v)]
    p = lam3 / 2.0 - 5.0 * lam4**2 / 24.0
    q = 13.0 * lam4**3 / 432.0 - lam3 * lam4 / 12.0 - nl / (2.0 * SQRT2)
    return [t - lam4 / 6.0 for t in real_cubic_roots(p, q)]


def references(params: DecaticParams) -> List[DecaticReference]:
    if params.n == 0:
        return reference_n0(params)
    if params.n == 1:
        return reference_n1(params)
    raise InvalidInputError(f"closed-form references exist for n = 0 and n = 1 only, got {params.n}")


def _wavefunction(p: Dict[str, complex], s_poly: ComplexPoly, l: int) -> WavefunctionDescriptor:
    alpha, beta = drift(p)

    def to_z(r):
        return r * r

    return WavefunctionDescriptor(
        coordinate="r",
        polynomial=s_poly,
        power=l,
        exponent=ComplexPoly([0, 0, -alpha / 2.0, 0, -beta / 4.0, 0, -GAMMA / 6.0]),
        substitution=to_z,
        substitution_label="z = r^2",
    )


def solve(params: DecaticParams, cfg: SolverConfig, stats: Optional[SolveStats] = None) -> List[AppSolution]:
    results = []
    for sol in solve_augmented(build_system(params), cfg, stats):
        alpha, beta = drift(sol.params)
        if not (alpha.real > 0 and beta.real > 0):
            logger.debug(f"{SYSTEM}: dropping alpha={alpha}, beta={beta}; the potential is not confining")
            if stats is not None:
                stats.increment("rejected_reality")
            continue
        results.append(
            AppSolution(
                system=SYSTEM,
                params={
                    "lambda1": params.lambda1,
                    "lambda2": params.lambda2,
                    "lambda3": real_part_if_real(sol.params["lambda3"]),
                    "lambda4": real_part_if_real(sol.params["lambda4"]),
                    "alpha": real_part_if_real(alpha),
                    "beta": real_part_if_real(beta),
                    "gamma": GAMMA,
                },
                solution=sol.solution,
                energy=real_part_if_real(energy_from(sol.solution.c0, sol.params, params)),
                units=UNITS,
                wavefunction=_wavefunction(sol.params, sol.solution.s_poly(), params.l),
                constraint_residual=sol.constraint_residual,
            )
        )
    logger.info(f"{SYSTEM}: n={params.n} lambda1={params.lambda1} lambda2={params.lambda2}: {len(results)} solution(s)")
    return results
