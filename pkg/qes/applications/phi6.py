"""Fluctuations around the phi^6 kink.

With s = 1/epsilon^2 the stability equation becomes X S'' + Y S' + Z S = 0 in
z = cosh(mu x / 2), where

    X = z^4 + (s - 1) z^2 - s,    Y = -5 z^3 + (s + 6) z,
    Z = (4E/mu^2 + 5) z^2 + 4 E s / mu^2 - s - 6.

Matching Z against the Bethe coefficients gives E = mu^2 (c2 - 5) / 4 and two
constraints on (roots, s): the roots sum to zero, and s obeys a quadratic
relation in the roots.
"""
from dataclasses import dataclass, replace
from typing import Dict, List, Optional

import numpy as np
from loguru import logger

from qes.acceptance import match_distance
from qes.applications.base import AppSolution, WavefunctionDescriptor, real_part_if_real
from qes.augmented import AugmentedSystem, ParameterSpec, free_parameter_detect, solve_augmented
from qes.bethe import pair_sum
from qes.errors import InvalidInputError
from qes.models import AugmentedSolution, OdeSpec, SolveStats, SolverConfig

SYSTEM = "phi6"
UNITS = "natural units of the kink (mass scale mu); x dimensionless"
PARAM = "inv_eps_sq"
S_BOX = (1e-3, 10.0)


@dataclass(frozen=True)
class Phi6Params:
    mu: float
    n: int
    s_low: float = S_BOX[0]
    s_high: float = S_BOX[1]

    def __post_init__(self):
        if self.n < 0:
            raise InvalidInputError(f"n must be nonnegative, got {self.n}")
        if not 0 < self.s_low <= self.s_high:
            raise InvalidInputError(f"s box must lie in (0, inf), got [{self.s_low}, {self.s_high}]")


def phi6_spec(s: complex, n: int) -> OdeSpec:
    return OdeSpec(a=(-s, 0, s - 1, 0, 1), b=(0, s + 6, 0, -5), n=n)


def root_sum(params: Dict[str, complex], roots: np.ndarray, spec: OdeSpec) -> complex:
    return complex(roots.sum())


def coupling_relation(params: Dict[str, complex], roots: np.ndarray, spec: OdeSpec) -> complex:
    n = roots.size
    s = params[PARAM]
    return 6 * (n - 1) * s - ((n - 1) * (n - 6) + (5 - 2 * (n - 1)) * complex(np.sum(roots**2)) - 2 * pair_sum(roots))


def build_system(params: Phi6Params) -> AugmentedSystem:
    return AugmentedSystem(
        params=(ParameterSpec(PARAM, params.s_low, params.s_high, positive=True),),
        spec_builder=lambda p: phi6_spec(p[PARAM], params.n),
        constraints=(root_sum, coupling_relation),
        n=params.n,
        label=f"{SYSTEM} n={params.n}",
    )


def energy(mu: float, c2: complex) -> complex:
    return mu * mu * (c2 - 5.0) / 4.0


def closed_form_energy(mu: float, n: int) -> float:
    return mu * mu * (n - 1) * (5 - n) / 4.0


def nonnegative_energy_levels(max_n: int) -> List[int]:
    return [n for n in range(max_n + 1) if closed_form_energy(1.0, n) >= 0]


def _wavefunction(sol: AugmentedSolution, mu: float) -> WavefunctionDescriptor:
    s = sol.params[PARAM]

    def to_z(x):
        return np.cosh(mu * x / 2.0)

    def envelope(x):
        return (1.0 + s + np.sinh(mu * x / 2.0) ** 2) ** -1.5

    return WavefunctionDescriptor(
        coordinate="x",
        polynomial=sol.solution.s_poly(),
        substitution=to_z,
        substitution_label="z = cosh(mu x / 2)",
        envelope=envelope,
        envelope_label="(1 + s + sinh^2(mu x / 2))^(-3/2)",
    )


def _collapse_free(system: AugmentedSystem, found: List[AugmentedSolution], cfg: SolverConfig):
    """One representative per root set when s is left free by the constraints."""
    kept = []
    for sol in found:
        free = tuple(free_parameter_detect(system, sol, cfg))
        if free and any(
            other.free_params == free and match_distance(sol.roots, other.roots) < 10.0 * cfg.sep_tol
            for other in kept
        ):
            continue
        kept.append(replace(sol, free_params=free))
    return kept


def solve(params: Phi6Params, cfg: SolverConfig, stats: Optional[SolveStats] = None) -> List[AppSolution]:
    system = build_system(params)
    found = _collapse_free(system, solve_augmented(system, cfg, stats), cfg)

    results = []
    for sol in found:
        e = real_part_if_real(energy(params.mu, sol.solution.c2))
        results.append(
            AppSolution(
                system=SYSTEM,
                params={"mu": params.mu, PARAM: real_part_if_real(sol.params[PARAM])},
                solution=sol.solution,
                energy=e,
                units=UNITS,
                wavefunction=_wavefunction(sol, params.mu),
                constraint_residual=sol.constraint_residual,
                branch={"stability": "unstable" if e.real < 0 else "stable"},
                tags={"free_params": list(sol.free_params)},
            )
        )
    if any(r.branch["stability"] == "unstable" for r in results):
        logger.warning(f"{SYSTEM}: n={params.n} gives a negative energy, an unstable mode")
    logger.info(f"{SYSTEM}: n={params.n}: {len(results)} solution(s)")
    return results
