"""Charged massive scalar field on a Reissner-Nordstrom background.

After factoring out r^mu e^{-m_s r}, the radial function f obeys

    f'' + (2 mu / r + 1/(r - 1) + 1/(r - r_-) - 2 m_s) f'
        + (c2 r^2 + c1 r + c0) / (r (r - 1)(r - r_-)) f = 0

with r_- = g_m^2 / 2 and mu = (1 +- sqrt(1 - 8 a^2)) / 2. The target c2, c1, c0
are closed expressions in (a, m_s, g_m); a solution of degree n pins them to the
Bethe coefficients of the realized equation. Everything depends on a and g_m
only through a^2 and g_m^2, so those squares are the unknowns the solver moves.
"""
import cmath
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from loguru import logger

from qes.applications.base import (
    AppSolution,
    WavefunctionDescriptor,
    identification,
    real_part_if_real,
)
from qes.augmented import AugmentedSystem, ParameterSpec, solve_augmented
from qes.canonical_forms import GHeun2Form, to_spec
from qes.errors import InvalidInputError
from qes.models import AugmentedSolution, OdeSpec, SolveStats, SolverConfig
from qes.poly import ComplexPoly

SYSTEM = "rn"
UNITS = "geometrized units with the outer horizon at r = 1"
BRANCHES = ("+", "-")

# user-facing unknown -> solver parameter
UNKNOWN_PARAMS = {"a": "a_sq", "m_s": "m_s", "g_m": "r_minus"}
BOXES = {
    "a_sq": ParameterSpec("a_sq", 0.0, 0.125, nonnegative=True),
    "m_s": ParameterSpec("m_s", 0.0, 2.0, nonnegative=True),
    "r_minus": ParameterSpec("r_minus", 0.05, 0.95, positive=True),
}


@dataclass(frozen=True)
class RNParams:
    n: int = 0
    unknowns: Tuple[str, ...] = ("a", "m_s")
    a: float = 0.0
    m_s: float = 0.0
    r_minus: float = 0.5
    branches: Tuple[str, ...] = BRANCHES

    def __post_init__(self):
        unknown = set(self.unknowns)
        if not unknown or not unknown <= set(UNKNOWN_PARAMS):
            raise InvalidInputError(f"unknowns must be a nonempty subset of {sorted(UNKNOWN_PARAMS)}, got {self.unknowns}")
        if not set(self.branches) <= set(BRANCHES) or not self.branches:
            raise InvalidInputError(f"branches must be drawn from {BRANCHES}, got {self.branches}")
        if "g_m" not in unknown and not 0 < self.r_minus < 1:
            raise InvalidInputError(f"r_minus must lie in (0, 1), got {self.r_minus}")

    def fixed_values(self) -> Dict[str, complex]:
        values = {"a_sq": complex(self.a**2), "m_s": complex(self.m_s), "r_minus": complex(self.r_minus)}
        for name in self.unknowns:
            values.pop(UNKNOWN_PARAMS[name])
        return values


def mu_value(a_sq: complex, branch: str) -> complex:
    root = cmath.sqrt(1.0 - 8.0 * a_sq)
    return 0.5 * (1.0 + root) if branch == "+" else 0.5 * (1.0 - root)


def rn_form(params: Dict[str, complex], branch: str) -> GHeun2Form:
    mu = mu_value(params["a_sq"], branch)
    return GHeun2Form(f=(0.0, 1.0, params["r_minus"]), nu_s=(2.0 * mu, 1.0, 1.0), nu=-2.0 * params["m_s"])


def rn_spec(params: Dict[str, complex], branch: str, n: int) -> OdeSpec:
    return to_spec(rn_form(params, branch), n)


def target_coefficients(params: Dict[str, complex], branch: str) -> Tuple[complex, complex, complex]:
    a_sq, m, r = params["a_sq"], params["m_s"], params["r_minus"]
    g_sq = 2.0 * r
    mu = mu_value(a_sq, branch)
    c2 = (
        2 * a_sq * (1 + 1 / r)
        - 2 * m * (mu + 1)
        + (g_sq * (a_sq + m * m * r) - m * m * (1 + r * r) + 2 * a_sq / r) / (1 - r)
    )
    c1 = (
        (m * (2 * mu + 1) + mu) * (r + 1)
        - 2 * a_sq * (r + 1) ** 2 / r
        - (g_sq * (a_sq + m * m) * r - m * m * (1 + r * r) * r + 2 * a_sq / r) / (1 - r)
    )
    c0 = 2 * a_sq + 2 * (a_sq - mu * (m + 1)) * r
    return c2, c1, c0


def rn_relations(
    params: Dict[str, complex], roots: Sequence[complex], branch: str, printed: bool = False
) -> Tuple[complex, complex, complex]:
    """Right-hand sides of the c2, c1, c0 relations written out in the roots.

    printed=True reproduces the published c0 relation, whose last term has
    (n - 2 mu) and -2 m_s r_- where the Bethe coefficients give (n + 2 mu) and
    +2 m_s r_-.
    """
    z = np.asarray(roots, dtype=complex)
    n = z.size
    m, r = params["m_s"], params["r_minus"]
    mu = mu_value(params["a_sq"], branch)
    s1, s2 = complex(z.sum()), complex(np.sum(z**2))
    c2 = 2 * m * n
    c1 = 2 * m * s1 - n * (n + 2 * mu + 1 + 2 * m * (r + 1))
    tail = n * ((n - 2 * mu) * (r + 1) - 2 * m * r) if printed else n * ((n + 2 * mu) * (r + 1) + 2 * m * r)
    c0 = 2 * m * s2 - 2 * (n + mu + m * (r + 1)) * s1 + tail
    return c2, c1, c0


def build_system(params: RNParams, branch: str) -> AugmentedSystem:
    def target(p):
        return target_coefficients(p, branch)

    return AugmentedSystem(
        params=tuple(BOXES[UNKNOWN_PARAMS[name]] for name in params.unknowns),
        spec_builder=lambda p: rn_spec(p, branch, params.n),
        constraints=tuple(identification(target, k) for k in range(3)),
        n=params.n,
        label=f"{SYSTEM} n={params.n} branch {branch}",
        fixed=params.fixed_values(),
    )


def physical_params(p: Dict[str, complex], branch: str) -> Dict[str, complex]:
    return {
        "a": real_part_if_real(cmath.sqrt(p["a_sq"])),
        "m_s": real_part_if_real(p["m_s"]),
        "g_m": real_part_if_real(cmath.sqrt(2.0 * p["r_minus"])),
        "r_minus": real_part_if_real(p["r_minus"]),
        "mu": real_part_if_real(mu_value(p["a_sq"], branch)),
    }


def _wavefunction(sol: AugmentedSolution, branch: str) -> WavefunctionDescriptor:
    return WavefunctionDescriptor(
        coordinate="r",
        polynomial=sol.solution.s_poly(),
        power=mu_value(sol.params["a_sq"], branch),
        exponent=ComplexPoly([0.0, -sol.params["m_s"]]),
    )


def printed_c0_gap(sol: AugmentedSolution, branch: str) -> float:
    derived = rn_relations(sol.params, sol.roots, branch)[2]
    printed = rn_relations(sol.params, sol.roots, branch, printed=True)[2]
    return float(abs(derived - printed))


def solve(params: RNParams, cfg: SolverConfig, stats: Optional[SolveStats] = None) -> List[AppSolution]:
    results = []
    for branch in params.branches:
        for sol in solve_augmented(build_system(params, branch), cfg, stats):
            results.append(
                AppSolution(
                    system=SYSTEM,
                    params=physical_params(sol.params, branch),
                    solution=sol.solution,
                    energy=None,
                    units=UNITS,
                    wavefunction=_wavefunction(sol, branch),
                    constraint_residual=sol.constraint_residual,
                    branch={"mu": branch},
                    tags={"printed_c0_gap": printed_c0_gap(sol, branch)},
                )
            )
    logger.info(f"{SYSTEM}: n={params.n} unknowns={list(params.unknowns)}: {len(results)} solution(s)")
    return results