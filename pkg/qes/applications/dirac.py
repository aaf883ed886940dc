"""Planar Dirac electron in a Coulomb field plus a uniform magnetic field.

The upper radial component is F = r^xi e^{-eB r^2/4} f(r) with
xi = sqrt((l + 1/2)^2 - (Z alpha)^2) and r0 = Z alpha / (E + m). Then f solves

    r (r + r0) f'' + [(2 xi + 1) r0 + 2 xi r - eB r0 r^2 - eB r^3] f'
        + (c2 r^2 + c1 r + c0) f = 0

with c2 = E^2 - m^2 - eB (xi + l + 3/2),
     c1 = 2 E Z alpha + [E^2 - m^2 - eB (xi + l + 5/2)] r0,
     c0 = 2 E Z alpha r0 + l + 1/2 - xi.

Natural units hbar = c = 1; alpha = 1/137 and e = sqrt(alpha).
"""
import cmath
import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np
from loguru import logger

from qes.applications.base import AppSolution, WavefunctionDescriptor, identification, real_part_if_real
from qes.augmented import AugmentedSystem, ParameterSpec, solve_augmented
from qes.errors import InvalidInputError
from qes.models import AugmentedSolution, OdeSpec, SolveStats, SolverConfig
from qes.poly import ComplexPoly

SYSTEM = "dirac"
UNITS = "natural units (hbar = c = 1), alpha = 1/137, e = sqrt(alpha)"
ALPHA = 1.0 / 137.0
CHARGE = math.sqrt(ALPHA)


@dataclass(frozen=True)
class DiracParams:
    l: int = 0
    n: int = 0
    m_e: float = 1.0
    Z: float = 1.0
    unknowns: Optional[Tuple[str, ...]] = None

    def __post_init__(self):
        if self.m_e <= 0:
            raise InvalidInputError(f"mass must be positive, got {self.m_e}")
        if self.l < 0:
            raise InvalidInputError(f"l must be nonnegative, got {self.l}")
        if "Z" not in self.resolved_unknowns and not (self.Z * ALPHA) < self.l + 0.5:
            raise InvalidInputError(f"Z alpha must stay below l + 1/2 for a real xi, got Z = {self.Z}")
        if not set(self.resolved_unknowns) <= {"E", "Z", "eB"}:
            raise InvalidInputError(f"unknowns must be drawn from E, Z, eB, got {self.unknowns}")

    @property
    def resolved_unknowns(self) -> Tuple[str, ...]:
        if self.unknowns is not None:
            return tuple(self.unknowns)
        return ("E", "eB") if self.n == 0 else ("E", "Z", "eB")

    def boxes(self) -> Tuple[ParameterSpec, ...]:
        """Start boxes; the nodeless state at fixed Z is also seeded from its closed form."""
        z_max = (self.l + 0.5) / ALPHA
        e_start, eb_start = (), ()
        if self.n == 0 and "Z" not in self.resolved_unknowns:
            e0, eb0 = closed_form_n0(self.Z, self.l, self.m_e)
            e_start, eb_start = (complex(e0),), (complex(eb0),)
        specs = {
            "E": ParameterSpec("E", -0.95 * self.m_e, 0.95 * self.m_e, starts=e_start),
            "Z": ParameterSpec("Z", 1.0, 0.9 * z_max, positive=True),
            "eB": ParameterSpec("eB", -2.0 * self.m_e**2, 2.0 * self.m_e**2, starts=eb_start),
        }
        return tuple(specs[name] for name in self.resolved_unknowns)

    def fixed_values(self) -> Dict[str, complex]:
        values = {"E": 0j, "Z": complex(self.Z), "eB": 0j}
        return {k: v for k, v in values.items() if k not in self.resolved_unknowns}


def xi_value(z: complex, l: int) -> complex:
    return cmath.sqrt((l + 0.5) ** 2 - (z * ALPHA) ** 2)


def r0_value(p: Dict[str, complex], m: float) -> complex:
    return p["Z"] * ALPHA / (p["E"] + m)


def dirac_spec(p: Dict[str, complex], l: int, m: float, n: int) -> OdeSpec:
    xi = xi_value(p["Z"], l)
    r0 = r0_value(p, m)
    eb = p["eB"]
    return OdeSpec(a=(0, r0, 1, 0, 0), b=((2 * xi + 1) * r0, 2 * xi, -eb * r0, -eb), n=n)


def target_coefficients(p: Dict[str, complex], l: int, m: float) -> Tuple[complex, complex, complex]:
    e, eb, z_alpha = p["E"], p["eB"], p["Z"] * ALPHA
    xi = xi_value(p["Z"], l)
    r0 = r0_value(p, m)
    c2 = e * e - m * m - eb * (xi + l + 1.5)
    c1 = 2 * e * z_alpha + (e * e - m * m - eb * (xi + l + 2.5)) * r0
    c0 = 2 * e * z_alpha * r0 + l + 0.5 - xi
    return c2, c1, c0


def spectral_relations(p: Dict[str, complex], roots, l: int, m: float) -> Tuple[float, float, float]:
    """Residuals of the energy, magnetic and Coulomb relations that tie (E, Z, eB) to the roots."""
    z = np.asarray(roots, dtype=complex)
    n = z.size
    e, eb, z_alpha = p["E"], p["eB"], p["Z"] * ALPHA
    xi = xi_value(p["Z"], l)
    r0 = r0_value(p, m)
    s1, s2 = complex(z.sum()), complex(np.sum(z**2))
    energy = e * e - (m * m + eb * (n + l + xi + 1.5))
    magnetic = 2 * e * z_alpha - eb * (r0 + s1)
    coulomb = 2 * e * z_alpha * r0 - (-n * (n + 2 * xi - 1) + xi - (l + 0.5) + eb * (s2 + r0 * s1))
    return float(abs(energy)), float(abs(magnetic)), float(abs(coulomb))


def closed_form_n0(z: float, l: int, m: float) -> Tuple[float, float]:
    """(E, eB) of the nodeless state at charge Z."""
    xi = math.sqrt((l + 0.5) ** 2 - (z * ALPHA) ** 2)
    energy = -m / (2.0 * (l + 1.0 + xi))
    eb = -(m**2) * (l + 0.5 + xi) / (l + 1.0 + xi) ** 2
    return energy, eb


def build_system(params: DiracParams) -> AugmentedSystem:
    def target(p):
        return target_coefficients(p, params.l, params.m_e)

    return AugmentedSystem(
        params=params.boxes(),
        spec_builder=lambda p: dirac_spec(p, params.l, params.m_e, params.n),
        constraints=tuple(identification(target, k) for k in range(3)),
        n=params.n,
        label=f"{SYSTEM} n={params.n} l={params.l}",
        fixed=params.fixed_values(),
    )


def f_component(sol: AugmentedSolution, l: int) -> WavefunctionDescriptor:
    return WavefunctionDescriptor(
        coordinate="r",
        polynomial=sol.solution.s_poly(),
        power=xi_value(sol.params["Z"], l),
        exponent=ComplexPoly([0.0, 0.0, -sol.params["eB"] / 4.0]),
    )


def g_component(sol: AppSolution, l: int, m: float, grid) -> np.ndarray:
    """G = -[F' - ((l + 1/2)/r + eB r/2) F] / (E + m + Z alpha / r)."""
    r = np.asarray(grid, dtype=complex)
    p = sol.params
    xi = xi_value(p["Z"], l)
    f = sol.solution.s_poly()
    envelope = np.power(r, xi) * np.exp(-p["eB"] * r * r / 4.0)
    bracket = ((xi - l - 0.5) / r - p["eB"] * r) * f.eval(r) + f.derivative().eval(r)
    return -envelope * bracket / (p["E"] + m + p["Z"] * ALPHA / r)


def g_component_printed_n0(sol: AppSolution, l: int, m: float, grid) -> np.ndarray:
    """The published nodeless G, (xi - l - 1/2 + eB r^2) F / ((E + m) r + Z alpha)."""
    r = np.asarray(grid, dtype=complex)
    p = sol.params
    xi = xi_value(p["Z"], l)
    big_f = np.power(r, xi) * np.exp(-p["eB"] * r * r / 4.0)
    return (xi - l - 0.5 + p["eB"] * r * r) * big_f / ((p["E"] + m) * r + p["Z"] * ALPHA)


def physical_params(p: Dict[str, complex], l: int, m: float) -> Dict[str, complex]:
    return {
        "E": real_part_if_real(p["E"]),
        "Z": real_part_if_real(p["Z"]),
        "eB": real_part_if_real(p["eB"]),
        "B": real_part_if_real(p["eB"] / CHARGE),
        "xi": real_part_if_real(xi_value(p["Z"], l)),
        "r0": real_part_if_real(r0_value(p, m)),
    }


def solve(params: DiracParams, cfg: SolverConfig, stats: Optional[SolveStats] = None) -> List[AppSolution]:
    results = []
    for sol in solve_augmented(build_system(params), cfg, stats):
        results.append(
            AppSolution(
                system=SYSTEM,
                params=physical_params(sol.params, params.l, params.m_e),
                solution=sol.solution,
                energy=real_part_if_real(sol.params["E"]),
                units=UNITS,
                wavefunction=f_component(sol, params.l),
                constraint_residual=sol.constraint_residual,
                tags={
                    "relations": spectral_relations(sol.params, sol.roots, params.l, params.m_e),
                },
            )
        )
    logger.info(f"{SYSTEM}: n={params.n} l={params.l}: {len(results)} solution(s)")
    return results
