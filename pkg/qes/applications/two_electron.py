"""Two electrons in an external oscillator potential.

In the scaled radial variable z = u/(2R) the relative-motion equation is a Heun
equation with poles 0, -1, 1. Its Z is 2R - 4R^2 E z, so every polynomial
solution fixes both the scale R and the energy E:

    R = c0 / 2,    E = -c1 / (4 R^2)

Only R real and positive gives a physical state; the rest are reported as
discarded. Atomic units throughout.
"""
import math
from dataclasses import dataclass
from typing import List, Optional, Tuple

from loguru import logger

from qes.applications.base import AppSolution, WavefunctionDescriptor, real_part_if_real
from qes.canonical_forms import HeunForm, to_spec
from qes.errors import InvalidInputError
from qes.models import BetheSolution, OdeSpec, SolveStats, SolverConfig
from qes.poly import is_real_value
from qes.solver import solve_all

SYSTEM = "two-electron"
UNITS = "atomic units (hbar = m_e = e = 1); E in units of the oscillator energy"
POLES = (0.0, -1.0, 1.0)


@dataclass(frozen=True)
class TwoElectronParams:
    delta: float
    gamma: float
    n: int

    def __post_init__(self):
        if self.gamma == 0:
            raise InvalidInputError("gamma must be nonzero")
        if self.n < 1:
            raise InvalidInputError(f"two-electron states need n >= 1, got {self.n}")

    def form(self) -> HeunForm:
        side = 0.5 * (self.delta - 1.0 / self.gamma)
        return HeunForm(d=POLES, alpha=(1.0 / self.gamma, side, side))

    def spec(self) -> OdeSpec:
        return to_spec(self.form(), self.n)


def scale_and_energy(solution: BetheSolution) -> Tuple[complex, Optional[complex]]:
    r = solution.c0 / 2.0
    if abs(r) == 0:
        return r, None
    return r, -solution.c1 / (4.0 * r * r)


def closed_form(delta: float, gamma: float, n: int) -> Tuple[float, float]:
    """(E, R) of the physical branch for n = 1 and n = 2."""
    if n == 1:
        return gamma, 0.5 * math.sqrt(delta / gamma)
    if n == 2:
        r = 0.5 * math.sqrt(2.0 * (delta + 2.0) + (4.0 * delta + 6.0) / gamma)
        e = gamma * (delta + 1.0) / (gamma * (delta + 2.0) + 2.0 * delta + 3.0)
        return e, r
    raise InvalidInputError(f"closed forms exist for n = 1 and n = 2 only, got {n}")


def _wavefunction(solution: BetheSolution, r: complex) -> WavefunctionDescriptor:
    scale = 2.0 * r

    def to_z(u):
        return u / scale

    return WavefunctionDescriptor(
        coordinate="u",
        polynomial=solution.s_poly(),
        substitution=to_z,
        substitution_label=f"z = u / (2R), 2R = {complex(scale)}",
    )


def solve(
    params: TwoElectronParams,
    cfg: SolverConfig,
    stats: Optional[SolveStats] = None,
    include_discarded: bool = False,
) -> List[AppSolution]:
    spec = params.spec()
    found = []
    for solution in solve_all(spec, cfg, stats):
        r, energy = scale_and_energy(solution)
        keep = energy is not None and is_real_value(r) and r.real > 0 and is_real_value(energy)
        if not keep:
            logger.debug(f"{SYSTEM}: discarding roots {solution.roots} with R = {r}")
        found.append(
            AppSolution(
                system=SYSTEM,
                params={"delta": params.delta, "gamma": params.gamma, "R": real_part_if_real(r)},
                solution=solution,
                energy=real_part_if_real(energy) if energy is not None else None,
                units=UNITS,
                wavefunction=_wavefunction(solution, r if abs(r) > 0 else 1.0),
                branch={"status": "kept" if keep else "discarded"},
            )
        )
    kept = physical(found)
    logger.info(f"{SYSTEM}: n={params.n} delta={params.delta} gamma={params.gamma}: {len(kept)} physical of {len(found)}")
    if not kept:
        logger.warning(f"{SYSTEM}: no solution with R > 0 for n={params.n}; {len(found)} discarded")
    return found if include_discarded else kept


def physical(found: List[AppSolution]) -> List[AppSolution]:
    return [s for s in found if s.branch.get("status") == "kept"]

