from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
from loguru import logger

from qes.bethe import as_root_array, guard_violation, make_solution
from qes.models import BetheSolution, OdeSpec, SolveStats, SolverConfig, canonical_root_key

DUPLICATE_FACTOR = 10.0


@dataclass
class FilterResult:
    accepted: bool
    solution: Optional[BetheSolution] = None
    rejection_reason: Optional[str] = None


def match_distance(first: Sequence[complex], second: Sequence[complex]) -> float:
    """Largest distance in a greedy nearest-neighbour matching of two root sets."""
    a = as_root_array(first)
    b = list(as_root_array(second))
    if a.size != len(b):
        return np.inf
    worst = 0.0
    for z in a:
        distances = [abs(z - w) for w in b]
        k = int(np.argmin(distances))
        worst = max(worst, distances[k])
        b.pop(k)
    return worst


def coefficient_key(c: complex) -> Tuple[float, float]:
    return canonical_root_key(complex(c))


def solution_sort_key(sol: BetheSolution):
    return (
        coefficient_key(sol.c0),
        coefficient_key(sol.c1),
        coefficient_key(sol.c2),
        tuple(canonical_root_key(z) for z in sol.roots),
    )


def canonical_order(solutions: Sequence[BetheSolution]) -> List[BetheSolution]:
    return sorted(solutions, key=solution_sort_key)


class SolutionFilter:
    """Accepts converged root vectors one at a time, in start order.

    A candidate is rejected when Newton did not reach cert_tol, when it breaks
    the separation or pole guard, when it fails certification, or when it
    matches an already accepted solution.
    """

    def __init__(self, spec: OdeSpec, cfg: SolverConfig, stats: Optional[SolveStats] = None):
        self.spec = spec
        self.cfg = cfg
        self.stats = stats if stats is not None else SolveStats()
        self.duplicate_radius = DUPLICATE_FACTOR * cfg.sep_tol
        self._accepted: List[BetheSolution] = []

    def process(self, roots: np.ndarray, residual: float) -> FilterResult:
        if not np.isfinite(residual) or residual > self.cfg.cert_tol:
            self.stats.increment("diverged")
            return FilterResult(accepted=False, rejection_reason="diverged")
        self.stats.increment("converged")

        violation = guard_violation(self.spec, roots, self.cfg)
        if violation is not None:
            self.stats.increment(f"rejected_{violation}")
            return FilterResult(accepted=False, rejection_reason=violation)

        solution = make_solution(self.spec, roots, self.cfg)
        if not solution.certified:
            self.stats.increment("rejected_certification")
            logger.debug(
                f"Certification failed: bae={solution.bae_residual:.2e} ode={solution.ode_residual:.2e}"
            )
            return FilterResult(accepted=False, solution=solution, rejection_reason="certification")

        if self.is_duplicate(solution):
            self.stats.increment("duplicates")
            return FilterResult(accepted=False, solution=solution, rejection_reason="duplicate")

        self._accepted.append(solution)
        self.stats.increment("accepted")
        return FilterResult(accepted=True, solution=solution)

    def is_duplicate(self, solution: BetheSolution) -> bool:
        return any(
            match_distance(solution.roots, other.roots) < self.duplicate_radius
            for other in self._accepted
        )

    def solutions(self) -> List[BetheSolution]:
        return canonical_order(self._accepted)
