"""Multistart damped Newton over the cleared Bethe ansatz equations."""
from functools import partial
from typing import List, Optional, Tuple

import numpy as np
from loguru import logger

from qes.acceptance import SolutionFilter
from qes.bethe import (
    as_root_array,
    bae_jacobian,
    bae_residual_cleared,
    bae_residual_norm,
    guard_violation,
    make_solution,
)
from qes.models import BetheSolution, OdeSpec, SolveStats, SolverConfig
from qes.multistart import MultistartRunner
from qes.newton import IterationResult, damped_newton

ANCHOR_SPREAD = 0.1


def start_anchors(spec: OdeSpec) -> np.ndarray:
    x_roots = spec.X.roots()
    midpoints = [
        0.5 * (x_roots[i] + x_roots[j])
        for i in range(len(x_roots))
        for j in range(i + 1, len(x_roots))
    ]
    return np.concatenate([x_roots, np.array(midpoints, dtype=complex), spec.Y.roots()])


def start_geometry(spec: OdeSpec) -> Tuple[complex, float, np.ndarray]:
    """Centre and reach of the pole set, plus the anchor points for perturbed starts."""
    x_roots = spec.X.roots()
    centre = complex(x_roots.mean()) if x_roots.size else 0j
    reach = 1.0 + (float(np.abs(x_roots).max()) if x_roots.size else 0.0)
    return centre, reach, start_anchors(spec)


def draw_root_start(n: int, geometry, rng: np.random.Generator, slot: int) -> np.ndarray:
    centre, reach, anchors = geometry
    if slot % 2 == 0 or anchors.size == 0:
        radii = 2.0 * reach * np.sqrt(rng.random(n))
        angles = 2.0 * np.pi * rng.random(n)
        return centre + radii * np.exp(1j * angles)
    base = anchors[rng.integers(anchors.size, size=n)]
    noise = rng.normal(size=n) + 1j * rng.normal(size=n)
    return base + ANCHOR_SPREAD * reach * noise


def generate_starts(spec: OdeSpec, cfg: SolverConfig) -> List[np.ndarray]:
    """Seed-ordered start vectors; even slots sample a disk, odd slots perturb anchors.

    Each start consumes a fixed number of draws, so the first k starts do not
    depend on the total budget.
    """
    rng = np.random.default_rng(cfg.seed)
    geometry = start_geometry(spec)
    return [draw_root_start(spec.n, geometry, rng, k) for k in range(cfg.restarts)]


def newton_from(spec: OdeSpec, cfg: SolverConfig, start: np.ndarray) -> IterationResult:
    return damped_newton(
        residual=partial(bae_residual_cleared, spec),
        jacobian=partial(bae_jacobian, spec),
        x0=start,
        tol=cfg.newton_tol,
        max_iters=cfg.max_iters,
        damping=cfg.damping,
        measure=lambda z, _: bae_residual_norm(spec, z),
        admissible=lambda z: guard_violation(spec, z, cfg) is None,
    )


def refine_roots(spec: OdeSpec, roots, cfg: SolverConfig) -> Optional[BetheSolution]:
    """Polish a nearby root configuration; None unless the result certifies."""
    start = as_root_array(roots)
    if spec.n == 0:
        solution = make_solution(spec, start, cfg)
        return solution if solution.certified else None
    result = newton_from(spec, cfg, start)
    if result.residual > cfg.cert_tol:
        return None
    solution = make_solution(spec, result.x, cfg)
    return solution if solution.certified else None


def solve_all(spec: OdeSpec, cfg: SolverConfig, stats: Optional[SolveStats] = None) -> List[BetheSolution]:
    stats = stats if stats is not None else SolveStats()
    if spec.x_has_multiple_roots():
        logger.warning(f"X has multiple roots (a={spec.a}); the solver proceeds without pole-form guarantees")

    if spec.n == 0:
        stats.increment("starts")
        solution = make_solution(spec, (), cfg)
        if solution.certified:
            stats.increment("accepted")
            return [solution]
        stats.increment("rejected_certification")
        return []

    starts = generate_starts(spec, cfg)
    stats.increment("starts", len(starts))
    runner = MultistartRunner(partial(newton_from, spec, cfg), threads=cfg.threads, label=f"bethe n={spec.n}")
    results = runner.run(starts)

    solution_filter = SolutionFilter(spec, cfg, stats)
    for result in results:
        solution_filter.process(result.x, result.residual)

    solutions = solution_filter.solutions()
    runner.print_summary(stats)
    if not solutions:
        logger.warning(f"No certified solution found for n={spec.n} after {len(starts)} starts")
    return solutions
