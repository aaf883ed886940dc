"""Heine-Stieltjes counting experiment.

For algebraically independent X, Y there are exactly binom(n + deg X - 2, n)
Van Vleck polynomials; under b3 = -2(n-1) a4 there are n + 1. run_count draws
generic specs and enumerates them with an escalating restart budget.
"""
from math import comb
from typing import Optional

import numpy as np
from loguru import logger

from qes.errors import InvalidInputError
from qes.models import CountReport, CountTrial, OdeSpec, SolveStats, SolverConfig
from qes.solver import solve_all

FAMILIES = {"heun": 3, "gheun1": 4, "dependent": 4}
NEAR_MISS = 1e-3
MIN_POLE_GAP = 0.2


def expected_count(family: str, n: int) -> int:
    if family == "dependent":
        return n + 1
    return comb(n + FAMILIES[family] - 2, n)


def _complex_normal(rng: np.random.Generator, size: int) -> np.ndarray:
    return rng.normal(size=size) + 1j * rng.normal(size=size)


def dependence_gap(spec: OdeSpec) -> float:
    return abs(2 * (spec.n - 1) * spec.a[4] + spec.b[3])


def random_spec(family: str, n: int, rng: np.random.Generator, max_draws: int = 1000) -> OdeSpec:
    """A generic spec of the family: simple, well-separated zeros of X and no near-miss of dependence."""
    if family not in FAMILIES:
        raise InvalidInputError(f"Unknown family {family!r}; expected one of {sorted(FAMILIES)}")
    deg_x = FAMILIES[family]

    for _ in range(max_draws):
        a = np.zeros(5, dtype=complex)
        b = np.zeros(4, dtype=complex)
        a[: deg_x + 1] = _complex_normal(rng, deg_x + 1)
        a[deg_x] = 1.0
        b[:deg_x] = _complex_normal(rng, deg_x)
        if family == "dependent":
            b[3] = -2 * (n - 1) * a[4]

        spec = OdeSpec(a=tuple(a), b=tuple(b), n=n)
        roots = spec.X.roots()
        gaps = [abs(roots[i] - roots[j]) for i in range(len(roots)) for j in range(i + 1, len(roots))]
        if gaps and min(gaps) < MIN_POLE_GAP:
            continue
        if family == "gheun1" and dependence_gap(spec) <= NEAR_MISS * spec.coefficient_scale:
            logger.debug(f"Redrawing near-dependent spec (gap {dependence_gap(spec):.2e})")
            continue
        return spec
    raise InvalidInputError(f"Could not draw a generic {family} spec in {max_draws} attempts")


def count_one(spec: OdeSpec, expected: int, cfg: SolverConfig, max_rounds: int = 4) -> CountTrial:
    """Escalate restarts (x2 per round) until the expected number of solutions appears."""
    restarts = cfg.restarts
    solutions = []
    for round_index in range(max_rounds):
        solutions = solve_all(spec, cfg.with_overrides(restarts=restarts), SolveStats())
        logger.debug(f"round {round_index + 1}: {len(solutions)}/{expected} with {restarts} restarts")
        if len(solutions) >= expected or round_index == max_rounds - 1:
            break
        restarts *= 2
    return CountTrial(
        spec=spec,
        found=len(solutions),
        restarts_used=restarts,
        residuals=[(s.bae_residual, s.ode_residual) for s in solutions],
    )


def run_count(
    family: str, n: int, trials: int, cfg: SolverConfig, max_rounds: int = 4, seed: Optional[int] = None
) -> CountReport:
    if n < 1:
        raise InvalidInputError(f"Counting needs n >= 1, got {n}")
    expected = expected_count(family, n) if family in FAMILIES else None
    if expected is None:
        raise InvalidInputError(f"Unknown family {family!r}; expected one of {sorted(FAMILIES)}")

    report = CountReport(family=family, n=n, deg_x=FAMILIES[family], expected=expected)
    base_seed = cfg.seed if seed is None else seed
    for trial in range(trials):
        rng = np.random.default_rng([base_seed, n, trial])
        spec = random_spec(family, n, rng)
        result = count_one(spec, expected, cfg, max_rounds)
        report.trials.append(result)
        if result.found != expected:
            logger.warning(f"{family} n={n} trial {trial}: found {result.found}, expected {expected}")

    logger.info(f"{family} n={n}: found {report.found} (expected {expected}) in {trials} trial(s)")
    return report
