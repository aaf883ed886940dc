"""Bethe systems where some ODE coefficients are unknowns fixed by extra constraints.

The unknown vector is [roots; parameters]. The residual stacks the cleared
Bethe equations (each row divided by the size of its terms at the current
point) on top of the constraint functions, and is driven to zero by damped
Gauss-Newton. Systems with more equations than unknowns are accepted only when
that least-squares residual actually reaches cert_tol.
"""
from dataclasses import dataclass, field
from functools import partial
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from loguru import logger

from qes.acceptance import coefficient_key, match_distance
from qes.bethe import (
    bae_jacobian,
    bae_residual_cleared,
    bae_row_scale,
    guard_violation,
    make_solution,
)
from qes.errors import InvalidInputError
from qes.models import AugmentedSolution, OdeSpec, SolveStats, SolverConfig, canonical_root_key
from qes.multistart import MultistartRunner
from qes.newton import IterationResult, gauss_newton, stationarity
from qes.poly import REAL_TOLERANCE, is_real_value
from qes.solver import draw_root_start, refine_roots, solve_all, start_geometry

Params = Dict[str, complex]
Constraint = Callable[[Params, np.ndarray, OdeSpec], complex]

FD_STEP = 1e-7
STATIONARITY_TOL = 1e-8
FREE_PERTURBATION = 1e-6
PARAM_MATCH_TOL = 1e-6


@dataclass(frozen=True)
class ParameterSpec:
    """An unknown coefficient with its start box and admissibility flags."""

    name: str
    low: float
    high: float
    imag_width: float = 0.0
    real: bool = True
    positive: bool = False
    nonnegative: bool = False
    starts: Tuple[complex, ...] = ()

    def __post_init__(self):
        if not self.low <= self.high:
            raise InvalidInputError(f"Start box for {self.name} is empty: [{self.low}, {self.high}]")

    def draw(self, rng: np.random.Generator) -> complex:
        re = self.low + (self.high - self.low) * rng.random()
        im = self.imag_width * (2.0 * rng.random() - 1.0)
        return complex(re, im)

    def admissible(self, value: complex) -> bool:
        if self.real and not is_real_value(value):
            return False
        if self.positive and not value.real > 0:
            return False
        if self.nonnegative and value.real < -REAL_TOLERANCE:
            return False
        return True


@dataclass(frozen=True)
class AugmentedSystem:
    params: Tuple[ParameterSpec, ...]
    spec_builder: Callable[[Params], OdeSpec]
    constraints: Tuple[Constraint, ...]
    n: int
    label: str = "augmented"
    root_guess: Optional[Callable[[Params], Sequence[complex]]] = None
    fixed: Params = field(default_factory=dict)

    def __post_init__(self):
        if self.n < 0:
            raise InvalidInputError(f"n must be nonnegative, got {self.n}")
        if len(self.constraints) < len(self.params):
            raise InvalidInputError(
                f"{self.label}: {len(self.constraints)} constraint(s) cannot pin {len(self.params)} parameter(s)"
            )
        names = self.param_names
        if len(set(names)) != len(names):
            raise InvalidInputError(f"{self.label}: duplicate parameter names {names}")

    @property
    def param_names(self) -> Tuple[str, ...]:
        return tuple(p.name for p in self.params)

    @property
    def size(self) -> int:
        return self.n + len(self.params)

    def unpack(self, x: np.ndarray) -> Tuple[np.ndarray, Params]:
        roots = np.asarray(x[: self.n], dtype=complex)
        params = dict(self.fixed)
        params.update({name: complex(v) for name, v in zip(self.param_names, x[self.n :])})
        return roots, params

    def pack(self, roots: Sequence[complex], params: Params) -> np.ndarray:
        values = list(np.asarray(roots, dtype=complex)) + [params[name] for name in self.param_names]
        return np.array(values, dtype=complex)

    def realize(self, params: Params) -> Optional[OdeSpec]:
        try:
            return self.spec_builder(params)
        except (InvalidInputError, ValueError, ZeroDivisionError) as e:
            logger.debug(f"{self.label}: parameters {params} give no valid spec ({e})")
            return None


def constraint_values(system: AugmentedSystem, roots: np.ndarray, params: Params, spec: OdeSpec) -> np.ndarray:
    return np.array([complex(c(params, roots, spec)) for c in system.constraints], dtype=complex)


def stacked_residual(system: AugmentedSystem, x: np.ndarray) -> np.ndarray:
    roots, params = system.unpack(x)
    spec = system.realize(params)
    rows = system.n + len(system.constraints)
    if spec is None:
        return np.full(rows, np.inf, dtype=complex)
    bae = bae_residual_cleared(spec, roots) / bae_row_scale(spec, roots)
    return np.concatenate([bae, constraint_values(system, roots, params, spec)])


def residual_measure(system: AugmentedSystem, x: np.ndarray) -> float:
    r = stacked_residual(system, x)
    return float(np.max(np.abs(r))) if r.size else 0.0


def stacked_jacobian(system: AugmentedSystem, x: np.ndarray) -> np.ndarray:
    """Analytic Bethe block in the roots; central differences everywhere else.

    Row scales are frozen at x, which is exact wherever the Bethe rows vanish.
    """
    n = system.n
    roots, params = system.unpack(x)
    spec = system.realize(params)
    rows = n + len(system.constraints)
    jac = np.zeros((rows, system.size), dtype=complex)
    if spec is None:
        return jac

    scale = bae_row_scale(spec, roots)
    if n:
        jac[:n, :n] = bae_jacobian(spec, roots) / scale[:, None]

    for k in range(system.size):
        h = FD_STEP * max(1.0, abs(x[k]))
        forward, backward = x.copy(), x.copy()
        forward[k] += h
        backward[k] -= h
        f_roots, f_params = system.unpack(forward)
        b_roots, b_params = system.unpack(backward)
        f_spec, b_spec = system.realize(f_params), system.realize(b_params)
        if f_spec is None or b_spec is None:
            continue
        f_con = constraint_values(system, f_roots, f_params, f_spec)
        b_con = constraint_values(system, b_roots, b_params, b_spec)
        jac[n:, k] = (f_con - b_con) / (2 * h)
        if k >= n and n:
            f_bae = bae_residual_cleared(f_spec, f_roots) / scale
            b_bae = bae_residual_cleared(b_spec, b_roots) / scale
            jac[:n, k] = (f_bae - b_bae) / (2 * h)
    return jac


def _admissible(system: AugmentedSystem, cfg: SolverConfig, x: np.ndarray) -> bool:
    roots, params = system.unpack(x)
    spec = system.realize(params)
    return spec is not None and guard_violation(spec, roots, cfg) is None


def gauss_newton_from(system: AugmentedSystem, cfg: SolverConfig, start: np.ndarray) -> IterationResult:
    return gauss_newton(
        residual=partial(stacked_residual, system),
        jacobian=partial(stacked_jacobian, system),
        x0=start,
        tol=cfg.newton_tol,
        max_iters=cfg.max_iters,
        damping=cfg.damping,
        measure=lambda x, r: float(np.max(np.abs(r))) if r.size else 0.0,
        admissible=partial(_admissible, system, cfg),
    )


def generate_augmented_starts(system: AugmentedSystem, cfg: SolverConfig) -> List[np.ndarray]:
    """Fixed parameter starts first (with the system's root guess when given), then box draws."""
    rng = np.random.default_rng(cfg.seed)
    fixed_count = max((len(p.starts) for p in system.params), default=0)

    starts = []
    for slot in range(cfg.restarts):
        drawn = {p.name: p.draw(rng) for p in system.params}
        if slot < fixed_count:
            params = {p.name: (p.starts[slot % len(p.starts)] if p.starts else drawn[p.name]) for p in system.params}
        else:
            params = drawn
        params_full = dict(system.fixed, **params)

        spec = system.realize(params_full)
        geometry = start_geometry(spec) if spec is not None else (0j, 1.0, np.zeros(0, dtype=complex))
        roots = draw_root_start(system.n, geometry, rng, slot)
        if slot < fixed_count and system.root_guess is not None:
            roots = np.asarray(system.root_guess(params_full), dtype=complex)
        starts.append(system.pack(roots, params))
    return starts


class AugmentedFilter:
    def __init__(self, system: AugmentedSystem, cfg: SolverConfig, stats: SolveStats):
        self.system = system
        self.cfg = cfg
        self.stats = stats
        self._accepted: List[AugmentedSolution] = []

    def process(self, result: IterationResult) -> Optional[AugmentedSolution]:
        system, cfg = self.system, self.cfg
        r = stacked_residual(system, result.x)
        residual = float(np.max(np.abs(r))) if r.size else 0.0
        if not np.isfinite(residual) or residual > cfg.cert_tol:
            self.stats.increment("diverged")
            return None

        roots, params = system.unpack(result.x)
        spec = system.realize(params)
        jac = stacked_jacobian(system, result.x)
        gradient_norm = stationarity(jac, r)
        if gradient_norm > STATIONARITY_TOL * (1.0 + float(np.linalg.norm(r))):
            self.stats.increment("diverged")
            return None
        self.stats.increment("converged")

        violation = guard_violation(spec, roots, cfg)
        if violation is not None:
            self.stats.increment(f"rejected_{violation}")
            return None

        solution = make_solution(spec, roots, cfg)
        if not solution.certified:
            self.stats.increment("rejected_certification")
            return None

        if not all(p.admissible(params[p.name]) for p in system.params):
            self.stats.increment("rejected_reality")
            logger.debug(f"{system.label}: discarded inadmissible parameters {params}")
            return None

        constraint_residual = float(np.max(np.abs(r[system.n :]))) if r.size > system.n else 0.0
        candidate = AugmentedSolution(
            params=params,
            solution=solution,
            constraint_residual=constraint_residual,
            spec=spec,
            stationarity=gradient_norm,
        )
        if any(self._same(candidate, other) for other in self._accepted):
            self.stats.increment("duplicates")
            return None

        self._accepted.append(candidate)
        self.stats.increment("accepted")
        return candidate

    def _same(self, first: AugmentedSolution, second: AugmentedSolution) -> bool:
        if match_distance(first.roots, second.roots) >= 10.0 * self.cfg.sep_tol:
            return False
        return all(
            abs(first.params[name] - second.params[name]) <= PARAM_MATCH_TOL * (1.0 + abs(second.params[name]))
            for name in self.system.param_names
        )

    def solutions(self) -> List[AugmentedSolution]:
        names = self.system.param_names

        def key(sol: AugmentedSolution):
            return (
                tuple(coefficient_key(sol.params[name]) for name in names),
                coefficient_key(sol.solution.c0),
                coefficient_key(sol.solution.c1),
                coefficient_key(sol.solution.c2),
                tuple(canonical_root_key(z) for z in sol.roots),
            )

        return sorted(self._accepted, key=key)


def solve_augmented(
    system: AugmentedSystem, cfg: SolverConfig, stats: Optional[SolveStats] = None
) -> List[AugmentedSolution]:
    stats = stats if stats is not None else SolveStats()

    if not system.params and not system.constraints:
        spec = system.realize(dict(system.fixed))
        if spec is None:
            raise InvalidInputError(f"{system.label}: fixed parameters give no valid spec")
        return [
            AugmentedSolution(params=dict(system.fixed), solution=sol, constraint_residual=0.0, spec=spec)
            for sol in solve_all(spec, cfg, stats)
        ]

    starts = generate_augmented_starts(system, cfg)
    stats.increment("starts", len(starts))
    runner = MultistartRunner(partial(gauss_newton_from, system, cfg), threads=cfg.threads, label=system.label)
    results = runner.run(starts)

    augmented_filter = AugmentedFilter(system, cfg, stats)
    for result in results:
        augmented_filter.process(result)

    solutions = augmented_filter.solutions()
    runner.print_summary(stats)
    if not solutions:
        logger.warning(f"{system.label}: no certified solution after {len(starts)} starts")
    return solutions


def free_parameter_detect(
    system: AugmentedSystem, sol: AugmentedSolution, cfg: Optional[SolverConfig] = None
) -> List[str]:
    """Parameters that can move by +-1e-6 while roots and constraints stay solved."""
    cfg = cfg or SolverConfig()
    free = []
    for name in system.param_names:
        if all(_survives(system, sol, cfg, name, sign) for sign in (1.0, -1.0)):
            free.append(name)
    return free


def _survives(system: AugmentedSystem, sol: AugmentedSolution, cfg: SolverConfig, name: str, sign: float) -> bool:
    params = dict(sol.params)
    params[name] = params[name] + sign * FREE_PERTURBATION
    spec = system.realize(params)
    if spec is None:
        return False
    refined = refine_roots(spec, sol.roots, cfg)
    if refined is None:
        return False
    x = system.pack(refined.roots, params)
    return residual_measure(system, x) <= cfg.cert_tol
