"""Damped Newton and Gauss-Newton iterations on complex residual vectors.

Residuals are assumed holomorphic in the unknowns, so the complex Jacobian is
used directly and the descent direction of 0.5*||r||^2 is Re(J^H r).
"""
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

Vector = np.ndarray
ResidualFn = Callable[[Vector], Vector]
JacobianFn = Callable[[Vector], np.ndarray]
MeasureFn = Callable[[Vector, Vector], float]
GuardFn = Callable[[Vector], bool]

ARMIJO_C = 1e-4
MIN_STEP = 1e-10
DIVERGENCE_BOUND = 1e8


@dataclass
class IterationResult:
    x: Vector
    residual: float
    iterations: int
    status: str
    gradient_norm: float = float("nan")

    @property
    def converged(self) -> bool:
        return self.status == "converged"


def _max_abs(_: Vector, r: Vector) -> float:
    return float(np.max(np.abs(r))) if r.size else 0.0


def _newton_step(jac: np.ndarray, f: Vector) -> Vector:
    try:
        return np.linalg.solve(jac, -f)
    except np.linalg.LinAlgError:
        return np.linalg.lstsq(jac, -f, rcond=None)[0]


def damped_newton(
    residual: ResidualFn,
    jacobian: JacobianFn,
    x0: Vector,
    *,
    tol: float,
    max_iters: int,
    damping: float,
    measure: MeasureFn = _max_abs,
    admissible: Optional[GuardFn] = None,
) -> IterationResult:
    x = np.array(x0, dtype=complex)
    f = residual(x)
    norm = np.linalg.norm(f)

    for iteration in range(max_iters):
        error = measure(x, f)
        if error <= tol:
            return IterationResult(x, error, iteration, "converged")

        step = _newton_step(jacobian(x), f)
        if not np.all(np.isfinite(step)):
            return IterationResult(x, error, iteration, "singular")

        t = 1.0
        while True:
            candidate = x + t * step
            if admissible is None or admissible(candidate):
                f_candidate = residual(candidate)
                norm_candidate = np.linalg.norm(f_candidate)
                if np.isfinite(norm_candidate) and norm_candidate <= (1.0 - ARMIJO_C * t) * norm:
                    break
            t *= damping
            if t < MIN_STEP:
                return IterationResult(x, error, iteration, "stalled")

        x, f, norm = candidate, f_candidate, norm_candidate
        if np.max(np.abs(x), initial=0.0) > DIVERGENCE_BOUND:
            return IterationResult(x, measure(x, f), iteration + 1, "diverged")

    error = measure(x, f)
    return IterationResult(x, error, max_iters, "converged" if error <= tol else "max_iters")


def stationarity(jac: np.ndarray, r: Vector) -> float:
    """Norm of the least-squares gradient J^H r."""
    return float(np.linalg.norm(jac.conj().T @ r))


def gauss_newton(
    residual: ResidualFn,
    jacobian: JacobianFn,
    x0: Vector,
    *,
    tol: float,
    max_iters: int,
    damping: float,
    measure: MeasureFn = _max_abs,
    admissible: Optional[GuardFn] = None,
    stationarity_tol: float = 1e-14,
) -> IterationResult:
    """Least-squares Newton with Armijo backtracking on 0.5*||r||^2.

    Stops when the measure drops below ``tol`` or the gradient J^H r vanishes
    relative to (1 + ||r||); the latter is reported as ``stationary`` so callers
    can tell an inconsistent over-determined system from a solved one.
    """
    x = np.array(x0, dtype=complex)
    r = residual(x)
    cost = 0.5 * float(np.vdot(r, r).real)
    gradient_norm = float("nan")

    for iteration in range(max_iters):
        jac = jacobian(x)
        gradient = jac.conj().T @ r
        gradient_norm = float(np.linalg.norm(gradient))
        error = measure(x, r)
        if error <= tol:
            return IterationResult(x, error, iteration, "converged", gradient_norm)
        if gradient_norm <= stationarity_tol * (1.0 + np.linalg.norm(r)):
            return IterationResult(x, error, iteration, "stationary", gradient_norm)

        step = np.linalg.lstsq(jac, -r, rcond=None)[0]
        if not np.all(np.isfinite(step)):
            return IterationResult(x, error, iteration, "singular", gradient_norm)
        slope = float(np.vdot(gradient, step).real)

        t = 1.0
        while True:
            candidate = x + t * step
            if admissible is None or admissible(candidate):
                r_candidate = residual(candidate)
                cost_candidate = 0.5 * float(np.vdot(r_candidate, r_candidate).real)
                if np.isfinite(cost_candidate) and cost_candidate <= cost + ARMIJO_C * t * slope:
                    break
            t *= damping
            if t < MIN_STEP:
                return IterationResult(x, error, iteration, "stalled", gradient_norm)

        x, r, cost = candidate, r_candidate, cost_candidate
        if np.max(np.abs(x), initial=0.0) > DIVERGENCE_BOUND:
            return IterationResult(x, measure(x, r), iteration + 1, "diverged", gradient_norm)

    gradient_norm = stationarity(jacobian(x), r)
    error = measure(x, r)
    return IterationResult(x, error, max_iters, "converged" if error <= tol else "max_iters", gradient_norm)
