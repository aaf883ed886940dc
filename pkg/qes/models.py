import math
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Any, Dict, List, Sequence, Tuple

import numpy as np

from config import settings
from qes.errors import InvalidInputError
from qes.poly import ComplexPoly, is_real_value


def _complex_tuple(values: Sequence, length: int, name: str) -> Tuple[complex, ...]:
    try:
        converted = tuple(complex(v) for v in values)
    except (TypeError, ValueError) as e:
        raise InvalidInputError(f"{name} must contain numbers: {e}") from e
    if len(converted) != length:
        raise InvalidInputError(f"{name} must have {length} entries, got {len(converted)}")
    if not all(np.isfinite(v) for v in converted):
        raise InvalidInputError(f"{name} contains non-finite values: {converted}")
    return converted


def canonical_root_key(z: complex) -> Tuple[float, float]:
    return (round(z.real, 9), round(z.imag, 9))


@dataclass(frozen=True)
class SolverConfig:
    newton_tol: float = 1e-12
    cert_tol: float = 1e-9
    sep_tol: float = 1e-8
    pole_tol: float = 1e-10
    max_iters: int = 200
    restarts: int = 500
    seed: int = 0
    damping: float = 0.5
    threads: int = 1

    def __post_init__(self):
        for name in ("newton_tol", "cert_tol", "sep_tol", "pole_tol"):
            if not getattr(self, name) > 0:
                raise InvalidInputError(f"{name} must be positive, got {getattr(self, name)}")
        if self.restarts < 1:
            raise InvalidInputError(f"restarts must be at least 1, got {self.restarts}")
        if self.max_iters < 1:
            raise InvalidInputError(f"max_iters must be at least 1, got {self.max_iters}")
        if not 0 < self.damping < 1:
            raise InvalidInputError(f"damping must lie in (0, 1), got {self.damping}")
        if not 0 <= self.seed < 2**64:
            raise InvalidInputError(f"seed must be a 64-bit unsigned integer, got {self.seed}")

    @classmethod
    def from_settings(cls, **overrides) -> "SolverConfig":
        values = {
            "newton_tol": settings.newton_tol,
            "cert_tol": settings.cert_tol,
            "sep_tol": settings.sep_tol,
            "pole_tol": settings.pole_tol,
            "max_iters": settings.max_iters,
            "restarts": settings.restarts,
            "seed": settings.default_seed,
            "damping": settings.damping,
            "threads": max(1, settings.QES_THREADS or 1),
        }
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)

    def with_overrides(self, **overrides) -> "SolverConfig":
        return replace(self, **{k: v for k, v in overrides.items() if v is not None})


@dataclass(frozen=True)
class OdeSpec:
    """X S'' + Y S' + Z S = 0 with X = sum a_k z^k (k <= 4) and Y = sum b_k z^k (k <= 3)."""

    a: Tuple[complex, ...]
    b: Tuple[complex, ...]
    n: int

    def __post_init__(self):
        object.__setattr__(self, "a", _complex_tuple(self.a, 5, "a"))
        object.__setattr__(self, "b", _complex_tuple(self.b, 4, "b"))
        if isinstance(self.n, bool) or int(self.n) != self.n or self.n < 0:
            raise InvalidInputError(f"n must be a nonnegative integer, got {self.n!r}")
        object.__setattr__(self, "n", int(self.n))
        if not any(self.a):
            raise InvalidInputError("X must not be the zero polynomial")

    @classmethod
    def from_polys(cls, x: ComplexPoly, y: ComplexPoly, n: int) -> "OdeSpec":
        if x.degree > 4 or y.degree > 3:
            raise InvalidInputError(f"deg X <= 4 and deg Y <= 3 required, got {x.degree} and {y.degree}")
        a = [x.coeff(k) for k in range(5)]
        b = [y.coeff(k) for k in range(4)]
        return cls(a=tuple(a), b=tuple(b), n=n)

    @cached_property
    def X(self) -> ComplexPoly:
        return ComplexPoly(self.a)

    @cached_property
    def Y(self) -> ComplexPoly:
        return ComplexPoly(self.b)

    @property
    def x_scale(self) -> float:
        return max(abs(v) for v in self.a)

    @property
    def coefficient_scale(self) -> float:
        return max(abs(v) for v in self.a + self.b)

    def x_has_multiple_roots(self, tol: float = 1e-8) -> bool:
        roots = self.X.roots()
        for i in range(len(roots)):
            for j in range(i + 1, len(roots)):
                if abs(roots[i] - roots[j]) < tol * max(1.0, abs(roots[i])):
                    return True
        return False


@dataclass(frozen=True)
class RootConfig:
    roots: Tuple[complex, ...] = ()

    def __post_init__(self):
        values = tuple(sorted((complex(z) for z in self.roots), key=canonical_root_key))
        if not all(math.isfinite(z.real) and math.isfinite(z.imag) for z in values):
            raise InvalidInputError(f"Roots must be finite, got {values}")
        object.__setattr__(self, "roots", values)

    @property
    def n(self) -> int:
        return len(self.roots)

    def as_array(self) -> np.ndarray:
        return np.array(self.roots, dtype=complex)

    def polynomial(self) -> ComplexPoly:
        return ComplexPoly.from_roots(self.roots)

    def real_flags(self) -> List[bool]:
        return [is_real_value(z, settings.real_tolerance) for z in self.roots]


@dataclass(frozen=True)
class BetheSolution:
    config: RootConfig
    c2: complex
    c1: complex
    c0: complex
    bae_residual: float
    ode_residual: float
    certified: bool = False

    @property
    def roots(self) -> Tuple[complex, ...]:
        return self.config.roots

    @property
    def coefficients(self) -> Tuple[complex, complex, complex]:
        return (self.c2, self.c1, self.c0)

    def z_poly(self) -> ComplexPoly:
        return ComplexPoly([self.c0, self.c1, self.c2])

    def s_poly(self) -> ComplexPoly:
        return self.config.polynomial()


@dataclass(frozen=True)
class AugmentedSolution:
    params: Dict[str, complex]
    solution: BetheSolution
    constraint_residual: float
    spec: OdeSpec
    stationarity: float = 0.0
    free_params: Tuple[str, ...] = ()
    tags: Dict[str, Any] = field(default_factory=dict)

    @property
    def roots(self) -> Tuple[complex, ...]:
        return self.solution.roots

    def param(self, name: str) -> complex:
        return self.params[name]


@dataclass
class SolveStats:
    starts: int = 0
    converged: int = 0
    diverged: int = 0
    rejected_separation: int = 0
    rejected_pole: int = 0
    rejected_certification: int = 0
    rejected_reality: int = 0
    duplicates: int = 0
    accepted: int = 0

    def increment(self, name: str, amount: int = 1):
        if hasattr(self, name):
            setattr(self, name, getattr(self, name) + amount)

    def to_dict(self) -> Dict[str, int]:
        return dict(self.__dict__)


@dataclass
class CountTrial:
    spec: OdeSpec
    found: int
    restarts_used: int
    residuals: List[Tuple[float, float]] = field(default_factory=list)


@dataclass
class CountReport:
    family: str
    n: int
    deg_x: int
    expected: int
    trials: List[CountTrial] = field(default_factory=list)

    @property
    def found(self) -> List[int]:
        return [trial.found for trial in self.trials]

    @property
    def complete(self) -> bool:
        return bool(self.trials) and all(trial.found == self.expected for trial in self.trials)

    @property
    def restarts_used(self) -> int:
        return max((trial.restarts_used for trial in self.trials), default=0)
