from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Optional, Sequence, Tuple

import numpy as np

from qes.bethe import coeff_c0, coeff_c1, coeff_c2
from qes.models import BetheSolution, OdeSpec
from qes.poly import ComplexPoly, is_real_value

Grid = Callable[[np.ndarray], np.ndarray]


def identity(x: np.ndarray) -> np.ndarray:
    return x


@dataclass(frozen=True)
class WavefunctionDescriptor:
    """x**power * exp(exponent(x)) * envelope(x) * S(z(x))."""

    coordinate: str
    polynomial: ComplexPoly
    power: complex = 0
    exponent: ComplexPoly = field(default_factory=ComplexPoly)
    substitution: Grid = identity
    substitution_label: str = ""
    envelope: Optional[Grid] = None
    envelope_label: str = ""

    def evaluate(self, grid) -> np.ndarray:
        x = np.asarray(grid, dtype=complex)
        values = self.polynomial.eval(self.substitution(x)) * np.exp(self.exponent.eval(x))
        if self.power != 0:
            values = values * np.power(x, self.power)
        if self.envelope is not None:
            values = values * self.envelope(x)
        return values

    def describe(self) -> Dict[str, Any]:
        return {
            "coordinate": self.coordinate,
            "power": complex(self.power),
            "exponent": self.exponent.coeffs.tolist(),
            "substitution": self.substitution_label or f"z = {self.coordinate}",
            "envelope": self.envelope_label,
            "polynomial": self.polynomial.coeffs.tolist(),
        }


@dataclass
class AppSolution:
    system: str
    params: Dict[str, complex]
    solution: BetheSolution
    energy: Optional[complex]
    units: str
    wavefunction: WavefunctionDescriptor
    constraint_residual: float = 0.0
    branch: Dict[str, str] = field(default_factory=dict)
    tags: Dict[str, Any] = field(default_factory=dict)

    @property
    def roots(self) -> Tuple[complex, ...]:
        return self.solution.roots

    def param(self, name: str) -> complex:
        return self.params[name]


def realized_coefficients(spec: OdeSpec, roots: Sequence[complex]) -> Tuple[complex, complex, complex]:
    return coeff_c2(spec), coeff_c1(spec, roots), coeff_c0(spec, roots)


def identification(target: Callable[[Dict[str, complex]], Tuple[complex, complex, complex]], index: int):
    """Constraint c_k(realized spec, roots) - target_k(params); index 0, 1, 2 for c2, c1, c0."""

    def constraint(params: Dict[str, complex], roots: np.ndarray, spec: OdeSpec) -> complex:
        return realized_coefficients(spec, roots)[index] - target(params)[index]

    return constraint


def real_part_if_real(value: complex) -> complex:
    return complex(value.real, 0.0) if is_real_value(value) else value
