"""Dense univariate polynomials with complex coefficients.

Coefficients are stored in ascending order (index k is the coefficient of z^k)
in a read-only numpy array, so instances can be shared freely between threads.
"""
from typing import Iterable, List, Sequence, Tuple, Union

import numpy as np
from numpy.polynomial import polynomial as npoly

from qes.errors import InvalidInputError

Scalar = Union[complex, float, int]

ZERO_THRESHOLD = 1e-14
REAL_TOLERANCE = 1e-9


def is_real_value(value: Scalar, tol: float = REAL_TOLERANCE) -> bool:
    value = complex(value)
    return abs(value.imag) <= tol * (1.0 + abs(value.real))


def _normalize(values: np.ndarray) -> np.ndarray:
    if values.size == 0:
        return values
    magnitudes = np.abs(values)
    cutoff = ZERO_THRESHOLD * magnitudes.max()
    kept = np.nonzero(magnitudes > cutoff)[0]
    if kept.size == 0:
        return values[:0]
    return values[: kept[-1] + 1]


class ComplexPoly:
    __slots__ = ("_coeffs",)

    def __init__(self, coeffs: Iterable[Scalar] = ()):
        values = np.array(list(coeffs), dtype=complex).reshape(-1)
        if not np.all(np.isfinite(values)):
            raise InvalidInputError(f"Polynomial coefficients must be finite, got {values!r}")
        values = _normalize(values).copy()
        values.setflags(write=False)
        self._coeffs = values

    @classmethod
    def constant(cls, value: Scalar) -> "ComplexPoly":
        return cls([value])

    @classmethod
    def monomial(cls, power: int, value: Scalar = 1.0) -> "ComplexPoly":
        if power < 0:
            raise InvalidInputError(f"Monomial power must be nonnegative, got {power}")
        coeffs = np.zeros(power + 1, dtype=complex)
        coeffs[power] = value
        return cls(coeffs)

    @classmethod
    def from_roots(cls, roots: Sequence[Scalar]) -> "ComplexPoly":
        coeffs = np.ones(1, dtype=complex)
        for root in roots:
            coeffs = np.convolve(coeffs, np.array([-complex(root), 1.0], dtype=complex))
        return cls(coeffs)

    @property
    def coeffs(self) -> np.ndarray:
        return self._coeffs

    @property
    def degree(self) -> int:
        return self._coeffs.size - 1

    @property
    def is_zero(self) -> bool:
        return self._coeffs.size == 0

    @property
    def max_abs_coeff(self) -> float:
        return float(np.abs(self._coeffs).max()) if self._coeffs.size else 0.0

    def coeff(self, power: int) -> complex:
        if 0 <= power < self._coeffs.size:
            return complex(self._coeffs[power])
        return 0j

    def eval(self, z):
        if np.ndim(z):
            points = np.asarray(z, dtype=complex)
            if self.is_zero:
                return np.zeros_like(points)
            return npoly.polyval(points, self._coeffs)

        acc = 0j
        for c in self._coeffs[::-1]:
            acc = acc * z + c
        return complex(acc)

    __call__ = eval

    def derivative(self, order: int = 1) -> "ComplexPoly":
        coeffs = self._coeffs
        for _ in range(order):
            if coeffs.size <= 1:
                return ComplexPoly()
            coeffs = coeffs[1:] * np.arange(1, coeffs.size)
        return ComplexPoly(coeffs)

    def scale(self, factor: Scalar) -> "ComplexPoly":
        return ComplexPoly(self._coeffs * complex(factor))

    def __add__(self, other) -> "ComplexPoly":
        other = _coerce(other)
        size = max(self._coeffs.size, other._coeffs.size)
        total = np.zeros(size, dtype=complex)
        total[: self._coeffs.size] += self._coeffs
        total[: other._coeffs.size] += other._coeffs
        return ComplexPoly(total)

    __radd__ = __add__

    def __neg__(self) -> "ComplexPoly":
        return ComplexPoly(-self._coeffs)

    def __sub__(self, other) -> "ComplexPoly":
        return self + (-_coerce(other))

    def __rsub__(self, other) -> "ComplexPoly":
        return _coerce(other) + (-self)

    def __mul__(self, other) -> "ComplexPoly":
        if isinstance(other, ComplexPoly):
            if self.is_zero or other.is_zero:
                return ComplexPoly()
            return ComplexPoly(np.convolve(self._coeffs, other._coeffs))
        return self.scale(other)

    __rmul__ = __mul__

    def __divmod__(self, divisor: "ComplexPoly") -> Tuple["ComplexPoly", "ComplexPoly"]:
        if divisor.is_zero:
            raise InvalidInputError("Polynomial division by the zero polynomial")
        if self.is_zero:
            return ComplexPoly(), ComplexPoly()
        quotient, remainder = npoly.polydiv(self._coeffs, divisor._coeffs)
        return ComplexPoly(quotient), ComplexPoly(remainder)

    def roots(self) -> np.ndarray:
        """Roots from the eigenvalues of the companion matrix."""
        if self.degree < 1:
            return np.zeros(0, dtype=complex)
        return np.asarray(npoly.polyroots(self._coeffs), dtype=complex)

    def is_real(self, tol: float = REAL_TOLERANCE) -> bool:
        return all(is_real_value(c, tol) for c in self._coeffs)

    def allclose(self, other: "ComplexPoly", tol: float = 1e-12) -> bool:
        diff = self - other
        return diff.max_abs_coeff <= tol * max(1.0, self.max_abs_coeff, other.max_abs_coeff)

    def to_json(self) -> List[List[float]]:
        return [[float(c.real), float(c.imag)] for c in self._coeffs]

    @classmethod
    def from_json(cls, pairs: Sequence[Sequence[float]]) -> "ComplexPoly":
        try:
            return cls(complex(re, im) for re, im in pairs)
        except (TypeError, ValueError) as e:
            raise InvalidInputError(f"Polynomial must be a list of [re, im] pairs: {e}") from e

    def __eq__(self, other) -> bool:
        if not isinstance(other, ComplexPoly):
            return NotImplemented
        return np.array_equal(self._coeffs, other._coeffs)

    def __hash__(self) -> int:
        return hash(tuple(self._coeffs.tolist()))

    def __repr__(self) -> str:
        return f"ComplexPoly({self._coeffs.tolist()!r})"


def _coerce(value) -> ComplexPoly:
    if isinstance(value, ComplexPoly):
        return value
    return ComplexPoly.constant(value)
