import math

import numpy as np
import pytest

from qes.errors import InvalidInputError
from qes.poly import ComplexPoly, is_real_value


def test_eval_at_root_is_zero():
    assert abs(ComplexPoly([-2, 0, 1]).eval(math.sqrt(2.0))) < 1e-15


def test_eval_constant_and_sum():
    assert ComplexPoly.constant(1).eval(5 + 3j) == 1
    assert ComplexPoly([1, 1, 1, 1, 1]).eval(1.0) == 5


def test_eval_accepts_arrays():
    values = ComplexPoly([0, 0, 1]).eval(np.array([1.0, 2.0, 3.0]))
    assert np.allclose(values, [1, 4, 9])


def test_derivative():
    assert ComplexPoly.monomial(3).derivative() == ComplexPoly([0, 0, 3])
    assert ComplexPoly.constant(7).derivative().is_zero
    assert ComplexPoly([-1, 0, 1]).derivative() == ComplexPoly([0, 2])
    assert ComplexPoly([1, 2, 3, 4]).derivative(2) == ComplexPoly([6, 24])


def test_ring_operations():
    assert ComplexPoly([-1, 1]) * ComplexPoly([1, 1]) == ComplexPoly([-1, 0, 1])
    p = ComplexPoly([1 + 2j, 3, -4j])
    assert (p + p.scale(-1)).is_zero
    assert ComplexPoly.monomial(2) * ComplexPoly.monomial(3) == ComplexPoly.monomial(5)
    assert (2 - ComplexPoly([0, 1])) == ComplexPoly([2, -1])


def test_zero_polynomial_is_canonical():
    zero = ComplexPoly([0, 0, 0])
    assert zero.is_zero
    assert zero.degree == -1
    assert zero.coeffs.size == 0
    assert zero == ComplexPoly()


def test_tiny_leading_coefficients_are_trimmed():
    assert ComplexPoly([1, 2, 1e-20]).degree == 1


def test_non_finite_coefficients_rejected():
    with pytest.raises(InvalidInputError):
        ComplexPoly([1, float("nan")])
    with pytest.raises(InvalidInputError):
        ComplexPoly([complex(float("inf"), 0)])


def test_from_roots_expands_product():
    p = ComplexPoly.from_roots([1, -1, 2j])
    assert p.degree == 3
    assert p.allclose(ComplexPoly([-1, 0, 1]) * ComplexPoly([-2j, 1]))
    assert ComplexPoly.from_roots([]) == ComplexPoly.constant(1)


def test_roots_recovered_from_companion_matrix():
    roots = sorted(ComplexPoly.from_roots([3, -1, 0.5]).roots(), key=lambda z: z.real)
    assert np.allclose(roots, [-1, 0.5, 3])


def test_divmod_splits_drift_and_remainder():
    x = ComplexPoly.from_roots([0, 1, -1])
    y = x * ComplexPoly([2, 1]) + ComplexPoly([1, 0, 3])
    quotient, remainder = divmod(y, x)
    assert quotient.allclose(ComplexPoly([2, 1]))
    assert remainder.allclose(ComplexPoly([1, 0, 3]))
    with pytest.raises(InvalidInputError):
        divmod(y, ComplexPoly())


def test_coefficients_are_read_only():
    p = ComplexPoly([1, 2])
    with pytest.raises(ValueError):
        p.coeffs[0] = 5


def test_json_pairs():
    p = ComplexPoly([1 - 2j, 0.5])
    assert p.to_json() == [[1.0, -2.0], [0.5, 0.0]]
    assert ComplexPoly.from_json(p.to_json()) == p
    with pytest.raises(InvalidInputError):
        ComplexPoly.from_json([[1.0]])


def test_reality_tolerance():
    assert is_real_value(2.0 + 1e-12j)
    assert not is_real_value(2.0 + 1e-6j)
    assert ComplexPoly([1, 2 + 1e-13j]).is_real()
