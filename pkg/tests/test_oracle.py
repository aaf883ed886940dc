import math
from dataclasses import replace

import numpy as np
import pytest

from qes.errors import DependenceConditionError, InvalidInputError
from qes.models import OdeSpec
from qes.oracle import (
    apply_sl2_hamiltonian,
    build_sl2_matrix,
    coeff_system_solve,
    dependent_c0_discrepancy,
    dependent_c0_printed,
    is_dependent,
    sl2_solutions,
    sl2_spectrum,
    spectrum_matches,
)
from qes.poly import ComplexPoly
from qes.solver import solve_all

SQRT2 = math.sqrt(2.0)


def test_dependence_detection(dependent_n2, phi6_n2):
    assert is_dependent(dependent_n2)
    assert not is_dependent(phi6_n2)


def test_sl2_matrix_needs_dependent_spec(phi6_n2):
    with pytest.raises(DependenceConditionError):
        build_sl2_matrix(phi6_n2)


def test_sl2_matrix_shape(dependent_n2):
    m = build_sl2_matrix(dependent_n2)
    assert m.dimension == 3
    assert m.entries.shape == (3, 3)


def test_hamiltonian_keeps_degree(dependent_n2):
    image = apply_sl2_hamiltonian(dependent_n2, ComplexPoly.monomial(2))
    assert image.degree <= 2


def test_n_zero_spectrum_is_zero():
    spec = OdeSpec(a=(1, 0, 0, 0, 1), b=(0, 1, 0, 2), n=0)
    assert is_dependent(spec)
    assert np.allclose(sl2_spectrum(build_sl2_matrix(spec)), [0.0])


def test_spectrum_matches_bethe_c0(dependent_n2, cfg):
    solutions = solve_all(dependent_n2, cfg)
    assert len(solutions) == 3
    gap = spectrum_matches(sl2_spectrum(build_sl2_matrix(dependent_n2)), [-s.c0 for s in solutions])
    assert gap is not None and gap < 1e-8


def test_sl2_eigenvectors_are_solutions(dependent_n2, cfg):
    found = sl2_solutions(build_sl2_matrix(dependent_n2), cfg)
    assert len(found) == 3
    assert all(s.residual < cfg.cert_tol for s in found)


def test_spectrum_matches_size_mismatch():
    assert spectrum_matches([1.0], [1.0, 2.0]) is None
    assert spectrum_matches([2.0, 1.0], [1.0, 2.0]) == 0.0


def test_coefficient_oracle_finds_phi6_state(phi6_n2, cfg):
    found = coeff_system_solve(phi6_n2, cfg)
    assert any(
        abs(s.c0 + 2) < 1e-8 and abs(s.c2 - 8) < 1e-8 and sorted(z.real for z in s.roots) == pytest.approx([-SQRT2, SQRT2])
        for s in found
    )


def test_coefficient_oracle_agrees_with_bethe(two_electron_n2, cfg):
    bethe = solve_all(two_electron_n2, cfg)
    oracle = coeff_system_solve(two_electron_n2, cfg)
    assert len(bethe) == len(oracle) == 3
    for sol in bethe:
        assert any(abs(sol.c0 - o.c0) < 1e-8 * max(1.0, abs(sol.c0)) for o in oracle)


def test_coefficient_oracle_degree_limit(phi6_n2, cfg):
    with pytest.raises(InvalidInputError):
        coeff_system_solve(replace(phi6_n2, n=5), cfg)


def test_printed_dependent_c0_differs_by_n_b1(dependent_n2, cfg):
    solutions = solve_all(dependent_n2, cfg)
    sol = solutions[0]
    difference = dependent_c0_printed(dependent_n2, sol.roots) - sol.c0
    assert abs(difference) == pytest.approx(dependent_n2.n * abs(dependent_n2.b[1]), rel=1e-9)

    rows = dependent_c0_discrepancy(dependent_n2, solutions, cfg)
    assert all(r["general_certifies"] for r in rows)
    assert not any(r["printed_certifies"] for r in rows)
