import math

import numpy as np
import pytest

from qes.applications import phi6
from qes.augmented import (
    AugmentedSystem,
    ParameterSpec,
    free_parameter_detect,
    residual_measure,
    solve_augmented,
    stacked_jacobian,
)
from qes.errors import InvalidInputError
from qes.models import OdeSpec
from qes.newton import gauss_newton, stationarity
from qes.solver import solve_all

SQRT2 = math.sqrt(2.0)


def test_parameter_flags():
    assert not ParameterSpec("s", 0, 1).admissible(1 + 1e-3j)
    assert ParameterSpec("s", 0, 1, real=False).admissible(1 + 1e-3j)
    assert not ParameterSpec("s", 0, 1, positive=True).admissible(0j)
    assert ParameterSpec("s", 0, 1, nonnegative=True).admissible(0j)
    assert not ParameterSpec("s", 0, 1, nonnegative=True).admissible(-0.1 + 0j)
    with pytest.raises(InvalidInputError):
        ParameterSpec("s", 2, 1)


def test_underdetermined_system_rejected():
    with pytest.raises(InvalidInputError):
        AugmentedSystem(
            params=(ParameterSpec("s", 0, 1),),
            spec_builder=lambda p: phi6.phi6_spec(p["s"], 2),
            constraints=(),
            n=2,
        )


def test_without_parameters_it_is_solve_all(phi6_n2, cfg):
    system = AugmentedSystem(params=(), spec_builder=lambda p: phi6_n2, constraints=(), n=2)
    augmented = solve_augmented(system, cfg)
    plain = solve_all(phi6_n2, cfg)
    assert [s.roots for s in augmented] == [s.roots for s in plain]
    assert all(s.constraint_residual == 0.0 for s in augmented)


def test_stacked_jacobian_shape():
    system = phi6.build_system(phi6.Phi6Params(mu=1.0, n=2))
    x = np.array([-1.3 + 0.1j, 1.2, 1.7], dtype=complex)
    jac = stacked_jacobian(system, x)
    assert jac.shape == (4, 3)
    assert np.all(np.isfinite(jac))


def test_phi6_two_node_state(cfg):
    system = phi6.build_system(phi6.Phi6Params(mu=1.0, n=2))
    found = solve_augmented(system, cfg)
    match = [s for s in found if abs(s.params[phi6.PARAM] - 2.0) < 1e-9]
    assert match
    sol = match[0]
    assert sorted(z.real for z in sol.roots) == pytest.approx([-SQRT2, SQRT2], abs=1e-9)
    assert sol.constraint_residual <= cfg.cert_tol
    assert residual_measure(system, system.pack(sol.roots, sol.params)) <= cfg.cert_tol
    assert free_parameter_detect(system, sol, cfg) == []


def test_phi6_one_node_leaves_coupling_free(cfg):
    system = phi6.build_system(phi6.Phi6Params(mu=1.0, n=1))
    found = solve_augmented(system, cfg)
    assert found
    assert all(abs(s.roots[0]) < 1e-9 for s in found)
    assert free_parameter_detect(system, found[0], cfg) == [phi6.PARAM]


def test_fixed_starts_are_used_first(cfg):
    spec = ParameterSpec("s", 0.5, 5.0, starts=(2.0,))
    system = AugmentedSystem(
        params=(spec,),
        spec_builder=lambda p: phi6.phi6_spec(p["s"], 2),
        constraints=(phi6.root_sum, phi6.coupling_relation),
        n=2,
        root_guess=lambda p: [-SQRT2, SQRT2],
    )
    found = solve_augmented(system, cfg.with_overrides(restarts=1))
    assert len(found) == 1
    assert found[0].params["s"] == pytest.approx(2.0)


def test_invalid_parameter_values_give_no_spec():
    def builder(p):
        if p["s"].real < 0:
            raise InvalidInputError("negative coupling")
        return OdeSpec(a=(1, 0, 1, 0, 0), b=(0, p["s"], 0, 0), n=1)

    system = AugmentedSystem(
        params=(ParameterSpec("s", 0, 1),),
        spec_builder=builder,
        constraints=(lambda p, r, s: p["s"] - 0.5,),
        n=1,
    )
    assert system.realize({"s": -1 + 0j}) is None
    assert np.isinf(residual_measure(system, np.array([0.1, -1.0], dtype=complex)))


def test_inconsistent_system_stops_at_least_squares_point():
    # x = 1 and x = 3 cannot both hold
    jac = np.array([[1.0], [1.0]], dtype=complex)
    result = gauss_newton(
        lambda x: np.array([x[0] - 1.0, x[0] - 3.0]),
        lambda x: jac,
        np.zeros(1, dtype=complex),
        tol=1e-12,
        max_iters=50,
        damping=0.5,
    )
    assert result.status == "stationary"
    assert result.x[0] == pytest.approx(2.0)
    assert result.residual == pytest.approx(1.0)
    assert stationarity(jac, np.array([-1.0, -3.0], dtype=complex)) == pytest.approx(4.0)
