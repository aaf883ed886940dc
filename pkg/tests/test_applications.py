import math

import numpy as np
import pytest

from qes.applications import decatic, dirac, phi6, reissner_nordstrom, two_electron
from qes.bethe import coefficients
from qes.errors import InvalidInputError


def _near(found, key, target, tol=1e-8):
    return any(np.allclose(np.asarray(key(s), dtype=complex), target, rtol=tol, atol=tol) for s in found)


@pytest.mark.parametrize("n", [1, 2])
def test_two_electron_matches_closed_form(n, cfg):
    delta, gamma = 2.0, 1.0
    energy, r = two_electron.closed_form(delta, gamma, n)
    found = two_electron.solve(two_electron.TwoElectronParams(delta, gamma, n), cfg)
    assert _near(found, lambda s: (s.energy, s.params["R"]), (energy, r))
    assert all(s.branch["status"] == "kept" for s in found)


def test_two_electron_one_node_values():
    energy, r = two_electron.closed_form(3.0, 0.75, 1)
    assert energy == 0.75
    assert r == pytest.approx(0.5 * math.sqrt(4.0))


def test_two_electron_discarded_are_kept_on_request(cfg):
    params = two_electron.TwoElectronParams(2.0, 1.0, 2)
    everything = two_electron.solve(params, cfg, include_discarded=True)
    assert len(everything) == 3
    kept = [s.roots for s in two_electron.physical(everything)]
    assert kept == [s.roots for s in two_electron.solve(params, cfg)]


def test_two_electron_closed_form_limits():
    with pytest.raises(InvalidInputError):
        two_electron.closed_form(2.0, 1.0, 3)
    with pytest.raises(InvalidInputError):
        two_electron.TwoElectronParams(2.0, 0.0, 1)


def test_phi6_two_node_energy(cfg):
    found = phi6.solve(phi6.Phi6Params(mu=1.0, n=2), cfg)
    assert _near(found, lambda s: (s.energy, s.params[phi6.PARAM]), (0.75, 2.0), tol=1e-10)


def test_phi6_one_node_zero_energy(cfg):
    found = phi6.solve(phi6.Phi6Params(mu=1.0, n=1), cfg)
    assert any(abs(s.energy) < 1e-10 and phi6.PARAM in s.tags["free_params"] for s in found)


def test_phi6_levels():
    assert phi6.nonnegative_energy_levels(10) == [1, 2, 3, 4, 5]
    assert phi6.closed_form_energy(2.0, 3) == pytest.approx(4.0)
    with pytest.raises(InvalidInputError):
        phi6.Phi6Params(mu=1.0, n=2, s_low=0.0)


def test_phi6_wavefunction_at_origin(cfg):
    found = phi6.solve(phi6.Phi6Params(mu=1.0, n=2), cfg)
    state = next(s for s in found if abs(s.params[phi6.PARAM] - 2.0) < 1e-8)
    # S(cosh 0) = 1 - 2, envelope (1 + s)^(-3/2)
    value = state.wavefunction.evaluate([0.0])[0]
    assert value == pytest.approx(-(3.0**-1.5), rel=1e-8)


@pytest.mark.parametrize("l", [0, 1])
def test_dirac_nodeless_closed_form_relations(l):
    energy, eb = dirac.closed_form_n0(1.0, l, 1.0)
    assert max(dirac.spectral_relations({"E": energy, "Z": 1.0, "eB": eb}, [], l, 1.0)) <= 1e-10
    assert energy < 0
    assert eb < 0


def test_dirac_solver_finds_nodeless_state(cfg):
    energy, eb = dirac.closed_form_n0(1.0, 0, 1.0)
    found = dirac.solve(dirac.DiracParams(l=0, n=0, Z=1.0), cfg)
    assert _near(found, lambda s: (s.energy, s.params["eB"]), (energy, eb))
    assert all(set(s.tags) == {"relations"} for s in found)


def test_dirac_parameter_checks():
    with pytest.raises(InvalidInputError):
        dirac.DiracParams(m_e=0.0)
    with pytest.raises(InvalidInputError):
        dirac.DiracParams(Z=100.0)
    with pytest.raises(InvalidInputError):
        dirac.DiracParams(unknowns=("E", "mass"))
    assert dirac.DiracParams(n=1).resolved_unknowns == ("E", "Z", "eB")


def test_decatic_nodeless_references_zero_the_targets():
    params = decatic.DecaticParams(1.0, 0.5, 0)
    refs = decatic.reference_n0(params)
    assert refs
    for ref in refs:
        c2, c1, _ = decatic.target_coefficients({"lambda3": ref.lambda3, "lambda4": ref.lambda4}, params)
        assert abs(c2) < 1e-10
        assert abs(c1) < 1e-10


def test_decatic_one_node_root_solves_cubic():
    params = decatic.DecaticParams(0.0, 0.0, 1)
    refs = decatic.reference_n1(params)
    assert refs
    nl = params.N + 2 * params.l
    for ref in refs:
        roots = decatic.n1_root_cardano(ref.lambda3, ref.lambda4, params)
        assert min(abs(z - ref.z1) for z in roots) < 1e-8
        for z in roots:
            cubic = z**3 + ref.lambda4 / 2 * z**2 + (ref.lambda3 - ref.lambda4**2 / 4) / 2 * z - nl / (2 * math.sqrt(2))
            assert abs(cubic) < 1e-9


def test_decatic_printed_cardano_misses_the_root():
    params = decatic.DecaticParams(0.0, 0.0, 1)
    ref = decatic.reference_n1(params)[0]
    printed = decatic.n1_root_cardano(ref.lambda3, ref.lambda4, params, printed=True)
    assert min(abs(z - ref.z1) for z in printed) > 1e-6


def test_real_cubic_roots():
    assert decatic.real_cubic_roots(-7.0, 6.0) == pytest.approx([-3.0, 1.0, 2.0])
    assert decatic.real_cubic_roots(0.0, -8.0) == pytest.approx([2.0])


def test_decatic_solver_reproduces_nodeless_reference(cfg):
    params = decatic.DecaticParams(0.0, 0.0, 0)
    found = decatic.solve(params, cfg)
    for ref in decatic.reference_n0(params):
        assert _near(found, lambda s: (s.params["lambda3"], s.params["lambda4"], s.energy), (ref.lambda3, ref.lambda4, ref.energy))


def test_decatic_references_limited_to_low_degree():
    with pytest.raises(InvalidInputError):
        decatic.references(decatic.DecaticParams(0.0, 0.0, 2))


def test_rn_parameter_checks():
    with pytest.raises(InvalidInputError):
        reissner_nordstrom.RNParams(unknowns=())
    with pytest.raises(InvalidInputError):
        reissner_nordstrom.RNParams(unknowns=("spin",))
    with pytest.raises(InvalidInputError):
        reissner_nordstrom.RNParams(r_minus=1.5)
    with pytest.raises(InvalidInputError):
        reissner_nordstrom.RNParams(branches=("0",))


def test_rn_branches():
    assert reissner_nordstrom.mu_value(0.0, "+") == 1.0
    assert reissner_nordstrom.mu_value(0.0, "-") == 0.0


def test_rn_ground_states_satisfy_constraints(cfg):
    params = reissner_nordstrom.RNParams(n=0, unknowns=("a", "m_s"), r_minus=0.5)
    found = reissner_nordstrom.solve(params, cfg)
    assert found
    for sol in found:
        assert sol.constraint_residual <= cfg.cert_tol
        assert sol.tags["printed_c0_gap"] == 0.0
        assert sol.branch["mu"] in ("+", "-")


@pytest.mark.parametrize("branch", ["+", "-"])
def test_rn_printed_c0_differs_from_derived(branch):
    params = {"a_sq": 0.05 + 0j, "m_s": 0.3 + 0j, "r_minus": 0.5 + 0j}
    roots = [0.2 + 0.1j, 0.7]
    n = len(roots)
    spec = reissner_nordstrom.rn_spec(params, branch, n)
    derived = reissner_nordstrom.rn_relations(params, roots, branch)
    printed = reissner_nordstrom.rn_relations(params, roots, branch, printed=True)

    assert np.allclose(derived, coefficients(spec, roots), rtol=1e-12, atol=1e-12)
    assert printed[:2] == derived[:2]
    mu = reissner_nordstrom.mu_value(params["a_sq"], branch)
    # (n - 2 mu) and -2 m_s r_- against (n + 2 mu) and +2 m_s r_-
    expected_gap = abs(n * (4 * mu * 1.5 + 4 * 0.3 * 0.5))
    assert abs(printed[2] - derived[2]) == pytest.approx(expected_gap, rel=1e-12)
    assert abs(printed[2] - coefficients(spec, roots)[2]) > 1e-6
