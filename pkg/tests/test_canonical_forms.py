import numpy as np
import pytest
from pydantic import ValidationError

from qes.bethe import coefficients
from qes.canonical_forms import (
    GHeun1Form,
    GHeun2Form,
    GHeun3Form,
    GHeun4Form,
    HeunForm,
    elementary_symmetric,
    form_coeff_gaps,
    form_coeffs,
    from_spec,
    fuchsian_check,
    gheun1_pq,
    gheun1_pq_literal,
    parse_form,
    pole_form_bae_residuals,
    to_spec,
)
from qes.errors import CoincidentPolesError, InvalidInputError
from qes.solver import solve_all


def test_two_electron_heun_form_gives_cubic_x():
    delta, gamma = 2.0, 0.5
    side = 0.5 * (delta - 1 / gamma)
    spec = to_spec(HeunForm(d=(0, -1, 1), alpha=(1 / gamma, side, side)), 1)
    assert np.allclose(spec.a, (0, -1, 0, 1, 0))
    # Y = X * sum alpha_s / (z - d_s)
    assert np.allclose(spec.b, (-1 / gamma, 0, 1 / gamma + 2 * side, 0))


def test_phi6_gheun1_form_gives_quartic_x():
    eps = 0.5
    spec = to_spec(GHeun1Form(e=(1, -1, 1j / eps, -1j / eps), mu=(0, 0, 0, 0)), 2)
    assert np.allclose(spec.a, (-1 / eps**2, 0, 1 / eps**2 - 1, 0, 1))


def test_zero_exponents_give_zero_drift():
    spec = to_spec(HeunForm(d=(0, 1, 2), alpha=(0, 0, 0)), 2)
    assert spec.b == (0, 0, 0, 0)


def test_coincident_poles_rejected():
    with pytest.raises(CoincidentPolesError):
        to_spec(HeunForm(d=(1, 1, 2), alpha=(1, 1, 1)), 1)
    with pytest.raises(CoincidentPolesError):
        to_spec(GHeun3Form(g1=2, g2=2, sigma1=1, sigma2=1, sigma=0, kappa=0), 1)


def test_round_trip_through_spec():
    form = GHeun2Form(f=(0, 1, 0.5), nu_s=(0.3, 1, 1), nu=-0.4)
    back = from_spec(to_spec(form, 1), "gheun2")
    assert sorted(back.f, key=lambda z: z.real) == pytest.approx([0, 0.5, 1])
    assert back.nu == pytest.approx(-0.4)
    residues = dict(zip((round(p.real, 6) for p in back.f), back.nu_s))
    assert residues[0.0] == pytest.approx(0.3)


def test_from_spec_checks_degree():
    spec = to_spec(HeunForm(d=(0, -1, 1), alpha=(1, 1, 1)), 1)
    with pytest.raises(InvalidInputError):
        from_spec(spec, "gheun1")


def test_gheun4_round_trip():
    form = GHeun4Form(h=0.5, eta=1.5, lambda_=-1.0, gamma=0.25, delta=2.0)
    back = from_spec(to_spec(form, 1), "gheun4")
    assert back.lambda_ == pytest.approx(-1.0)
    assert back.gamma == pytest.approx(0.25)
    assert back.delta == pytest.approx(2.0)
    assert back.eta == pytest.approx(1.5)


def test_forms_decode_from_json():
    form = parse_form({"kind": "gheun4", "h": 0, "eta": [1, 0], "lambda": "2-1i", "gamma": 0, "delta": 1})
    assert isinstance(form, GHeun4Form)
    assert form.lambda_ == 2 - 1j
    with pytest.raises(ValidationError):
        parse_form({"kind": "heun", "d": [0, 1], "alpha": [1, 1, 1]})


def test_heun_c1_closed_form():
    form = HeunForm(d=(0, -1, 1), alpha=(1.0, 0.5, 0.5))
    _, c1, _ = form_coeffs(form, 2, [0.3, 0.7])
    assert c1 == pytest.approx(-2 * (2 - 1 + 2.0))


def test_gheun3_without_sigma_has_no_quadratic_term():
    form = GHeun3Form(g1=0, g2=1, sigma1=1, sigma2=2, sigma=0, kappa=1)
    c2, _, _ = form_coeffs(form, 2, [0.2, 0.4])
    assert c2 == 0


def test_gheun4_trivial_drift_gives_zero():
    form = GHeun4Form(h=1, eta=2, lambda_=0, gamma=0, delta=0)
    assert form_coeffs(form, 2, [3.0, 4.0]) == (0, 0, 0)


@pytest.mark.parametrize(
    "form",
    [
        HeunForm(d=(0, -1, 1), alpha=(1.0, 0.5, 0.5)),
        GHeun1Form(e=(1, -1, 2j, -2j), mu=(0.5, 0.5, 1.0, 1.0)),
        GHeun2Form(f=(0, 1, 0.5), nu_s=(0.3, 1, 1), nu=-0.4),
        GHeun3Form(g1=0, g2=1, sigma1=0.5, sigma2=1.5, sigma=1, kappa=0.5),
        GHeun4Form(h=0, eta=1.5, lambda_=1, gamma=-0.5, delta=2),
    ],
)
def test_form_coefficients_agree_with_general_formulas(form, cfg):
    n = 2
    spec = to_spec(form, n)
    solutions = solve_all(spec, cfg)
    assert solutions
    for sol in solutions:
        closed = form_coeffs(form, n, sol.roots)
        general = coefficients(spec, sol.roots)
        assert np.allclose(closed, general, rtol=1e-10, atol=1e-10)
        assert np.abs(pole_form_bae_residuals(form, sol.roots)).max() < 1e-6


def test_random_roots_agree_too(rng):
    form = GHeun2Form(f=(0, 1, 0.5), nu_s=(0.3, 1, 1), nu=-0.4)
    roots = list(rng.normal(size=3) + 1j * rng.normal(size=3))
    assert np.allclose(form_coeffs(form, 3, roots), coefficients(to_spec(form, 3), roots))


def test_printed_gheun1_c0_differs_from_derived():
    form = GHeun1Form(e=(1, -1, 2j, -2j), mu=(0.5, 0.7, 1.0, 1.3))
    gaps = form_coeff_gaps(form, 2, [0.1 + 0.2j, -0.3])
    assert gaps["c2"] < 1e-12
    assert gaps["c0"] > 1e-6


def test_printed_gheun2_c0_flips_the_linear_term():
    form = GHeun2Form(f=(0, 1, 0.5), nu_s=(0.3, 1, 1), nu=-0.4)
    roots = [0.2 + 0.1j, -0.6]
    spec = to_spec(form, 2)
    gaps = form_coeff_gaps(form, 2, roots)
    assert gaps["c2"] < 1e-12
    assert gaps["c1"] < 1e-12
    # printed c0 adds n*b1 where the general formula subtracts it
    assert gaps["c0"] == pytest.approx(2 * 2 * abs(spec.b[1]), rel=1e-12)
    assert abs(spec.b[1] + 2.15) < 1e-12


def test_fuchsian_relation():
    form = HeunForm(d=(0, 2, 5), alpha=(0.5 + 1j, -2.0, 3.25))
    alpha, beta, residual = fuchsian_check(form, 3)
    assert alpha == -3
    assert beta == pytest.approx(sum(form.alpha) + 2)
    assert residual <= 1e-15


def test_gheun1_pq_matches_literal_sums(rng):
    e = list(rng.normal(size=4) + 1j * rng.normal(size=4))
    mu = list(rng.normal(size=4))
    assert np.allclose(gheun1_pq(e, mu), gheun1_pq_literal(e, mu), rtol=1e-13)


def test_elementary_symmetric():
    assert elementary_symmetric([1, 2, 3]) == [1, 6, 11, 6]
