import pytest

from qes.counting import dependence_gap, expected_count, random_spec, run_count
from qes.errors import InvalidInputError


def test_expected_counts():
    assert expected_count("heun", 1) == 2
    assert expected_count("heun", 2) == 3
    assert expected_count("gheun1", 2) == 6
    assert expected_count("dependent", 3) == 4


def test_random_specs_have_the_family_shape(rng):
    heun = random_spec("heun", 2, rng)
    assert heun.X.degree == 3
    assert heun.a[3] == 1

    dependent = random_spec("dependent", 3, rng)
    assert dependent.X.degree == 4
    assert dependence_gap(dependent) == 0

    generic = random_spec("gheun1", 2, rng)
    assert dependence_gap(generic) > 0


def test_unknown_family(rng):
    with pytest.raises(InvalidInputError):
        random_spec("gheun5", 2, rng)
    with pytest.raises(InvalidInputError):
        run_count("gheun5", 2, 1, None)


def test_count_needs_positive_degree(cfg):
    with pytest.raises(InvalidInputError):
        run_count("heun", 0, 1, cfg)


@pytest.mark.parametrize("family, n", [("heun", 1), ("heun", 2), ("dependent", 2)])
def test_counts_match_expectation(family, n, cfg):
    report = run_count(family, n, trials=2, cfg=cfg)
    assert report.found == [expected_count(family, n)] * 2
    assert report.complete
    assert all(max(pair) <= cfg.cert_tol for trial in report.trials for pair in trial.residuals)


def test_count_is_reproducible(cfg):
    first = run_count("heun", 2, trials=1, cfg=cfg)
    second = run_count("heun", 2, trials=1, cfg=cfg)
    assert first.trials[0].spec == second.trials[0].spec
    assert first.found == second.found
