import json

import pytest
from pydantic import ValidationError

from config import Settings, settings
from qes.config_loader import ConfigLoader, ExperimentsConfig
from qes.errors import ConfigFileError, InvalidInputError
from qes.models import SolverConfig
from qes.result_store import ResultStore
from qes.schemas import SolutionSetDocument


def test_bundled_experiments_file_loads():
    config = ConfigLoader(settings.experiments_file).load()
    assert sorted(config.counting.families) == ["dependent", "gheun1", "heun"]
    assert config.report.seeds[0] == 20240601
    assert config.applications.decatic.points[0] == (0.0, 0.0)


def test_missing_sections_take_defaults(tmp_path):
    path = tmp_path / "experiments.yaml"
    path.write_text("report:\n  restarts: 50\n")
    config = ConfigLoader(path).load()
    assert config.report.restarts == 50
    assert config.applications == ExperimentsConfig().applications


def test_loader_errors(tmp_path):
    with pytest.raises(ConfigFileError):
        ConfigLoader(tmp_path / "absent.yaml").load()

    broken = tmp_path / "broken.yaml"
    broken.write_text("counting: [unclosed\n")
    with pytest.raises(ConfigFileError):
        ConfigLoader(broken).load()

    scalar = tmp_path / "scalar.yaml"
    scalar.write_text("42\n")
    with pytest.raises(ConfigFileError):
        ConfigLoader(scalar).load()

    invalid = tmp_path / "invalid.yaml"
    invalid.write_text("applications:\n  phi6:\n    mu: -1\n")
    with pytest.raises(ConfigFileError):
        ConfigLoader(invalid).load()


@pytest.mark.parametrize(
    "field, value",
    [("cert_tol", 0.0), ("newton_tol", -1.0), ("restarts", 0), ("max_iters", 0), ("damping", 1.0), ("seed", -1)],
)
def test_solver_config_validation(field, value):
    with pytest.raises(InvalidInputError):
        SolverConfig(**{field: value})


def test_solver_config_defaults_come_from_settings():
    cfg = SolverConfig.from_settings(restarts=7, seed=None)
    assert cfg.restarts == 7
    assert cfg.seed == settings.default_seed
    assert cfg.cert_tol == settings.cert_tol


def test_overrides_skip_unset_values():
    cfg = SolverConfig(restarts=10).with_overrides(restarts=None, cert_tol=1e-7)
    assert cfg.restarts == 10
    assert cfg.cert_tol == 1e-7


def test_store_writes_atomically(tmp_path):
    store = ResultStore(tmp_path)
    target = store.write_text("out/result.json", "{}\n")
    assert target == tmp_path / "out" / "result.json"
    assert target.read_text() == "{}\n"
    assert not list(tmp_path.glob("out/*.tmp"))


def test_store_load_errors(tmp_path):
    store = ResultStore(tmp_path)
    with pytest.raises(ConfigFileError):
        store.load("absent.json", SolutionSetDocument)

    (tmp_path / "bad.json").write_text("{not json")
    with pytest.raises(ConfigFileError):
        store.load("bad.json", SolutionSetDocument)

    (tmp_path / "wrong.json").write_text(json.dumps({"seed": 1}))
    with pytest.raises(ValidationError):
        store.load("wrong.json", SolutionSetDocument)


def test_store_loads_fixture(fixtures_dir):
    document = ResultStore(fixtures_dir).load("phi6_n2_solutions.json", SolutionSetDocument)
    assert document.spec.n == 2
    assert document.solutions[0].c2 == 8


def test_settings_read_env_file(tmp_path, monkeypatch):
    monkeypatch.delenv("RESTARTS", raising=False)
    monkeypatch.delenv("CERT_TOL", raising=False)
    env_file = tmp_path / ".env"
    env_file.write_text("RESTARTS=37\nCERT_TOL=1e-7\n")
    loaded = Settings(_env_file=env_file)
    assert loaded.restarts == 37
    assert loaded.cert_tol == 1e-7
