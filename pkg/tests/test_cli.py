import json

import pytest
from click.testing import CliRunner
from loguru import logger

from run import cli

PHI6 = json.dumps({"a": [-2, 0, 1, 0, 1], "b": [0, 8, 0, -5], "n": 2})


@pytest.fixture
def runner():
    yield CliRunner()
    logger.remove()


def _invoke(runner, tmp_path, *args):
    out = tmp_path / "out.txt"
    result = runner.invoke(cli, [*args, "--output", str(out)])
    return result, (out.read_text() if out.exists() else None)


def test_solve_inline_spec(runner, tmp_path):
    result, text = _invoke(runner, tmp_path, "solve", "--spec", PHI6, "--restarts", "100", "--seed", "3")
    assert result.exit_code == 0
    data = json.loads(text)
    assert data["seed"] == 3
    assert any(abs(s["c0"][0] + 2) < 1e-9 and s["certified"] for s in data["solutions"])
    assert data["stats"]["starts"] == 100


def test_solve_csv(runner, tmp_path):
    result, text = _invoke(runner, tmp_path, "solve", "--spec", PHI6, "--restarts", "50", "--format", "csv")
    assert result.exit_code == 0
    assert text.startswith("index,c2_re,c2_im")


def test_solve_reads_spec_files(runner, tmp_path):
    spec_file = tmp_path / "spec.json"
    spec_file.write_text(json.dumps({"form": {"kind": "heun", "d": [0, -1, 1], "alpha": [1, 0.5, 0.5]}, "n": 1}))
    result, text = _invoke(runner, tmp_path, "solve", "--spec", str(spec_file), "--form", "heun", "--restarts", "50")
    assert result.exit_code == 0
    assert len(json.loads(text)["solutions"]) == 2


@pytest.mark.parametrize(
    "args",
    [
        ["solve", "--spec", "{not json"],
        ["solve", "--spec", json.dumps({"a": [1], "n": -1})],
        ["solve", "--spec", PHI6, "--form", "heun"],
        ["solve", "--spec", "missing.json"],
        ["oracle", "sl2", "--spec", PHI6],
        ["oracle", "coeffs", "--spec", PHI6, "--n", "5"],
    ],
)
def test_invalid_input_exits_2(runner, tmp_path, args):
    result, _ = _invoke(runner, tmp_path, *args)
    assert result.exit_code == 2


def test_verify(runner, fixtures_dir, tmp_path):
    assert runner.invoke(cli, ["verify", str(fixtures_dir / "phi6_n2_solutions.json")]).exit_code == 0

    data = json.loads((fixtures_dir / "phi6_n2_solutions.json").read_text())
    data["solutions"][0]["c1"] = [0.5, 0.0]
    tampered = tmp_path / "tampered.json"
    tampered.write_text(json.dumps(data))
    assert runner.invoke(cli, ["verify", str(tampered)]).exit_code == 1


def test_oracle_output_uses_solution_schema(runner, tmp_path):
    result, text = _invoke(runner, tmp_path, "oracle", "coeffs", "--spec", PHI6, "--restarts", "100")
    assert result.exit_code == 0
    data = json.loads(text)
    assert {"roots", "real_roots", "c2", "c1", "c0", "bae_residual", "ode_residual", "certified"} <= set(data["solutions"][0])


def test_app_phi6(runner, tmp_path):
    result, text = _invoke(runner, tmp_path, "app", "phi6", "--n", "2", "--restarts", "100")
    assert result.exit_code == 0
    data = json.loads(text)
    assert data["system"] == "phi6"
    assert any(abs(s["energy"][0] - 0.75) < 1e-9 for s in data["solutions"])


def test_app_two_electron_rejects_zero_gamma(runner, tmp_path):
    result, _ = _invoke(runner, tmp_path, "app", "two-electron", "--delta", "2", "--gamma", "0")
    assert result.exit_code == 2


def test_count_single_family(runner, tmp_path):
    result, text = _invoke(runner, tmp_path, "count", "--family", "heun", "--n", "1", "--trials", "1", "--restarts", "50")
    assert result.exit_code == 0
    counts = json.loads(text)["counts"]
    assert [(c["family"], c["n"], c["found"]) for c in counts] == [("heun", 1, [2])]


def test_repeated_zero_of_x_is_flagged(runner, tmp_path):
    spec = json.dumps({"a": [0, 0, 1], "b": [1, 1], "n": 1})
    result, text = _invoke(runner, tmp_path, "solve", "--spec", spec, "--restarts", "20")
    assert result.exit_code == 0
    assert json.loads(text)["x_multiple_roots"] is True
