import json

import pytest
from pydantic import ValidationError
from rich.console import Console

from qes.models import SolverConfig
from qes.schemas import (
    CriterionRecord,
    ReportDocument,
    SolutionRecord,
    SolutionSetDocument,
    SpecDocument,
)
from qes.serialization import format_complex, normalize, render, render_pretty, to_csv, to_json
from qes.solver import solve_all


def _document(spec, cfg):
    return SolutionSetDocument(
        spec=SpecDocument.from_spec(spec),
        seed=cfg.seed,
        solutions=[SolutionRecord.from_solution(s) for s in solve_all(spec, cfg)],
    )


def test_json_is_byte_identical_across_runs(two_electron_n2, cfg):
    assert to_json(_document(two_electron_n2, cfg)) == to_json(_document(two_electron_n2, cfg))


def test_json_layout(phi6_n2, cfg):
    data = json.loads(to_json(_document(phi6_n2, cfg)))
    assert data["schema_version"] == "1.0"
    assert data["spec"]["a"][0] == [-2.0, 0.0]
    assert all(len(z) == 2 for s in data["solutions"] for z in s["roots"])


def test_non_finite_values_become_null():
    assert normalize(float("nan")) is None
    assert normalize([float("inf"), 1.5]) == [None, 1.5]
    assert normalize(complex(1, 2)) == [1.0, 2.0]
    assert normalize(0.1) == 0.1


def test_csv_pads_roots():
    record = dict(real_roots=[], c2=0, c1=0, c0=0, bae_residual=0.0, ode_residual=0.0, certified=True)
    document = SolutionSetDocument(
        spec=SpecDocument(a=[1], n=0),
        seed=1,
        solutions=[SolutionRecord(roots=[1, "2+1i"], **record), SolutionRecord(roots=[], **record)],
    )
    lines = to_csv(document).splitlines()
    header = lines[0].split(",")
    assert header[0] == "index"
    assert header[-4:] == ["root0_re", "root0_im", "root1_re", "root1_im"]
    assert lines[1].endswith("1.0,0.0,2.0,1.0")
    assert lines[2].endswith(",,,")


def test_report_csv():
    report = ReportDocument(
        seed=1,
        passed=True,
        total_ms=3.0,
        criteria=[CriterionRecord(id=1, name="identity_suite", passed=True, duration_ms=2.5)],
    )
    assert to_csv(report) == "id,name,passed,duration_ms\n1,identity_suite,True,2.5\n"


def test_format_complex():
    assert format_complex(2.0) == "2"
    assert format_complex(1 - 2j) == "1-2i"
    assert format_complex([0.5, 0.25]) == "0.5+0.25i"
    assert format_complex(3 + 1e-12j) == "3"


def test_pretty_rendering_mentions_roots(phi6_n2, cfg):
    console = Console(record=True, width=160)
    render_pretty(_document(phi6_n2, cfg), console)
    text = console.export_text()
    assert "1.41421356237" in text
    assert "(real)" in text


def test_render_dispatch(phi6_n2, cfg):
    document = _document(phi6_n2, cfg)
    assert render(document, "json") == to_json(document)
    assert render(document, "csv") == to_csv(document)


def test_spec_document_needs_exactly_one_source():
    with pytest.raises(ValidationError):
        SpecDocument(n=1)
    with pytest.raises(ValidationError):
        SpecDocument(a=[1, 0, 1], form={"kind": "heun", "d": [0, 1, 2], "alpha": [1, 1, 1]}, n=1)
    with pytest.raises(ValidationError):
        SpecDocument(b=[1], n=1)


def test_spec_document_pads_coefficients():
    spec = SpecDocument(a=[-1, 0, 1], b=["2i"], n=1).to_spec()
    assert spec.a == (-1, 0, 1, 0, 0)
    assert spec.b == (2j, 0, 0, 0)


def test_spec_document_rejects_bad_values():
    with pytest.raises(ValidationError):
        SpecDocument(a=[1, "nan"], n=1)
    with pytest.raises(ValidationError):
        SpecDocument(a=[1], n=-1)
    with pytest.raises(ValidationError):
        SpecDocument(a=[1], n=1, extra=3)


def test_solver_block_overrides_config():
    document = SpecDocument.model_validate({"a": [1], "n": 0, "solver": {"restarts": 3, "cert_tol": 1e-6}})
    cfg = document.solver.apply(SolverConfig())
    assert cfg.restarts == 3
    assert cfg.cert_tol == 1e-6
    assert cfg.newton_tol == SolverConfig().newton_tol
