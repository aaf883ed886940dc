"""JSON, CSV and console renderings of the output documents.

JSON output is sorted and indented; every float passes through
``format(x, ".17g")`` first, so identical runs produce identical bytes and
non-finite values come out as null.
"""
import csv
import io
import json
import math
from typing import Any, Dict, Iterable, List, Optional

import numpy as np
from pydantic import BaseModel
from rich.console import Console
from rich.table import Table

from config import settings
from qes.poly import is_real_value
from qes.schemas import AugmentedSetDocument, CountDocument, ReportDocument, SolutionRecord, SolutionSetDocument

FORMATS = ("json", "csv", "pretty")


def normalize(value: Any, digits: Optional[int] = None) -> Any:
    digits = digits or settings.json_significant_digits
    if isinstance(value, BaseModel):
        return normalize(value.model_dump(mode="python", by_alias=True), digits)
    if isinstance(value, dict):
        return {str(k): normalize(v, digits) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [normalize(v, digits) for v in value]
    if isinstance(value, np.ndarray):
        return [normalize(v, digits) for v in value.tolist()]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (complex, np.complexfloating)):
        return [normalize(float(value.real), digits), normalize(float(value.imag), digits)]
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if not math.isfinite(value):
            return None
        return float(format(value, f".{digits}g"))
    return value


def to_json(document: BaseModel) -> str:
    return json.dumps(normalize(document), indent=2, sort_keys=True, ensure_ascii=False, allow_nan=False) + "\n"


def format_complex(value, digits: Optional[int] = None) -> str:
    digits = digits or settings.pretty_significant_digits
    z = complex(*value) if isinstance(value, (list, tuple)) else complex(value)
    if is_real_value(z, settings.real_tolerance):
        return f"{z.real:.{digits}g}"
    sign = "-" if z.imag < 0 else "+"
    return f"{z.real:.{digits}g}{sign}{abs(z.imag):.{digits}g}i"


def _solution_row(index: int, record: SolutionRecord, width: int) -> Dict[str, Any]:
    row: Dict[str, Any] = {"index": index}
    for name in ("c2", "c1", "c0"):
        value = complex(getattr(record, name))
        row[f"{name}_re"], row[f"{name}_im"] = normalize(value)
    row["bae_residual"] = normalize(record.bae_residual)
    row["ode_residual"] = normalize(record.ode_residual)
    row["certified"] = record.certified
    for k in range(width):
        if k < len(record.roots):
            row[f"root{k}_re"], row[f"root{k}_im"] = normalize(complex(record.roots[k]))
        else:
            row[f"root{k}_re"] = row[f"root{k}_im"] = ""
    return row


def _write_csv(rows: List[Dict[str, Any]]) -> str:
    if not rows:
        return ""
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=list(rows[0]), lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buffer.getvalue()


def to_csv(document: BaseModel) -> str:
    """One solution per row, roots padded with empty cells up to the widest solution."""
    if isinstance(document, SolutionSetDocument):
        width = max((len(r.roots) for r in document.solutions), default=0)
        return _write_csv([_solution_row(i, r, width) for i, r in enumerate(document.solutions)])

    if isinstance(document, AugmentedSetDocument):
        width = max((len(r.solution.roots) for r in document.solutions), default=0)
        names = sorted({name for r in document.solutions for name in r.params})
        rows = []
        for i, record in enumerate(document.solutions):
            row = {"index": i, "system": record.system}
            for name in names:
                value = record.params.get(name)
                row[f"{name}_re"], row[f"{name}_im"] = normalize(complex(value)) if value is not None else ("", "")
            row["energy_re"], row["energy_im"] = normalize(complex(record.energy)) if record.energy is not None else ("", "")
            row["constraint_residual"] = normalize(record.constraint_residual)
            row.update({k: v for k, v in _solution_row(i, record.solution, width).items() if k != "index"})
            rows.append(row)
        return _write_csv(rows)

    if isinstance(document, CountDocument):
        rows = [
            {
                "family": c.family,
                "n": c.n,
                "deg_x": c.deg_x,
                "expected": c.expected,
                "found": " ".join(str(f) for f in c.found),
                "restarts_used": c.restarts_used,
                "complete": c.complete,
            }
            for c in document.counts
        ]
        return _write_csv(rows)

    if isinstance(document, ReportDocument):
        rows = [
            {"id": c.id, "name": c.name, "passed": c.passed, "duration_ms": normalize(c.duration_ms)}
            for c in document.criteria
        ]
        return _write_csv(rows)

    raise TypeError(f"No CSV layout for {type(document).__name__}")


def _roots_cell(roots: Iterable) -> str:
    parts = []
    for z in roots:
        text = format_complex(z)
        if is_real_value(complex(z), settings.real_tolerance):
            text += " (real)"
        parts.append(text)
    return "\n".join(parts) or "-"


def render_pretty(document: BaseModel, console: Optional[Console] = None) -> None:
    console = console or Console()

    if isinstance(document, SolutionSetDocument):
        table = Table(title=f"n = {document.spec.n}, seed {document.seed}")
        for column in ("#", "roots", "c2", "c1", "c0", "ODE residual", "certified"):
            table.add_column(column)
        for i, r in enumerate(document.solutions):
            table.add_row(
                str(i),
                _roots_cell(r.roots),
                format_complex(r.c2),
                format_complex(r.c1),
                format_complex(r.c0),
                f"{r.ode_residual:.2e}",
                "yes" if r.certified else "no",
            )
        console.print(table)

    elif isinstance(document, AugmentedSetDocument):
        table = Table(title=f"{document.system}, seed {document.seed}")
        for column in ("#", "parameters", "energy", "roots", "constraint residual", "branch"):
            table.add_column(column)
        for i, r in enumerate(document.solutions):
            params = "\n".join(f"{k} = {format_complex(v)}" for k, v in sorted(r.params.items()))
            if r.free_params:
                params += "\nfree: " + ", ".join(r.free_params)
            table.add_row(
                str(i),
                params,
                format_complex(r.energy) if r.energy is not None else "-",
                _roots_cell(r.solution.roots),
                f"{r.constraint_residual:.2e}",
                ", ".join(f"{k}={v}" for k, v in r.branch.items()) or "-",
            )
        console.print(table)

    elif isinstance(document, CountDocument):
        table = Table(title=f"Heine-Stieltjes counts, seed {document.seed}")
        for column in ("family", "n", "deg X", "expected", "found", "restarts", "complete"):
            table.add_column(column)
        for c in document.counts:
            table.add_row(
                c.family, str(c.n), str(c.deg_x), str(c.expected),
                " ".join(str(f) for f in c.found), str(c.restarts_used), "yes" if c.complete else "no",
            )
        console.print(table)

    elif isinstance(document, ReportDocument):
        table = Table(title=f"Validation report ({'PASS' if document.passed else 'FAIL'})")
        for column in ("#", "criterion", "result", "time (ms)"):
            table.add_column(column)
        for c in document.criteria:
            result = "[green]pass[/green]" if c.passed else "[red]fail[/red]"
            table.add_row(str(c.id), c.name, result, f"{c.duration_ms:.0f}")
        console.print(table)

    else:
        console.print_json(to_json(document))


def render(document: BaseModel, fmt: str) -> Optional[str]:
    """Text for json/csv; pretty prints directly and returns None."""
    if fmt == "json":
        return to_json(document)
    if fmt == "csv":
        return to_csv(document)
    if fmt == "pretty":
        render_pretty(document)
        return None
    raise ValueError(f"Unknown format {fmt!r}; expected one of {FORMATS}")
