from typing import Any, Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from config import settings
from qes.bethe import bae_residual_norm
from qes.canonical_forms import CanonicalForm, to_spec
from qes.fields import ComplexValue
from qes.models import BetheSolution, CountReport, OdeSpec, SolverConfig
from qes.poly import is_real_value


class SolverOverrides(BaseModel):
    model_config = ConfigDict(extra="forbid")

    seed: Optional[int] = Field(None, ge=0, lt=2**64)
    restarts: Optional[int] = Field(None, ge=1)
    max_iters: Optional[int] = Field(None, ge=1)
    newton_tol: Optional[float] = Field(None, gt=0)
    cert_tol: Optional[float] = Field(None, gt=0)
    sep_tol: Optional[float] = Field(None, gt=0)
    pole_tol: Optional[float] = Field(None, gt=0)
    damping: Optional[float] = Field(None, gt=0, lt=1)

    def apply(self, cfg: SolverConfig) -> SolverConfig:
        return cfg.with_overrides(**self.model_dump())


class SpecDocument(BaseModel):
    """A problem given either by X, Y coefficients (ascending powers) or by a canonical form."""

    model_config = ConfigDict(extra="forbid")

    schema_version: str = settings.schema_version
    a: Optional[List[ComplexValue]] = Field(None, min_length=1, max_length=5)
    b: Optional[List[ComplexValue]] = Field(None, max_length=4)
    form: Optional[CanonicalForm] = None
    n: int = Field(..., ge=0)
    solver: Optional[SolverOverrides] = None

    @model_validator(mode="after")
    def one_source(self) -> "SpecDocument":
        has_coeffs = self.a is not None or self.b is not None
        if has_coeffs == (self.form is not None):
            raise ValueError("give exactly one of (a, b) or form")
        if has_coeffs and self.a is None:
            raise ValueError("coefficients a are required with b")
        return self

    def to_spec(self) -> OdeSpec:
        if self.form is not None:
            return to_spec(self.form, self.n)
        a = list(self.a) + [0j] * (5 - len(self.a))
        b = list(self.b or []) + [0j] * (4 - len(self.b or []))
        return OdeSpec(a=tuple(a), b=tuple(b), n=self.n)

    @classmethod
    def from_spec(cls, spec: OdeSpec) -> "SpecDocument":
        return cls(a=list(spec.a), b=list(spec.b), n=spec.n)


class SolutionRecord(BaseModel):
    roots: List[ComplexValue]
    real_roots: List[bool]
    c2: ComplexValue
    c1: ComplexValue
    c0: ComplexValue
    bae_residual: float
    ode_residual: float
    certified: bool

    @classmethod
    def from_solution(cls, sol: BetheSolution) -> "SolutionRecord":
        return cls(
            roots=list(sol.roots),
            real_roots=sol.config.real_flags(),
            c2=sol.c2,
            c1=sol.c1,
            c0=sol.c0,
            bae_residual=sol.bae_residual,
            ode_residual=sol.ode_residual,
            certified=sol.certified,
        )

    @classmethod
    def from_oracle(cls, spec: OdeSpec, sol, cfg: SolverConfig) -> "SolutionRecord":
        """Oracle solutions carry their own c coefficients and ODE residual."""
        return cls(
            roots=list(sol.roots),
            real_roots=[is_real_value(z, settings.real_tolerance) for z in sol.roots],
            c2=sol.c2,
            c1=sol.c1,
            c0=sol.c0,
            bae_residual=bae_residual_norm(spec, sol.roots),
            ode_residual=sol.residual,
            certified=sol.residual <= cfg.cert_tol,
        )


class SolutionSetDocument(BaseModel):
    schema_version: str = settings.schema_version
    spec: SpecDocument
    seed: int
    solutions: List[SolutionRecord]
    stats: Dict[str, int] = Field(default_factory=dict)
    x_multiple_roots: bool = False


class AugmentedRecord(BaseModel):
    system: str
    params: Dict[str, ComplexValue]
    free_params: List[str] = Field(default_factory=list)
    energy: Optional[ComplexValue] = None
    solution: SolutionRecord
    constraint_residual: float
    branch: Dict[str, str] = Field(default_factory=dict)
    tags: Dict[str, Any] = Field(default_factory=dict)
    units: str = ""
    wavefunction: Dict[str, Any] = Field(default_factory=dict)

    @classmethod
    def from_app(cls, app) -> "AugmentedRecord":
        tags = dict(app.tags)
        return cls(
            system=app.system,
            params=app.params,
            free_params=list(tags.pop("free_params", [])),
            energy=app.energy,
            solution=SolutionRecord.from_solution(app.solution),
            constraint_residual=app.constraint_residual,
            branch=app.branch,
            tags=tags,
            units=app.units,
            wavefunction=app.wavefunction.describe(),
        )


class AugmentedSetDocument(BaseModel):
    schema_version: str = settings.schema_version
    system: str
    inputs: Dict[str, Any]
    seed: int
    solutions: List[AugmentedRecord]
    stats: Dict[str, int] = Field(default_factory=dict)


class CountRecord(BaseModel):
    family: str
    n: int
    deg_x: int
    expected: int
    found: List[int]
    restarts_used: int
    complete: bool
    residuals: List[List[List[float]]] = Field(default_factory=list)
    specs: List[SpecDocument] = Field(default_factory=list)

    @classmethod
    def from_report(cls, report: CountReport) -> "CountRecord":
        return cls(
            family=report.family,
            n=report.n,
            deg_x=report.deg_x,
            expected=report.expected,
            found=report.found,
            restarts_used=report.restarts_used,
            complete=report.complete,
            residuals=[[list(pair) for pair in trial.residuals] for trial in report.trials],
            specs=[SpecDocument.from_spec(trial.spec) for trial in report.trials],
        )


class CountDocument(BaseModel):
    schema_version: str = settings.schema_version
    seed: int
    counts: List[CountRecord]


class CriterionRecord(BaseModel):
    id: int
    name: str
    passed: bool
    duration_ms: float
    details: Dict[str, Any] = Field(default_factory=dict)


class ReportDocument(BaseModel):
    schema_version: str = settings.schema_version
    seed: int
    passed: bool
    total_ms: float
    criteria: List[CriterionRecord]
    audits: Dict[str, Any] = Field(default_factory=dict)
    timings: Dict[str, Dict[str, float]] = Field(default_factory=dict)
