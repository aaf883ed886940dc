import functools
import io
import json
import sys
from dataclasses import asdict
from pathlib import Path

import click
from loguru import logger
from pydantic import ValidationError
from rich.console import Console

from config import settings
from qes.errors import EXIT_INVALID, EXIT_OK, InvalidInputError, QESError

FORM_CHOICES = ["heun", "gheun1", "gheun2", "gheun3", "gheun4", "raw"]


def configure_logging(verbose: bool = False):
    logger.remove()
    logger.add(sys.stderr, level="DEBUG" if verbose else "INFO")
    logger.add(settings.log_file, rotation="10 MB", level="DEBUG")


def exit_codes(func):
    """Run a command body and turn its result into the process exit status."""

    @functools.wraps(func)
    @logger.catch(exclude=(QESError, ValidationError), reraise=True)
    def wrapper(*args, **kwargs):
        try:
            code = func(*args, **kwargs)
        except (QESError, ValidationError) as e:
            logger.error(f"Invalid input: {e}")
            code = EXIT_INVALID
        sys.exit(EXIT_OK if code is None else code)

    return wrapper


def problem_options(func):
    options = [
        click.option("--spec", "spec_arg", required=True, help="Spec file, or inline JSON"),
        click.option("--form", type=click.Choice(FORM_CHOICES), default=None, help="Expected problem shape"),
        click.option("--n", type=int, default=None, help="Polynomial degree (overrides the spec)"),
    ]
    for option in reversed(options):
        func = option(func)
    return func


def output_options(func):
    options = [
        click.option("--seed", type=int, default=None, help="Random seed (overrides config)"),
        click.option("--restarts", type=int, default=None, help="Multistart budget (overrides config)"),
        click.option("--tol", type=float, default=None, help="Certification tolerance (overrides config)"),
        click.option("--output", type=click.Path(dir_okay=False), default=None, help="Write here instead of stdout"),
        click.option("--format", "fmt", type=click.Choice(["json", "csv", "pretty"]), default="json"),
    ]
    for option in reversed(options):
        func = option(func)
    return func


def load_spec_document(spec_arg: str):
    from qes.result_store import ResultStore
    from qes.schemas import SpecDocument

    text = spec_arg.strip()
    if text.startswith("{"):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as e:
            raise InvalidInputError(f"Inline spec is not valid JSON: {e}") from e
        return SpecDocument.model_validate(data)
    return ResultStore().load(spec_arg, SpecDocument)


def resolve_problem(spec_arg: str, form, n):
    """The spec document after --n and --form, and the OdeSpec it describes."""
    from qes.canonical_forms import from_spec

    document = load_spec_document(spec_arg)
    if n is not None:
        document = document.model_copy(update={"n": n})

    if form == "raw" and document.form is not None:
        raise InvalidInputError(f"--form raw expects coefficients, the spec holds a {document.form.kind} form")
    if form not in (None, "raw"):
        if document.form is not None and document.form.kind != form:
            raise InvalidInputError(f"--form {form} does not match the spec's {document.form.kind} form")
        if document.form is None:
            converted = from_spec(document.to_spec(), form)
            document = document.model_copy(update={"form": converted, "a": None, "b": None})

    return document, document.to_spec()


def solver_config(document=None, seed=None, restarts=None, tol=None):
    """Precedence: command-line flags, then the spec file's solver block, then settings."""
    from qes.models import SolverConfig

    cfg = SolverConfig.from_settings()
    if document is not None and document.solver is not None:
        cfg = document.solver.apply(cfg)
    return cfg.with_overrides(seed=seed, restarts=restarts, cert_tol=tol)


def emit(document, fmt: str, output):
    from qes.result_store import ResultStore
    from qes.serialization import render, render_pretty

    if fmt == "pretty" and output:
        buffer = io.StringIO()
        render_pretty(document, Console(file=buffer, width=120))
        text = buffer.getvalue()
    else:
        text = render(document, fmt)

    if text is None:
        return
    if output:
        ResultStore().write_text(output, text)
    else:
        click.echo(text, nl=False)


@click.group()
@click.option("--verbose", is_flag=True, help="Debug output on stderr")
def cli(verbose):
    configure_logging(verbose)


@cli.command()
@problem_options
@output_options
@exit_codes
def solve(spec_arg, form, n, seed, restarts, tol, output, fmt):
    from qes.models import SolveStats
    from qes.schemas import SolutionRecord, SolutionSetDocument
    from qes.solver import solve_all

    document, spec = resolve_problem(spec_arg, form, n)
    cfg = solver_config(document, seed, restarts, tol)
    stats = SolveStats()
    solutions = solve_all(spec, cfg, stats)

    emit(
        SolutionSetDocument(
            spec=document,
            seed=cfg.seed,
            solutions=[SolutionRecord.from_solution(s) for s in solutions],
            stats=stats.to_dict(),
            x_multiple_roots=spec.x_has_multiple_roots(),
        ),
        fmt,
        output,
    )
    return EXIT_OK


@cli.command()
@click.argument("solution_file", type=click.Path(dir_okay=False))
@click.option("--spec", "spec_file", type=click.Path(dir_okay=False), default=None, help="Spec file (default: the one embedded in the solutions)")
@click.option("--tol", type=float, default=None, help="Certification tolerance (overrides config)")
@exit_codes
def verify(solution_file, spec_file, tol):
    from qes.verify import run_verify

    return run_verify(Path(solution_file), Path(spec_file) if spec_file else None, solver_config(tol=tol))


@cli.group()
def oracle():
    """Independent solvers to cross-check the Bethe route."""


def _oracle_document(document, spec, cfg, solutions):
    from qes.schemas import SolutionRecord, SolutionSetDocument

    return SolutionSetDocument(
        spec=document,
        seed=cfg.seed,
        solutions=[SolutionRecord.from_oracle(spec, s, cfg) for s in solutions],
        x_multiple_roots=spec.x_has_multiple_roots(),
    )


@oracle.command()
@problem_options
@output_options
@exit_codes
def sl2(spec_arg, form, n, seed, restarts, tol, output, fmt):
    from qes.oracle import build_sl2_matrix, sl2_solutions

    document, spec = resolve_problem(spec_arg, form, n)
    cfg = solver_config(document, seed, restarts, tol)
    solutions = sl2_solutions(build_sl2_matrix(spec), cfg)
    logger.info(f"sl(2) oracle: {len(solutions)} eigen-solution(s) for n={spec.n}")
    emit(_oracle_document(document, spec, cfg, solutions), fmt, output)
    return EXIT_OK


@oracle.command()
@problem_options
@output_options
@exit_codes
def coeffs(spec_arg, form, n, seed, restarts, tol, output, fmt):
    from qes.oracle import coeff_system_solve

    document, spec = resolve_problem(spec_arg, form, n)
    cfg = solver_config(document, seed, restarts, tol)
    solutions = coeff_system_solve(spec, cfg)
    logger.info(f"Coefficient oracle: {len(solutions)} solution(s) for n={spec.n}")
    emit(_oracle_document(document, spec, cfg, solutions), fmt, output)
    return EXIT_OK


@cli.command()
@click.option("--family", type=click.Choice(["heun", "gheun1", "dependent"]), default=None, help="Default: every family in the experiments file")
@click.option("--n", "degrees", type=int, multiple=True, help="Degrees to count (repeatable)")
@click.option("--trials", type=int, default=None, help="Random specs per degree (overrides experiments file)")
@click.option("--experiments", type=click.Path(dir_okay=False), default=None, help="Experiments YAML")
@output_options
@exit_codes
def count(family, degrees, trials, experiments, seed, restarts, tol, output, fmt):
    from qes.config_loader import ConfigLoader
    from qes.counting import run_count
    from qes.schemas import CountDocument, CountRecord

    config = ConfigLoader(Path(experiments) if experiments else settings.experiments_file).load()
    cfg = solver_config(seed=seed, restarts=restarts, tol=tol)
    if family:
        configured = config.counting.families.get(family)
        families = {family: configured.n if configured else [1, 2]}
    else:
        families = {name: fam.n for name, fam in config.counting.families.items()}

    records = []
    for name, ns in families.items():
        for n in degrees or ns:
            report = run_count(name, n, trials or config.counting.trials, cfg, config.counting.max_rounds)
            records.append(CountRecord.from_report(report))

    emit(CountDocument(seed=cfg.seed, counts=records), fmt, output)
    return EXIT_OK


@cli.group()
def app():
    """The physical applications, each solved as an augmented Bethe system."""


def _emit_app(system, params, solutions, stats, cfg, fmt, output):
    from qes.schemas import AugmentedRecord, AugmentedSetDocument

    emit(
        AugmentedSetDocument(
            system=system,
            inputs=asdict(params),
            seed=cfg.seed,
            solutions=[AugmentedRecord.from_app(s) for s in solutions],
            stats=stats.to_dict(),
        ),
        fmt,
        output,
    )
    return EXIT_OK


@app.command("two-electron")
@click.option("--delta", type=float, required=True)
@click.option("--gamma", type=float, required=True)
@click.option("--n", type=int, default=1, show_default=True)
@click.option("--all", "include_discarded", is_flag=True, help="Also list solutions with R <= 0 or complex R")
@output_options
@exit_codes
def two_electron_cmd(delta, gamma, n, include_discarded, seed, restarts, tol, output, fmt):
    from qes.applications import two_electron
    from qes.models import SolveStats

    params = two_electron.TwoElectronParams(delta, gamma, n)
    cfg = solver_config(seed=seed, restarts=restarts, tol=tol)
    stats = SolveStats()
    found = two_electron.solve(params, cfg, stats, include_discarded=include_discarded)
    return _emit_app(two_electron.SYSTEM, params, found, stats, cfg, fmt, output)


@app.command("phi6")
@click.option("--mu", type=float, default=1.0, show_default=True)
@click.option("--n", type=int, default=2, show_default=True)
@click.option("--s-low", type=float, default=1e-3, show_default=True, help="Lower end of the 1/eps^2 start box")
@click.option("--s-high", type=float, default=10.0, show_default=True)
@output_options
@exit_codes
def phi6_cmd(mu, n, s_low, s_high, seed, restarts, tol, output, fmt):
    from qes.applications import phi6
    from qes.models import SolveStats

    params = phi6.Phi6Params(mu, n, s_low, s_high)
    cfg = solver_config(seed=seed, restarts=restarts, tol=tol)
    stats = SolveStats()
    return _emit_app(phi6.SYSTEM, params, phi6.solve(params, cfg, stats), stats, cfg, fmt, output)


@app.command("rn")
@click.option("--n", type=int, default=0, show_default=True)
@click.option("--unknown", "unknowns", type=click.Choice(["a", "m_s", "g_m"]), multiple=True, help="Parameters to solve for (default: a, m_s)")
@click.option("--a", type=float, default=0.0, help="Fixed a when not an unknown")
@click.option("--m-s", type=float, default=0.0, help="Fixed m_s when not an unknown")
@click.option("--r-minus", type=float, default=0.5, show_default=True, help="Inner horizon when g_m is fixed")
@click.option("--branch", type=click.Choice(["+", "-", "both"]), default="both", show_default=True)
@output_options
@exit_codes
def rn_cmd(n, unknowns, a, m_s, r_minus, branch, seed, restarts, tol, output, fmt):
    from qes.applications import reissner_nordstrom
    from qes.models import SolveStats

    params = reissner_nordstrom.RNParams(
        n=n,
        unknowns=tuple(unknowns) or ("a", "m_s"),
        a=a,
        m_s=m_s,
        r_minus=r_minus,
        branches=reissner_nordstrom.BRANCHES if branch == "both" else (branch,),
    )
    cfg = solver_config(seed=seed, restarts=restarts, tol=tol)
    stats = SolveStats()
    found = reissner_nordstrom.solve(params, cfg, stats)
    return _emit_app(reissner_nordstrom.SYSTEM, params, found, stats, cfg, fmt, output)


@app.command("dirac")
@click.option("--l", type=int, default=0, show_default=True)
@click.option("--n", type=int, default=0, show_default=True)
@click.option("--m-e", type=float, default=1.0, show_default=True)
@click.option("--z", "charge", type=float, default=1.0, show_default=True, help="Nuclear charge Z when fixed")
@click.option("--unknown", "unknowns", type=click.Choice(["E", "Z", "eB"]), multiple=True, help="Default: E, eB for n=0, else E, Z, eB")
@output_options
@exit_codes
def dirac_cmd(l, n, m_e, charge, unknowns, seed, restarts, tol, output, fmt):
    from qes.applications import dirac
    from qes.models import SolveStats

    params = dirac.DiracParams(l=l, n=n, m_e=m_e, Z=charge, unknowns=tuple(unknowns) or None)
    cfg = solver_config(seed=seed, restarts=restarts, tol=tol)
    stats = SolveStats()
    return _emit_app(dirac.SYSTEM, params, dirac.solve(params, cfg, stats), stats, cfg, fmt, output)


@app.command("decatic")
@click.option("--lambda1", type=float, required=True)
@click.option("--lambda2", type=float, required=True)
@click.option("--n", type=int, default=0, show_default=True)
@click.option("--dimension", type=int, default=3, show_default=True, help="Spatial dimension N")
@click.option("--l", type=int, default=0, show_default=True)
@output_options
@exit_codes
def decatic_cmd(lambda1, lambda2, n, dimension, l, seed, restarts, tol, output, fmt):
    from qes.applications import decatic
    from qes.models import SolveStats

    params = decatic.DecaticParams(lambda1, lambda2, n, N=dimension, l=l)
    cfg = solver_config(seed=seed, restarts=restarts, tol=tol)
    stats = SolveStats()
    return _emit_app(decatic.SYSTEM, params, decatic.solve(params, cfg, stats), stats, cfg, fmt, output)


@cli.command()
@click.option("--experiments", type=click.Path(dir_okay=False), default=None, help="Experiments YAML")
@click.option("--criterion", "only", type=int, multiple=True, help="Run only these criteria (repeatable)")
@output_options
@exit_codes
def report(experiments, only, seed, restarts, tol, output, fmt):
    from qes.config_loader import ConfigLoader
    from qes.report import run_report
    from qes.serialization import render_pretty, to_csv

    logger.info("\n" + "=" * 60 + "\nVALIDATION REPORT\n" + "=" * 60)
    config = ConfigLoader(Path(experiments) if experiments else settings.experiments_file).load()
    cfg = solver_config(seed=seed, restarts=restarts, tol=tol)
    document, code = run_report(cfg, config, output, only=list(only) or None)

    if fmt == "pretty":
        render_pretty(document)
    elif fmt == "csv":
        click.echo(to_csv(document), nl=False)
    logger.info(f"Report written to {output or settings.report_file}" + "\n" + "=" * 60)
    return code


if __name__ == "__main__":
    cli()
