"""Independent re-certification of a saved solution set."""
from pathlib import Path
from typing import Optional

from loguru import logger
from pydantic import ValidationError

from qes.bethe import bae_residual_norm, guard_violation, ode_residual
from qes.errors import EXIT_FAILURE, EXIT_INVALID, EXIT_OK, QESError
from qes.models import SolverConfig
from qes.result_store import ResultStore
from qes.schemas import SolutionSetDocument, SpecDocument


def run_verify(
    solution_file: Path,
    spec_file: Optional[Path] = None,
    cfg: Optional[SolverConfig] = None,
    store: Optional[ResultStore] = None,
) -> int:
    """0 when every claimed solution certifies, 1 on any failure, 2 on malformed input."""
    store = store or ResultStore()
    try:
        document = store.load(solution_file, SolutionSetDocument)
        spec_document = store.load(spec_file, SpecDocument) if spec_file else document.spec
        spec = spec_document.to_spec()
        cfg = cfg or SolverConfig.from_settings()
        if spec_document.solver is not None:
            cfg = spec_document.solver.apply(cfg)
    except (QESError, ValidationError) as e:
        logger.error(f"Cannot verify {solution_file}: {e}")
        return EXIT_INVALID

    if not document.solutions:
        logger.warning(f"{solution_file} holds no solutions; nothing to certify")
        return EXIT_OK

    failures = 0
    for index, record in enumerate(document.solutions):
        if len(record.roots) != spec.n:
            logger.error(f"solution {index}: {len(record.roots)} roots for n={spec.n}")
            failures += 1
            continue
        try:
            ode = ode_residual(spec, record.roots, record.c2, record.c1, record.c0)
            bae = bae_residual_norm(spec, record.roots)
            violation = guard_violation(spec, record.roots, cfg)
        except QESError as e:
            logger.error(f"solution {index}: {e}")
            return EXIT_INVALID

        ok = ode <= cfg.cert_tol and bae <= cfg.cert_tol and violation is None
        if ok:
            logger.debug(f"solution {index}: certified (ODE {ode:.2e}, BAE {bae:.2e})")
        else:
            reason = violation or f"ODE {ode:.2e}, BAE {bae:.2e} > {cfg.cert_tol:.0e}"
            logger.error(f"solution {index}: not certified ({reason})")
            failures += 1

    if failures:
        logger.error(f"{failures} of {len(document.solutions)} solution(s) failed certification")
        return EXIT_FAILURE
    logger.success(f"All {len(document.solutions)} solution(s) certified")
    return EXIT_OK
