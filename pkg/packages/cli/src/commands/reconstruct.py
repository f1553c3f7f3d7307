"""
Reconstruct Command

This module reconstructs density matrices from probability CSVs:
- Validates the probabilities against the quorum
- Inverts them through the dual family, rho = (1/(2s+1)) sum_n P_n Q^n
- Optionally repairs the estimate to the nearest PSD, unit-trace operator
- Reports the trace residual, the smallest eigenvalue and the fidelity to a reference
"""

from pathlib import Path
from typing import Optional

import typer
from pydantic import BaseModel

from packages.evrep.src.io.formats import read_probabilities, write_json, write_state
from packages.evrep.src.tomo.tomography import (
    ProbabilityReport,
    fidelity,
    psd_project,
    reconstruct_density,
    validate_probabilities,
)

from ..utils.logger import Symbols, log
from ..utils.validation import log_probability_report, log_reconstruction
from .utils import exit_on_error, load_quorum, load_state


class ReconstructionReport(BaseModel):
    """Diagnostics of one reconstruction."""
    probabilities: ProbabilityReport
    trace: float
    min_eigenvalue: float
    physical: bool
    psd_repaired: bool
    fidelity: Optional[float] = None
    passed: bool


def reconstruct(
    quorum_file: Path = typer.Argument(..., help="Quorum file", exists=True, dir_okay=False),
    prob_csv: Path = typer.Argument(..., help="Probability CSV", exists=True, dir_okay=False),
    out_path: Path = typer.Option(..., "--out", "-o", help="State file to write", dir_okay=False),
    psd_repair: bool = typer.Option(
        False,
        "--psd-repair",
        help="Clip negative eigenvalues and renormalize the estimate",
    ),
    reference: Optional[Path] = typer.Option(
        None,
        "--reference",
        help="Reference state for the Uhlmann fidelity",
        exists=True,
        dir_okay=False,
    ),
    report_path: Optional[Path] = typer.Option(None, "--report", help="Write diagnostics as JSON", dir_okay=False),
) -> None:
    """Reconstruct a density matrix from measured or exact probabilities."""
    with log.group("Reconstructing state", emoji=Symbols.MAGNIFIER):
        with exit_on_error("Reconstruction"):
            q = load_quorum(quorum_file)
            p = read_probabilities(prob_csv, q.scheme)
            log.detail(
                "Exact probabilities" if p.exact else f"Sampled probabilities ({p.shots} shots)",
            )
            with log.group("Validating probabilities"):
                prob_report = validate_probabilities(q, p)
                log_probability_report(prob_report)

            result = reconstruct_density(q, p)
            log_reconstruction(result)
            rho = result.density
            if psd_repair:
                rho = psd_project(rho)
                log.detail("Projected onto PSD unit-trace operators")

            fid = None
            if reference is not None:
                fid = fidelity(load_state(reference, q), rho)
                log.metric(f"{fid:.12f}", "fidelity to reference")

            log.written_file(write_state(out_path, rho))
            passed = prob_report.passed and (result.is_physical or psd_repair or not p.exact)
            report = ReconstructionReport(
                probabilities=prob_report,
                trace=result.trace,
                min_eigenvalue=result.min_eigenvalue,
                physical=result.is_physical,
                psd_repaired=psd_repair,
                fidelity=fid,
                passed=passed,
            )
            if report_path is not None:
                log.written_file(write_json(report_path, report))

        if not passed:
            log.error("Reconstruction did not validate", {"Probabilities": str(prob_csv)})
            raise typer.Exit(1)
        log.success("State reconstructed")
