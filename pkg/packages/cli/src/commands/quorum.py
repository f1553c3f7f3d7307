"""
Quorum Command

This module builds quorum files. It provides functionality to:
- Generate the standard cone scheme for a spin, or one with overridden cone angles/offsets
- Report the Gram-matrix spectrum before any dual is built
- Refuse ill-conditioned schemes with the condition report attached
- Write the versioned quorum file (and optionally the condition report)
"""

from pathlib import Path
from typing import Optional

import typer

from packages.evrep.src.core.types import TwoS
from packages.evrep.src.frames.quorum import (
    DirectionScheme,
    build_quorum,
    commutator_witness,
    condition_report,
    standard_directions,
)
from packages.evrep.src.io.formats import write_json, write_quorum

from ..utils.logger import Symbols, log
from ..utils.validation import parse_float_list
from .utils import exit_on_error


def _scheme(two_s: int, cone_thetas: Optional[str], phi_offsets: Optional[str]) -> DirectionScheme:
    standard = standard_directions(TwoS(two_s))
    thetas = parse_float_list(cone_thetas, "--cone-thetas")
    offsets = parse_float_list(phi_offsets, "--phi-offsets")
    if thetas is None and offsets is None:
        return standard
    return DirectionScheme.from_cones(
        standard.two_s,
        thetas if thetas is not None else standard.cone_thetas,
        offsets if offsets is not None else standard.cone_phi_offsets,
    )


def quorum(
    out_path: Path = typer.Argument(
        ...,
        help="Where to write the quorum file",
        dir_okay=False,
        writable=True,
    ),
    two_s: int = typer.Option(..., "--two-s", help="Twice the spin (2s >= 1)"),
    cone_thetas: Optional[str] = typer.Option(
        None,
        "--cone-thetas",
        help="Comma-separated cone opening angles, 2s+1 values strictly increasing in (0, pi)",
    ),
    phi_offsets: Optional[str] = typer.Option(
        None,
        "--phi-offsets",
        help="Comma-separated azimuth offsets, one per cone",
    ),
    report_path: Optional[Path] = typer.Option(
        None,
        "--report",
        help="Also write the condition report as JSON",
        dir_okay=False,
    ),
) -> None:
    """Build a quorum of coherent-state projectors and write it to a file."""
    with log.group("Building quorum", emoji=Symbols.ATOM):
        with exit_on_error("Quorum construction"):
            scheme = _scheme(two_s, cone_thetas, phi_offsets)
            log.detail(f"Spin {scheme.two_s}", metric=f"N = {scheme.size} directions on {scheme.two_s.dim} cones")

            report = condition_report(scheme)
            log.metric(f"{report.lambda_min:.6e}", "lambda_min(G)")
            log.metric(f"{report.lambda_max:.6e}", "lambda_max(G)")
            log.metric(f"{report.condition_number:.6e}", "condition number")
            if report_path is not None:
                log.written_file(write_json(report_path, report))

            q = build_quorum(scheme)
            witness = commutator_witness(q)
            log.detail(
                "Largest commutator",
                metric=f"||[Q_{witness.first}, Q_{witness.second}]|| = {witness.norm:.6g}",
            )
            log.written_file(write_quorum(out_path, q))

        log.success(f"Quorum written for {scheme.two_s}")
