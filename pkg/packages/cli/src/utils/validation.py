"""
Validation Utilities Module

This module provides input validation for the evrep CLI:
- Parsing of comma-separated number lists given on the command line
- Rotation-axis parsing and normalization checks
- Logging of probability and reconstruction diagnostics as check lines
"""

import math
from typing import List, Optional

import typer

from packages.evrep.src.tomo.tomography import ProbabilityReport, Reconstruction

from .logger import log

AXIS_ATOL = 1e-9


def parse_float_list(text: Optional[str], option: str) -> Optional[List[float]]:
    """
    Parse "a,b,c" into floats.

    Args:
        text: Raw option value; None passes through
        option: Option name for error messages

    Returns:
        The parsed values, or None

    Raises:
        typer.BadParameter: For empty items or non-finite numbers
    """
    if text is None:
        return None
    items = [item.strip() for item in text.split(",")]
    if not items or any(not item for item in items):
        raise typer.BadParameter(f"{option} expects a comma-separated list of numbers")
    try:
        values = [float(item) for item in items]
    except ValueError:
        raise typer.BadParameter(f"{option} expects numbers, got {text!r}")
    if not all(math.isfinite(v) for v in values):
        raise typer.BadParameter(f"{option} values must be finite")
    return values


def parse_int_list(text: str, option: str) -> List[int]:
    """Parse "a,b,c" into positive integers (scientific notation such as 1e4 is accepted)."""
    values = parse_float_list(text, option) or []
    if any(v != int(v) or v < 1 for v in values):
        raise typer.BadParameter(f"{option} expects positive integers, got {text!r}")
    return [int(v) for v in values]


def parse_axis(text: str) -> List[float]:
    """Parse a unit rotation axis "x,y,z"."""
    values = parse_float_list(text, "--axis") or []
    if len(values) != 3:
        raise typer.BadParameter(f"--axis expects three components, got {len(values)}")
    norm = math.sqrt(sum(v * v for v in values))
    if abs(norm - 1.0) > AXIS_ATOL:
        raise typer.BadParameter(f"--axis must have unit length, got |axis| = {norm:.12f}")
    return values


def log_probability_report(report: ProbabilityReport) -> bool:
    """Log each probability constraint as a check line; returns report.passed."""
    if not report.length_ok:
        log.check("one probability per quorum direction", False)
        return False
    log.check("0 <= P_n <= 1", report.in_unit_interval, metric=f"[{report.min_value:.6g}, {report.max_value:.6g}]")
    log.check(
        f"0 < sum P_n < {report.upper_bound:g}",
        report.sum_in_bounds,
        metric=f"sum = {report.total:.12g}",
    )
    label = "normalization residual" + ("" if report.exact else " (sampled, not gating)")
    log.check(label, report.normalization_ok or not report.exact, metric=f"{report.normalization_residual:.3e}")
    return report.passed


def log_reconstruction(result: Reconstruction) -> None:
    log.metric(f"{abs(result.trace - 1.0):.3e}", "trace residual |Tr rho - 1|")
    log.metric(f"{result.min_eigenvalue:.6g}", "smallest eigenvalue")
    if not result.is_physical:
        log.warning("Reconstructed operator is not a physical state", [
            {"key": "trace", "value": f"{result.trace:.12g}"},
            {"key": "lambda_min", "value": f"{result.min_eigenvalue:.6g}"},
        ])
