"""
CLI Utilities Module

This module provides common utilities for the evrep commands, including:
- Translating library errors into a logged error block and exit status 1
- Loading quorum, state and operator files with consistent logging
- Resolving the run configuration from flags, environment and evrep.toml
"""

from contextlib import contextmanager
from pathlib import Path
from typing import Iterator, Optional

import typer

from packages.evrep.src.core.exceptions import (
    DimensionMismatchError,
    EvrepError,
    FileFormatError,
    IllConditionedSchemeError,
)
from packages.evrep.src.core.types import HermitianOperator
from packages.evrep.src.frames.quorum import Quorum
from packages.evrep.src.io.formats import OPERATOR_FORMAT, QuorumFile, read_operator, read_quorum, read_state
from packages.evrep.src.tomo.tomography import DensityMatrix

from ..utils.config import RunConfig, load_run_config
from ..utils.logger import Symbols, log

CONDITION_RTOL = 1e-6


def _error_details(e: Exception) -> dict:
    details = {"Error": str(e)}
    if isinstance(e, IllConditionedSchemeError) and e.report is not None:
        details.update({
            "lambda_min": f"{e.report.lambda_min:.6e}",
            "lambda_max": f"{e.report.lambda_max:.6e}",
            "condition number": f"{e.condition_number:.6e}",
        })
    elif isinstance(e, FileFormatError):
        details["File"] = e.path
    elif isinstance(e, DimensionMismatchError):
        details.update({"expected": str(e.expected), "got": str(e.got)})
    return details


@contextmanager
def exit_on_error(action: str) -> Iterator[None]:
    """
    Log library and configuration errors raised inside the block and exit with status 1.

    Args:
        action: What was being done, used as the error heading
    """
    try:
        yield
    except (EvrepError, ValueError) as e:
        log.error(f"{action} failed", _error_details(e))
        raise typer.Exit(1)


def run_config(**flags: Optional[int]) -> RunConfig:
    """Resolve the run configuration, exiting on invalid settings."""
    with exit_on_error("Configuration"):
        return load_run_config(**flags)


def load_quorum(path: Path) -> Quorum:
    """Read a quorum file and rebuild the quorum, logging its size and conditioning."""
    q, data = read_quorum(path)
    log.detail(f"{Symbols.FOLDER} Quorum: {path}", metric=f"{q.two_s}, N = {q.size}")
    condition_number_agrees(q, data)
    return q


def condition_number_agrees(q: Quorum, data: QuorumFile) -> bool:
    """Compare the stored condition number with the rebuilt one (relative 1e-6), warning on mismatch."""
    stored, rebuilt = data.condition_number, q.condition_number
    agrees = abs(stored - rebuilt) <= CONDITION_RTOL * max(1.0, abs(rebuilt))
    if not agrees:
        log.warning("Stored condition number differs from the rebuilt quorum", [
            {"key": "stored", "value": f"{stored:.12g}"},
            {"key": "rebuilt", "value": f"{rebuilt:.12g}"},
        ])
    return agrees


def load_state(path: Path, q: Quorum) -> DensityMatrix:
    rho = read_state(path)
    if rho.dim != q.dim:
        raise DimensionMismatchError("state", q.dim, rho.dim)
    log.detail(f"{Symbols.FOLDER} State: {path}", metric=f"Tr = {rho.trace():.12g}")
    return rho


def load_operator(path: Path, q: Quorum) -> HermitianOperator:
    op = read_operator(path, OPERATOR_FORMAT)
    if op.dim != q.dim:
        raise DimensionMismatchError("operator", q.dim, op.dim)
    log.detail(f"{Symbols.FOLDER} Operator: {path}")
    return op
