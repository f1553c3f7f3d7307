"""
Check Command

This module runs the generalized Stratonovich-Weyl suite on a quorum file:
- Rebuilds the quorum and compares the stored condition number
- Runs hermiticity, completeness, bi-orthogonality and covariance checks
- Adds the inversion-duality check with a seeded random operator
- Optionally perturbs the rebuilt duals as a negative control
"""

import dataclasses
import math
from pathlib import Path
from typing import Optional

import numpy as np
import typer

from packages.evrep.src.checks.swcheck import CheckReport, check_inversion_duality, run_suite
from packages.evrep.src.frames.quorum import Quorum
from packages.evrep.src.io.formats import read_quorum, write_check_report

from ..utils.logger import Symbols, log
from ..utils.validation import parse_axis
from .utils import condition_number_agrees, exit_on_error, run_config


def perturb_duals(q: Quorum, eps: float, rng: np.random.Generator) -> Quorum:
    """Add eps times a complex Gaussian matrix to every dual; the result is no longer Hermitian."""
    shape = q.duals.shape
    noise = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    duals = q.duals + eps * noise
    duals.flags.writeable = False
    return dataclasses.replace(q, duals=duals)


def check(
    quorum_file: Path = typer.Argument(..., help="Quorum file", exists=True, dir_okay=False),
    out_path: Optional[Path] = typer.Option(None, "--out", "-o", help="Check report JSON", dir_okay=False),
    perturb: float = typer.Option(
        0.0,
        "--perturb",
        help="Perturb the rebuilt duals by this amount (negative control)",
    ),
    axis: str = typer.Option("0,0,1", "--axis", help="Unit rotation axis for the covariance check"),
    angle: Optional[float] = typer.Option(
        None,
        "--angle",
        help="Rotation angle for the covariance check (default 2 pi / (2s+1))",
    ),
    seed: Optional[int] = typer.Option(None, "--seed", help="Seed for the random test operator"),
) -> None:
    """Certify the Stratonovich-Weyl properties of a quorum and its dual."""
    config = run_config(seed=seed)
    rotation_axis = parse_axis(axis)
    if angle is not None and not math.isfinite(angle):
        raise typer.BadParameter("--angle must be finite")
    rng = np.random.default_rng(config.seed)

    with log.group("Checking quorum", emoji=Symbols.MAGNIFIER):
        with exit_on_error("Check"):
            q, data = read_quorum(quorum_file)
            log.detail(f"{Symbols.FOLDER} Quorum: {quorum_file}", metric=f"{q.two_s}, N = {q.size}")
            stored_ok = condition_number_agrees(q, data)
            if perturb != 0.0:
                log.warning("Perturbing the rebuilt duals", [{"key": "eps", "value": f"{perturb:g}"}])
                q = perturb_duals(q, perturb, rng)

            suite = run_suite(q, rotation_axis, angle)
            extra = [
                check_inversion_duality(q, rng),
                CheckReport(
                    name="stored_condition_number",
                    residual=abs(data.condition_number - q.condition_number),
                    threshold=1e-6 * max(1.0, q.condition_number),
                    passed=stored_ok,
                ),
            ]
            for c in list(suite.checks) + extra:
                log.check(c.name, c.passed, metric=f"{c.residual:.3e} (< {c.threshold:g})")
            permutation = suite.checks[-1].details.get("permutation")
            if permutation is not None:
                log.detail("Rotation permutes the quorum kernels")

            passed = suite.passed and all(c.passed for c in extra)
            if out_path is not None:
                log.written_file(write_check_report(out_path, suite, extra))

        if not passed:
            log.error("Quorum failed one or more checks", {"Quorum": str(quorum_file)})
            raise typer.Exit(1)
        log.success("All checks passed")
