"""
Scaling Command

This module measures how the reconstruction error falls with the shot count:
- Median max-norm error over seeded trials for each shot count
- Least-squares log-log slope, expected near -1/2 for binomial noise
- Trials optionally spread over a thread pool
"""

from pathlib import Path
from typing import Optional

import typer

from packages.evrep.src.io.formats import write_json
from packages.evrep.src.tomo.tomography import shot_noise_scaling

from ..utils.logger import Symbols, log
from ..utils.validation import parse_int_list
from .utils import exit_on_error, load_quorum, load_state, run_config

EXPECTED_SLOPE = -0.5
SLOPE_TOLERANCE = 0.15
DEFAULT_GRID = "100,1000,10000,100000,1000000"


def scaling(
    quorum_file: Path = typer.Argument(..., help="Quorum file", exists=True, dir_okay=False),
    state_file: Path = typer.Argument(..., help="State file (evrep-state/1)", exists=True, dir_okay=False),
    shots_grid: str = typer.Option(DEFAULT_GRID, "--shots-grid", help="Comma-separated shot counts"),
    seeds: int = typer.Option(20, "--seeds", help="Trials per shot count", min=1),
    jobs: Optional[int] = typer.Option(None, "--jobs", help="Worker threads (default EVREP_JOBS or 1)"),
    seed: Optional[int] = typer.Option(None, "--seed", help="Base seed (default EVREP_SEED or 0)"),
    out_path: Optional[Path] = typer.Option(None, "--out", "-o", help="Scaling report JSON", dir_okay=False),
) -> None:
    """Fit the log-log slope of reconstruction error against shots."""
    config = run_config(seed=seed, jobs=jobs)
    grid = parse_int_list(shots_grid, "--shots-grid")

    with log.group("Shot-noise scaling", emoji=Symbols.CHART):
        with exit_on_error("Scaling study"):
            q = load_quorum(quorum_file)
            rho = load_state(state_file, q)
            log.detail(f"{len(grid)} shot counts x {seeds} seeds", metric=f"{config.jobs} worker(s)")
            report = shot_noise_scaling(q, rho, grid, seeds=seeds, base_seed=config.seed, jobs=config.jobs)
            for m, err in zip(report.shots, report.median_errors):
                log.metric(f"{err:.4e}", f"median error at {m} shots")
            passed = abs(report.slope - EXPECTED_SLOPE) <= SLOPE_TOLERANCE
            log.check(
                f"slope within {EXPECTED_SLOPE} +/- {SLOPE_TOLERANCE}",
                passed,
                metric=f"{report.slope:.4f}",
            )
            if out_path is not None:
                log.written_file(write_json(out_path, report))

        if not passed:
            log.error("Error does not scale like shot noise", {"slope": f"{report.slope:.4f}"})
            raise typer.Exit(1)
        log.success("Shot-noise scaling confirmed")
