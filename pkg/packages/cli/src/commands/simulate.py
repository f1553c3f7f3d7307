"""
Simulate Command

This module simulates Stern-Gerlach experiments on a quorum:
- Exact probabilities P_n = <n_n|rho|n_n> for a stored state
- Optional binomial sampling with a fixed number of shots per direction
- Validation of the probability constraints before the CSV is written
"""

from pathlib import Path
from typing import Optional

import typer

from packages.evrep.src.io.formats import write_probabilities
from packages.evrep.src.tomo.tomography import (
    exact_probabilities,
    sample_counts,
    validate_probabilities,
)

from ..utils.logger import Symbols, log
from ..utils.validation import log_probability_report
from .utils import exit_on_error, load_quorum, load_state, run_config


def simulate(
    quorum_file: Path = typer.Argument(..., help="Quorum file", exists=True, dir_okay=False),
    state_file: Path = typer.Argument(..., help="State file (evrep-state/1)", exists=True, dir_okay=False),
    out_path: Path = typer.Option(..., "--out", "-o", help="Probability CSV to write", dir_okay=False),
    shots: Optional[int] = typer.Option(
        None,
        "--shots",
        help="Shots per direction; implies sampling",
    ),
    sample: bool = typer.Option(
        False,
        "--sample",
        help="Sample with the configured shot count (EVREP_SHOTS, evrep.toml, default 10000)",
    ),
    seed: Optional[int] = typer.Option(None, "--seed", help="Random seed (default EVREP_SEED or 0)"),
) -> None:
    """Compute the probabilities of a state on a quorum, exactly or with finite shots."""
    config = run_config(seed=seed, shots=shots)
    sampled = sample or shots is not None

    with log.group("Simulating measurements", emoji=Symbols.DICE):
        with exit_on_error("Simulation"):
            q = load_quorum(quorum_file)
            rho = load_state(state_file, q)
            p = exact_probabilities(q, rho)
            if sampled:
                log.detail(f"Sampling {config.shots} shots per direction", metric=f"seed {config.seed}")
                p = sample_counts(p, config.shots, config.seed)
            else:
                log.detail("Exact probabilities")

            with log.group("Validating probabilities", emoji=Symbols.MAGNIFIER):
                passed = log_probability_report(validate_probabilities(q, p))
            log.written_file(write_probabilities(out_path, q.scheme, p))

        if not passed:
            log.error("Probabilities violate their constraints", {"File": str(out_path)})
            raise typer.Exit(1)
        log.success(f"Simulated {q.size} directions")
