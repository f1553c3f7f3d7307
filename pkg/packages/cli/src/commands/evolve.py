"""
Evolve Command

This module propagates probabilities in time without reconstructing the state:
- Builds the real generator L from a Hamiltonian file
- Integrates dP/dt = L P with fixed-step RK4 and writes the trajectory CSV
- Tracks the conserved normalization functional
- Optionally compares every row with exact unitary propagation
"""

import math
from pathlib import Path

import numpy as np
import typer

from packages.evrep.src.io.formats import write_trajectory
from packages.evrep.src.tomo.dynamics import (
    evolution_generator,
    exact_propagate,
    normalization_functional,
    trajectory,
)
from packages.evrep.src.tomo.tomography import exact_probabilities

from ..utils.logger import Symbols, log
from .utils import exit_on_error, load_operator, load_quorum, load_state

# The normalization functional is a linear invariant of RK4; drift is rounding only
NORMALIZATION_DRIFT_TOL = 1e-8


def evolve(
    quorum_file: Path = typer.Argument(..., help="Quorum file", exists=True, dir_okay=False),
    state_file: Path = typer.Argument(..., help="Initial state (evrep-state/1)", exists=True, dir_okay=False),
    hamiltonian_file: Path = typer.Argument(
        ...,
        help="Hamiltonian (evrep-operator/1)",
        exists=True,
        dir_okay=False,
    ),
    t: float = typer.Option(..., "--t", help="Final time (hbar = 1)"),
    dt: float = typer.Option(..., "--dt", help="Maximum RK4 step"),
    out_path: Path = typer.Option(..., "--out", "-o", help="Trajectory CSV to write", dir_okay=False),
    every: int = typer.Option(1, "--every", help="Keep every K-th step", min=1),
    oracle: bool = typer.Option(False, "--oracle", help="Compare with exact unitary propagation"),
    tolerance: float = typer.Option(1e-6, "--tolerance", help="Maximum deviation allowed with --oracle"),
) -> None:
    """Evolve the probabilities of a state under a Hamiltonian."""
    with log.group("Evolving probabilities", emoji=Symbols.CLOCK):
        with exit_on_error("Evolution"):
            q = load_quorum(quorum_file)
            rho0 = load_state(state_file, q)
            h = load_operator(hamiltonian_file, q)
            g = evolution_generator(q, h)
            p0 = exact_probabilities(q, rho0)

            rows = trajectory(g, p0, t, dt, every)
            log.metric(len(rows), "rows")
            log.written_file(write_trajectory(out_path, rows))

            start = normalization_functional(q, p0)
            drift = max(abs(normalization_functional(q, p) - start) for _, p in rows)
            drift_ok = drift < NORMALIZATION_DRIFT_TOL
            log.check("normalization functional conserved", drift_ok, metric=f"{drift:.3e}")

            oracle_ok = True
            if oracle:
                deviation = max(
                    float(np.max(np.abs(p - exact_propagate(q, rho0, h, ti).values)))
                    for ti, p in rows
                )
                oracle_ok = math.isfinite(deviation) and deviation < tolerance
                log.check("matches exact propagation", oracle_ok, metric=f"max |dP| = {deviation:.3e}")

        if not (drift_ok and oracle_ok):
            log.error("Trajectory did not validate", {"Trajectory": str(out_path)})
            raise typer.Exit(1)
        log.success(f"Evolved to t = {t:g}")
