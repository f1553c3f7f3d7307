"""
CLI Commands Package Initialization

This package implements the evrep commands:
- Quorum construction (quorum.py)
- Measurement simulation (simulate.py)
- State reconstruction (reconstruct.py)
- Stratonovich-Weyl checks (check.py)
- Probability-space evolution (evolve.py)
- Shot-noise scaling study (scaling.py)

The package uses Typer for command-line interface management; every command
is deterministic given its flags and seed and exits 0 only when its
validations pass.
"""

import typer

from . import check, evolve, quorum, reconstruct, scaling, simulate

# Create the CLI app
app = typer.Typer(
    help="evrep - coherent-state spin tomography in the expectation-value representation",
    add_completion=False,
    no_args_is_help=True,
)

# Register commands
app.command()(quorum.quorum)
app.command()(simulate.simulate)
app.command()(reconstruct.reconstruct)
app.command()(check.check)
app.command()(evolve.evolve)
app.command()(scaling.scaling)


def get_app() -> typer.Typer:
    """Get the CLI application instance."""
    return app
