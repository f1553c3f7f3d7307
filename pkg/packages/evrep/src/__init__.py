"""
evrep

Coherent-state spin tomography and the expectation-value representation:
a spin-s state is carried by the (2s+1)^2 Stern-Gerlach probabilities of a
quorum of coherent-state projectors, reconstructed through the dual family,
and evolved directly in probability space.
"""

from .checks import CheckReport, SuiteReport, run_suite
from .core import (
    Direction,
    EvrepError,
    HermitianOperator,
    StateVector,
    TwoS,
    coherent_state,
    rotation_operator,
    spin_operators,
)
from .frames import (
    DirectionScheme,
    Quorum,
    build_quorum,
    condition_report,
    lower_symbol,
    reconstruct_from_lower,
    reconstruct_from_upper,
    standard_directions,
    trace_pairing,
    upper_symbol,
)
from .tomo import (
    DensityMatrix,
    ProbabilityVector,
    evolution_generator,
    exact_probabilities,
    fidelity,
    propagate,
    reconstruct_density,
    sample_counts,
    validate_probabilities,
)

__version__ = "1.0.0"

__all__ = [
    # Core
    "TwoS",
    "Direction",
    "StateVector",
    "HermitianOperator",
    "EvrepError",
    "spin_operators",
    "rotation_operator",
    "coherent_state",

    # Quorum and symbols
    "DirectionScheme",
    "Quorum",
    "standard_directions",
    "build_quorum",
    "condition_report",
    "lower_symbol",
    "upper_symbol",
    "reconstruct_from_lower",
    "reconstruct_from_upper",
    "trace_pairing",

    # Tomography and dynamics
    "DensityMatrix",
    "ProbabilityVector",
    "exact_probabilities",
    "sample_counts",
    "reconstruct_density",
    "validate_probabilities",
    "fidelity",
    "evolution_generator",
    "propagate",

    # Checks
    "CheckReport",
    "SuiteReport",
    "run_suite",
]
