"""
Tomography Package Module

This package provides state reconstruction and probability-space dynamics:
- Exact and sampled Stern-Gerlach probabilities, linear reconstruction, diagnostics
- The evolution generator L and its fixed-step integrator
"""

from .dynamics import (
    EvolutionGenerator,
    evolution_generator,
    evolve_density,
    exact_propagate,
    finite_difference_rate,
    normalization_functional,
    propagate,
    trajectory,
)
from .tomography import (
    DensityMatrix,
    ProbabilityReport,
    ProbabilityVector,
    Reconstruction,
    ScalingReport,
    exact_probabilities,
    fidelity,
    normalization_weights,
    normalize,
    psd_project,
    random_density_matrix,
    random_pure_state,
    reconstruct_density,
    sample_counts,
    shot_noise_scaling,
    validate_probabilities,
)
