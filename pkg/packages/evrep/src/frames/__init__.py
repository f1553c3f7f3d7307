"""
Frames Package Module

This package provides the quorum and its symbol calculus:
- Direction schemes, Gram metric, dual family and condition reports
- Lower/upper symbols, reconstruction and trace pairings
"""

from .quorum import (
    CommutatorWitness,
    ConditionReport,
    DirectionScheme,
    Quorum,
    build_quorum,
    clustered_directions,
    commutator_witness,
    condition_report,
    gram_matrix,
    metric_lower,
    metric_raise,
    rotated,
    standard_directions,
)
from .symbols import (
    SymbolVector,
    Variance,
    lower_symbol,
    reconstruct_from_lower,
    reconstruct_from_upper,
    trace_pairing,
    upper_symbol,
)
