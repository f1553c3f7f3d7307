"""
Core Package Module

This package provides the substrate every other evrep package builds on:
- Value types (TwoS, Direction, StateVector, HermitianOperator, RotationOperator)
- The exception hierarchy rooted at EvrepError
- Spin operators, rotations and coherent spin states
"""

from .exceptions import (
    DegenerateStateError,
    DimensionMismatchError,
    EvrepError,
    FileFormatError,
    IllConditionedSchemeError,
    InvalidStateError,
    SchemeError,
    ValidationError,
)
from .spincore import (
    adequate_grid_order,
    coherent_projector,
    coherent_state,
    coherent_state_matrix,
    hermitian_exp,
    overlap,
    overlap_law,
    resolution_of_identity_residual,
    rotation_matrix,
    rotation_operator,
    spin_operators,
    spin_projection,
)
from .types import (
    Direction,
    HermitianOperator,
    RotationOperator,
    StateVector,
    TwoS,
)
