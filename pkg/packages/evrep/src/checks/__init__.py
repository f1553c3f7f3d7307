"""Generalized Stratonovich-Weyl checks for a quorum and its dual."""

from .swcheck import (
    CheckReport,
    SuiteReport,
    biorthogonality_matrix,
    check_biorthogonality,
    check_completeness,
    check_covariance,
    check_hermiticity,
    check_inversion_duality,
    run_suite,
)
