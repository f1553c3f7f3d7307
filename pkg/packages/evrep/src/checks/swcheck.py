"""
Generalized Stratonovich-Weyl Checks

Numerical certificates that a quorum and its dual behave like a
Stratonovich-Weyl kernel pair:
- hermiticity of Q_n and Q^n
- completeness: two resolutions of the identity with the unity symbols as coefficients
- bi-orthogonality (1/(2s+1)) Tr[Q_n Q^n'] = delta
- SU(2) covariance of the kernels and of the duals
- inversion duality: symbols are inverted by the dual kernel, not the same one

Each check returns a CheckReport and never raises on a failed property.
"""

import math
import typing

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy.spatial import cKDTree

from ..core.exceptions import EvrepError
from ..core.spincore import rotation_operator
from ..core.types import HermitianOperator, require_unit_axis
from ..frames.quorum import Quorum, build_quorum, rotated
from ..frames.symbols import lower_symbol

HERMITICITY_TOL = 1e-10
COMPLETENESS_TOL = 1e-9
BIORTHOGONALITY_TOL = 1e-9
COVARIANCE_TOL = 1e-9
ROUND_TRIP_TOL = 1e-9
# The cross-wired inversion must miss by at least this much
CROSS_WIRING_MIN = 1e-6


class CheckReport(BaseModel):
    """Result of one check: the worst residual against its threshold."""
    model_config = ConfigDict(populate_by_name=True, ser_json_inf_nan="constants")

    name: str
    residual: float
    threshold: float
    passed: bool = Field(alias="pass")
    details: typing.Dict[str, typing.Any] = Field(default_factory=dict)


class SuiteReport(BaseModel):
    """All axiom checks for one quorum."""
    two_s: int
    checks: typing.List[CheckReport]
    passed: bool


def _report(name: str, residual: float, threshold: float, **details: typing.Any) -> CheckReport:
    ok = math.isfinite(residual) and residual < threshold
    return CheckReport(name=name, residual=residual, threshold=threshold, passed=ok, details=details)


def _max_abs(a: np.ndarray) -> float:
    return float(np.max(np.abs(a))) if a.size else 0.0


def dual_scale(q: Quorum) -> float:
    """max(1, max |Q^n|): the rounding floor of explicit dual sums grows with it."""
    return max(1.0, _max_abs(q.duals))


def _hermitian_defect(stack: np.ndarray) -> float:
    return _max_abs(stack - np.conj(np.swapaxes(stack, 1, 2)))


def check_hermiticity(q: Quorum) -> CheckReport:
    """max_n of ||Q_n - Q_n^H|| and ||Q^n - (Q^n)^H||; passes below 1e-10."""
    primal = _hermitian_defect(q.kernels)
    dual = _hermitian_defect(q.duals)
    return _report("hermiticity", max(primal, dual), HERMITICITY_TOL, kernels=primal, duals=dual)


def check_completeness(q: Quorum) -> CheckReport:
    """
    Both resolutions of the identity, with the unity symbols as coefficients.

    (1/(2s+1)) sum_n Tr[Q_n] Q^n = E and (1/(2s+1)) sum_n Tr[Q^n] Q_n = E;
    also checks V_E,n = Tr[E Q_n] = 1 and V_E^n = Tr[E Q^n] = Tr[Q^n].
    Residuals involving the explicit duals are relative to dual_scale(q).
    """
    eye = np.eye(q.dim)
    scale = dual_scale(q)
    primal_traces = np.trace(q.kernels, axis1=1, axis2=2).real
    dual_traces = np.trace(q.duals, axis1=1, axis2=2).real
    via_duals = _max_abs(np.einsum("n,nij->ij", primal_traces, q.duals) / q.dim - eye) / scale
    via_kernels = _max_abs(np.einsum("n,nij->ij", dual_traces, q.kernels) / q.dim - eye) / scale

    unity = HermitianOperator.identity(q.dim)
    lower_unity = _max_abs(lower_symbol(q, unity).values - 1.0)
    upper_unity = _max_abs(q.dual_traces(eye) - dual_traces) / scale
    residual = max(via_duals, via_kernels, lower_unity, upper_unity)
    return _report(
        "completeness", residual, COMPLETENESS_TOL,
        via_duals=via_duals, via_kernels=via_kernels,
        lower_unity_symbol=lower_unity, upper_unity_symbol=upper_unity, dual_scale=scale,
    )


def biorthogonality_matrix(q: Quorum) -> np.ndarray:
    """(1/(2s+1)) Tr[Q_n Q^n'] as an N_s x N_s real matrix."""
    return np.einsum("nij,mji->nm", q.kernels, q.duals).real / q.dim


def check_biorthogonality(q: Quorum) -> CheckReport:
    """max |(1/(2s+1)) Tr[Q_n Q^n'] - delta|; passes below 1e-9."""
    residual = _max_abs(biorthogonality_matrix(q) - np.eye(q.size))
    return _report("biorthogonality", residual, BIORTHOGONALITY_TOL)


def check_covariance(q: Quorum, axis: typing.Sequence[float], angle: float) -> CheckReport:
    """
    U_R Q_n U_R^H against the projector onto the rotated direction R n_n.

    The rotated directions generally leave the scheme, so the reference
    kernels are built from scratch; the duals of the rotated scheme are
    rebuilt the same way and compared with U_R Q^n U_R^H, relative to
    dual_scale(q). When every rotated kernel coincides with an original one,
    the index permutation is reported.

    Raises:
        ValidationError: If the axis is not of unit length
    """
    a = require_unit_axis(axis)
    u = rotation_operator(q.two_s, a, angle)
    turned_kernels = u.conjugate(q.kernels)
    turned_duals = u.conjugate(q.duals)

    scheme = rotated(q.scheme, a, angle)
    try:
        reference = build_quorum(scheme)
    except EvrepError as e:
        return _report("covariance", math.inf, COVARIANCE_TOL, axis=a.tolist(), angle=angle, error=str(e))
    kernel_residual = _max_abs(turned_kernels - reference.kernels)
    dual_residual = _max_abs(turned_duals - reference.duals) / dual_scale(q)

    _, nearest = cKDTree(q.scheme.unit_vectors()).query(scheme.unit_vectors())
    match_residual = _max_abs(turned_kernels - q.kernels[nearest])
    permutation = [int(m) for m in nearest] if match_residual < COVARIANCE_TOL else None
    if permutation is not None and len(set(permutation)) != q.size:
        permutation = None

    return _report(
        "covariance", max(kernel_residual, dual_residual), COVARIANCE_TOL,
        axis=a.tolist(), angle=float(angle),
        kernels=kernel_residual, duals=dual_residual, permutation=permutation,
    )


def check_inversion_duality(q: Quorum, rng: np.random.Generator) -> CheckReport:
    """
    Symbols are inverted by the dual kernel.

    For a random Hermitian A of unit max norm the round trips through
    lower/upper symbols must reproduce A, while the cross-wired route
    (1/(2s+1)) sum_n Tr[A Q_n] Q_n, which uses the same kernel twice, must
    not. Passes iff both hold. Round-trip residuals are relative to
    dual_scale(q).
    """
    a = HermitianOperator.random(q.dim, rng).matrix
    a = a / _max_abs(a)
    scale = dual_scale(q)
    lower = lower_symbol(q, HermitianOperator(a)).values
    # raw sums over q.duals: a broken dual family need not give Hermitian results
    upper = np.einsum("ij,nji->n", a, q.duals)
    via_lower = _max_abs(np.einsum("n,nij->ij", lower, q.duals) / q.dim - a) / scale
    via_upper = _max_abs(np.einsum("n,nij->ij", upper, q.kernels) / q.dim - a) / scale
    cross_residual = _max_abs(np.einsum("n,nij->ij", lower, q.kernels) / q.dim - a)

    dual_residual = max(via_lower, via_upper)
    report = _report(
        "inversion_duality", dual_residual, ROUND_TRIP_TOL,
        via_lower=via_lower, via_upper=via_upper, cross_wired=cross_residual, dual_scale=scale,
    )
    if cross_residual < CROSS_WIRING_MIN:
        report.passed = False
    return report


def run_suite(
    q: Quorum,
    axis: typing.Optional[typing.Sequence[float]] = None,
    angle: typing.Optional[float] = None,
) -> SuiteReport:
    """
    Hermiticity, completeness, bi-orthogonality and covariance, in that order.

    The covariance rotation defaults to 2 pi / (2s+1) about z, the symmetry
    of cone schemes.
    """
    axis = (0.0, 0.0, 1.0) if axis is None else axis
    angle = 2.0 * math.pi / q.dim if angle is None else angle
    checks = [
        check_hermiticity(q),
        check_completeness(q),
        check_biorthogonality(q),
        check_covariance(q, axis, angle),
    ]
    return SuiteReport(two_s=q.two_s.two_s, checks=checks, passed=all(c.passed for c in checks))
