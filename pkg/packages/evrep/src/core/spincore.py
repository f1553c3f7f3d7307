"""
Spin Substrate Module

Linear algebra for a single spin s acting on a (2s+1)-dimensional Hilbert space:
- Spin operators from the ladder construction
- Rotation operators exp(-i angle axis.s) by spectral decomposition
- Coherent states |n> from the stereographic expansion (rotation route at the south pole)
- Overlaps and the numerical resolution of the identity

Basis convention: index k = 0..2s labels |s-k, n_z>.
"""

import math
import typing
from functools import lru_cache

import numpy as np
from scipy.spatial.transform import Rotation
from scipy.special import gammaln

from .exceptions import ValidationError
from .types import (
    SOUTH_POLE_GUARD,
    ComplexArray,
    Direction,
    HermitianOperator,
    RealArray,
    RotationOperator,
    StateVector,
    TwoS,
    require_dim,
    require_unit_axis,
)

SpinTriple = typing.Tuple[HermitianOperator, HermitianOperator, HermitianOperator]

# Above this, binomials go through log-gamma
EXACT_BINOMIAL_MAX = 60


@lru_cache(maxsize=128)
def _spin_matrices(two_s: int) -> typing.Tuple[np.ndarray, np.ndarray, np.ndarray]:
    s = two_s / 2.0
    m = s - np.arange(two_s + 1)
    s_z = np.diag(m).astype(np.complex128)
    # <m+1| s_+ |m> sits at row k-1, column k
    raising = np.zeros((two_s + 1, two_s + 1), dtype=np.complex128)
    for k in range(1, two_s + 1):
        raising[k - 1, k] = math.sqrt(s * (s + 1.0) - m[k] * (m[k] + 1.0))
    lowering = raising.conj().T
    s_x = 0.5 * (raising + lowering)
    s_y = -0.5j * (raising - lowering)
    for mat in (s_x, s_y, s_z):
        mat.flags.writeable = False
    return s_x, s_y, s_z


def spin_operators(two_s: typing.Union[TwoS, int]) -> SpinTriple:
    """
    Spin operators (s_x, s_y, s_z) for spin s = two_s / 2.

    s_z is diagonal with entries s, s-1, ..., -s; s_x and s_y come from the
    ladder operators and satisfy [s_x, s_y] = i s_z.
    """
    ts = TwoS.of(two_s)
    return tuple(HermitianOperator(m) for m in _spin_matrices(ts.two_s))  # type: ignore[return-value]


def spin_projection(two_s: typing.Union[TwoS, int], direction: Direction) -> HermitianOperator:
    """The operator s.n for the unit vector of `direction`."""
    ts = TwoS.of(two_s)
    n = direction.unit_vector()
    s_x, s_y, s_z = _spin_matrices(ts.two_s)
    return HermitianOperator(n[0] * s_x + n[1] * s_y + n[2] * s_z)


def hermitian_exp(generator: typing.Union[HermitianOperator, np.ndarray], scale: float) -> ComplexArray:
    """
    exp(-i * scale * G) for a Hermitian generator G.

    Computed from the eigen-decomposition G = V diag(w) V^H, which is exact to
    machine precision for Hermitian input.
    """
    g = generator.matrix if isinstance(generator, HermitianOperator) else np.asarray(generator)
    w, v = np.linalg.eigh(g)
    return (v * np.exp(-1j * scale * w)) @ v.conj().T


def rotation_operator(
    two_s: typing.Union[TwoS, int],
    axis: typing.Sequence[float],
    angle: float,
) -> RotationOperator:
    """
    The rotation U = exp(-i angle axis.s).

    Args:
        two_s: Spin label 2s
        axis: Unit rotation axis
        angle: Rotation angle in radians

    Raises:
        ValidationError: If the axis is not of unit length or the angle is not finite
    """
    ts = TwoS.of(two_s)
    a = require_unit_axis(axis)
    if not math.isfinite(angle):
        raise ValidationError(f"Rotation angle must be finite, got {angle}")
    s_x, s_y, s_z = _spin_matrices(ts.two_s)
    generator = a[0] * s_x + a[1] * s_y + a[2] * s_z
    return RotationOperator(hermitian_exp(generator, angle), axis=tuple(a), angle=float(angle))


def rotation_matrix(axis: typing.Sequence[float], angle: float) -> RealArray:
    """The SO(3) matrix of the rotation represented by rotation_operator(axis, angle)."""
    a = require_unit_axis(axis)
    return Rotation.from_rotvec(angle * a).as_matrix()


def _log_binomials(two_s: int) -> RealArray:
    k = np.arange(two_s + 1)
    if two_s <= EXACT_BINOMIAL_MAX:
        return np.log(np.array([math.comb(two_s, int(i)) for i in k], dtype=float))
    return gammaln(two_s + 1) - gammaln(k + 1) - gammaln(two_s - k + 1)


def _coherent_by_rotation(ts: TwoS, direction: Direction) -> ComplexArray:
    m = np.array([-math.sin(direction.phi), math.cos(direction.phi), 0.0])
    top = np.zeros(ts.dim, dtype=np.complex128)
    top[0] = 1.0
    return rotation_operator(ts, m, direction.theta).matrix @ top


def coherent_state(two_s: typing.Union[TwoS, int], direction: Direction) -> StateVector:
    """
    The coherent state |n>, eigenvector of s.n with eigenvalue s.

    Away from the south pole the stereographic expansion
        |z> = (1+|z|^2)^(-s) sum_k C(2s,k)^(1/2) z^k |s-k, n_z>
    is evaluated in log space; within 1e-9 of theta = pi the state is obtained
    by rotating |s, n_z> about m(phi) = (-sin phi, cos phi, 0) by theta, which
    fixes the phase there.
    """
    ts = TwoS.of(two_s)
    if direction.theta >= math.pi - SOUTH_POLE_GUARD:
        amps = _coherent_by_rotation(ts, direction)
        return StateVector(amps / np.linalg.norm(amps))

    z = direction.stereo()
    amps = np.zeros(ts.dim, dtype=np.complex128)
    if z == 0:
        amps[0] = 1.0
        return StateVector(amps)

    k = np.arange(ts.dim)
    log_r = math.log(abs(z))
    log_mag = 0.5 * _log_binomials(ts.two_s) + k * log_r - ts.spin * math.log1p(abs(z) ** 2)
    amps = np.exp(log_mag) * np.exp(1j * k * direction.phi)
    return StateVector(amps / np.linalg.norm(amps))


def coherent_projector(two_s: typing.Union[TwoS, int], direction: Direction) -> HermitianOperator:
    """The rank-1 projector |n><n|."""
    return coherent_state(two_s, direction).projector()


def overlap(a: StateVector, b: StateVector) -> complex:
    """
    The inner product <a|b>.

    Raises:
        DimensionMismatchError: If the vectors have different lengths
    """
    require_dim(a.dim, b.dim, "state vector")
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def overlap_law(two_s: typing.Union[TwoS, int], a: Direction, b: Direction) -> float:
    """Closed form |<n|n'>|^2 = ((1 + n.n')/2)^(2s)."""
    ts = TwoS.of(two_s)
    c = float(np.dot(a.unit_vector(), b.unit_vector()))
    return ((1.0 + c) / 2.0) ** ts.two_s


def adequate_grid_order(two_s: typing.Union[TwoS, int]) -> int:
    """Smallest grid order for which the identity-resolution quadrature is exact."""
    return TwoS.of(two_s).two_s + 1


def resolution_of_identity_residual(two_s: typing.Union[TwoS, int], grid_order: int) -> float:
    """
    Max-norm residual of (2s+1)/(4 pi) \\int |n><n| dn - E.

    The sphere integral uses a product rule: Gauss-Legendre in cos(theta) with
    `grid_order` nodes times the trapezoid rule in phi with `grid_order`
    points. The rule is exact once grid_order >= 2s+1; coarser grids return a
    large residual, which is a diagnostic rather than an error.
    """
    ts = TwoS.of(two_s)
    if grid_order < 1:
        raise ValidationError(f"grid_order must be >= 1, got {grid_order}")
    nodes, weights = np.polynomial.legendre.leggauss(grid_order)
    phis = 2.0 * math.pi * np.arange(grid_order) / grid_order
    phi_weight = 2.0 * math.pi / grid_order

    total = np.zeros((ts.dim, ts.dim), dtype=np.complex128)
    for x, w in zip(nodes, weights):
        theta = math.acos(min(1.0, max(-1.0, float(x))))
        for phi in phis:
            psi = coherent_state(ts, Direction.from_angles(theta, float(phi))).amplitudes
            total += (w * phi_weight) * np.outer(psi, psi.conj())
    total *= ts.dim / (4.0 * math.pi)
    return float(np.max(np.abs(total - np.eye(ts.dim))))


def coherent_state_matrix(two_s: typing.Union[TwoS, int], directions: typing.Sequence[Direction]) -> ComplexArray:
    """Coherent states for many directions, stacked as the columns of a d x N matrix."""
    ts = TwoS.of(two_s)
    if not directions:
        return np.zeros((ts.dim, 0), dtype=np.complex128)
    return np.stack([coherent_state(ts, d).amplitudes for d in directions], axis=1)
