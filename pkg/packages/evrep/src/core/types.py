"""
Core Type Definitions

Immutable value types shared by every evrep module:
- TwoS: the spin label stored as the integer 2s
- Direction: a point on the unit sphere with its unit vector and stereographic coordinate
- StateVector: amplitudes in the basis |s, n_z>, |s-1, n_z>, ..., |-s, n_z>
- HermitianOperator / RotationOperator: validated d x d matrices

All array-valued fields are copied and frozen (read-only) on construction.
"""

import math
import typing
from dataclasses import dataclass, field

import numpy as np
import numpy.typing as npt

from .exceptions import DimensionMismatchError, ValidationError

ComplexArray = npt.NDArray[np.complex128]
RealArray = npt.NDArray[np.float64]

# Tolerances
HERMITIAN_ATOL = 1e-12
UNITARY_ATOL = 1e-10
UNIT_AXIS_ATOL = 1e-9
SOUTH_POLE_GUARD = 1e-9
MAX_TWO_S = 100


def _frozen(array: np.ndarray) -> np.ndarray:
    out = np.array(array, copy=True)
    out.flags.writeable = False
    return out


@dataclass(frozen=True)
class TwoS:
    """Spin quantum number stored as the integer 2s."""
    two_s: int

    def __post_init__(self) -> None:
        if isinstance(self.two_s, bool) or not isinstance(self.two_s, (int, np.integer)):
            raise ValidationError(f"two_s must be an integer, got {type(self.two_s).__name__}")
        if self.two_s < 1:
            raise ValidationError(f"two_s must be >= 1 (s >= 1/2), got {self.two_s}")
        if self.two_s > MAX_TWO_S:
            raise ValidationError(f"two_s must be <= {MAX_TWO_S}, got {self.two_s}")
        object.__setattr__(self, "two_s", int(self.two_s))

    @classmethod
    def of(cls, value: typing.Union["TwoS", int]) -> "TwoS":
        """Coerce an integer or TwoS into a TwoS."""
        return value if isinstance(value, TwoS) else cls(value)

    @property
    def spin(self) -> float:
        """The spin s = two_s / 2."""
        return self.two_s / 2.0

    @property
    def dim(self) -> int:
        """Hilbert-space dimension 2s+1."""
        return self.two_s + 1

    @property
    def quorum_size(self) -> int:
        """Number of quorum directions (2s+1)^2."""
        return self.dim * self.dim

    def __str__(self) -> str:
        return f"s={self.two_s}/2" if self.two_s % 2 else f"s={self.two_s // 2}"


@dataclass(frozen=True)
class Direction:
    """A point (theta, phi) on the unit sphere."""
    theta: float
    phi: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.theta) and math.isfinite(self.phi)):
            raise ValidationError(f"Direction angles must be finite, got ({self.theta}, {self.phi})")
        if not 0.0 <= self.theta <= math.pi:
            raise ValidationError(f"theta must lie in [0, pi], got {self.theta}")
        if not 0.0 <= self.phi < 2.0 * math.pi:
            raise ValidationError(f"phi must lie in [0, 2pi), got {self.phi}")
        object.__setattr__(self, "theta", float(self.theta))
        object.__setattr__(self, "phi", float(self.phi))

    @classmethod
    def from_angles(cls, theta: float, phi: float) -> "Direction":
        """Build a direction, wrapping phi into [0, 2pi)."""
        wrapped = math.fmod(phi, 2.0 * math.pi)
        if wrapped < 0.0:
            wrapped += 2.0 * math.pi
        if wrapped >= 2.0 * math.pi:
            wrapped = 0.0
        return cls(min(max(theta, 0.0), math.pi), wrapped)

    @classmethod
    def from_vector(cls, vector: typing.Sequence[float]) -> "Direction":
        """Build a direction from a (not necessarily normalized) 3-vector."""
        v = np.asarray(vector, dtype=float)
        if v.shape != (3,):
            raise ValidationError(f"Expected a 3-vector, got shape {v.shape}")
        norm = float(np.linalg.norm(v))
        if norm == 0.0 or not math.isfinite(norm):
            raise ValidationError("Cannot build a direction from a zero or non-finite vector")
        x, y, z = v / norm
        theta = math.acos(min(1.0, max(-1.0, z)))
        phi = math.atan2(y, x) if (x != 0.0 or y != 0.0) else 0.0
        return cls.from_angles(theta, phi)

    def unit_vector(self) -> RealArray:
        """Cartesian unit vector (sin t cos p, sin t sin p, cos t)."""
        st = math.sin(self.theta)
        return np.array([st * math.cos(self.phi), st * math.sin(self.phi), math.cos(self.theta)])

    def stereo(self) -> complex:
        """
        Stereographic coordinate z = tan(theta/2) exp(i phi).

        Raises:
            ValidationError: At (or within 1e-9 of) the south pole, where z diverges
        """
        if self.theta >= math.pi - SOUTH_POLE_GUARD:
            raise ValidationError("Stereographic coordinate is undefined at the south pole")
        return math.tan(self.theta / 2.0) * complex(math.cos(self.phi), math.sin(self.phi))


@dataclass(frozen=True, eq=False)
class StateVector:
    """A vector in the (2s+1)-dimensional spin Hilbert space."""
    amplitudes: ComplexArray

    def __post_init__(self) -> None:
        amps = np.asarray(self.amplitudes, dtype=np.complex128)
        if amps.ndim != 1 or amps.size < 2:
            raise ValidationError(f"StateVector needs a 1-d array of length >= 2, got shape {amps.shape}")
        if not np.all(np.isfinite(amps)):
            raise ValidationError("StateVector amplitudes must be finite")
        object.__setattr__(self, "amplitudes", _frozen(amps))

    @property
    def dim(self) -> int:
        return int(self.amplitudes.size)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def projector(self) -> "HermitianOperator":
        """The operator |psi><psi|."""
        return HermitianOperator(np.outer(self.amplitudes, self.amplitudes.conj()))


@dataclass(frozen=True, eq=False)
class HermitianOperator:
    """
    A d x d Hermitian matrix.

    Hermiticity is checked against HERMITIAN_ATOL scaled by the largest entry,
    then the stored matrix is made exactly Hermitian.
    """
    matrix: ComplexArray

    def __post_init__(self) -> None:
        m = np.asarray(self.matrix, dtype=np.complex128)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValidationError(f"Operator must be a square matrix, got shape {m.shape}")
        if not np.all(np.isfinite(m)):
            raise ValidationError("Operator entries must be finite")
        scale = max(1.0, float(np.max(np.abs(m)))) if m.size else 1.0
        deviation = float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0
        if deviation > HERMITIAN_ATOL * scale:
            raise ValidationError(f"Operator is not Hermitian (max |A - A^H| = {deviation:.3e})")
        object.__setattr__(self, "matrix", _frozen(0.5 * (m + m.conj().T)))

    @classmethod
    def identity(cls, dim: int) -> "HermitianOperator":
        return cls(np.eye(dim, dtype=np.complex128))

    @classmethod
    def random(cls, dim: int, rng: np.random.Generator) -> "HermitianOperator":
        """(X + X^H) / 2 for a complex Gaussian X."""
        x = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
        return cls(0.5 * (x + x.conj().T))

    @property
    def dim(self) -> int:
        return int(self.matrix.shape[0])

    def trace(self) -> float:
        return float(np.trace(self.matrix).real)

    def eigvalsh(self) -> RealArray:
        """Eigenvalues in ascending order."""
        return np.linalg.eigvalsh(self.matrix)

    def expectation(self, state: StateVector) -> float:
        """<psi|A|psi> (real for Hermitian A)."""
        require_dim(self.dim, state.dim, "state vector")
        return float(np.vdot(state.amplitudes, self.matrix @ state.amplitudes).real)

    def scaled(self, factor: float) -> "HermitianOperator":
        return HermitianOperator(factor * self.matrix)

    def __add__(self, other: "HermitianOperator") -> "HermitianOperator":
        require_dim(self.dim, other.dim, "operator")
        return HermitianOperator(self.matrix + other.matrix)

    def __sub__(self, other: "HermitianOperator") -> "HermitianOperator":
        require_dim(self.dim, other.dim, "operator")
        return HermitianOperator(self.matrix - other.matrix)

    def max_abs_diff(self, other: "HermitianOperator") -> float:
        """Max-norm distance between two operators."""
        require_dim(self.dim, other.dim, "operator")
        return float(np.max(np.abs(self.matrix - other.matrix)))


@dataclass(frozen=True, eq=False)
class RotationOperator:
    """A unitary d x d matrix representing an SU(2) rotation."""
    matrix: ComplexArray
    axis: typing.Tuple[float, float, float] = field(default=(0.0, 0.0, 1.0))
    angle: float = 0.0

    def __post_init__(self) -> None:
        u = np.asarray(self.matrix, dtype=np.complex128)
        if u.ndim != 2 or u.shape[0] != u.shape[1]:
            raise ValidationError(f"Rotation must be a square matrix, got shape {u.shape}")
        eye = np.eye(u.shape[0])
        if float(np.max(np.abs(u @ u.conj().T - eye))) > UNITARY_ATOL:
            raise ValidationError("Rotation matrix is not unitary")
        if abs(abs(np.linalg.det(u)) - 1.0) > UNITARY_ATOL:
            raise ValidationError("Rotation matrix does not have |det| = 1")
        object.__setattr__(self, "matrix", _frozen(u))

    @property
    def dim(self) -> int:
        return int(self.matrix.shape[0])

    def apply(self, state: StateVector) -> StateVector:
        require_dim(self.dim, state.dim, "state vector")
        return StateVector(self.matrix @ state.amplitudes)

    def conjugate(self, op: typing.Union[HermitianOperator, np.ndarray]) -> np.ndarray:
        """U A U^H for a single operator or a stack of operators."""
        a = op.matrix if isinstance(op, HermitianOperator) else np.asarray(op)
        return self.matrix @ a @ self.matrix.conj().T


def require_dim(expected: int, got: int, what: str) -> None:
    """Raise DimensionMismatchError unless expected == got."""
    if expected != got:
        raise DimensionMismatchError(what, expected, got)


def require_unit_axis(axis: typing.Sequence[float]) -> RealArray:
    """
    Validate a rotation axis.

    Raises:
        ValidationError: If the axis is not a finite 3-vector of unit length
    """
    a = np.asarray(axis, dtype=float)
    if a.shape != (3,) or not np.all(np.isfinite(a)):
        raise ValidationError(f"Axis must be a finite 3-vector, got {axis!r}")
    if abs(float(np.linalg.norm(a)) - 1.0) > UNIT_AXIS_ATOL:
        raise ValidationError(f"Axis must have unit length, got |axis| = {np.linalg.norm(a):.12f}")
    return a
