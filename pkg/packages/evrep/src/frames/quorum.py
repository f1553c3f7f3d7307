"""
Quorum Construction Module

Builds the measurement directions and the operator frame used for reconstruction:
- DirectionScheme: (2s+1)^2 directions on 2s+1 cones about the z axis
- Quorum: projectors Q_n = |n_n><n_n|, the Gram metric G, its inverse and the dual family Q^n
- Condition reports for a scheme without building duals
- Metric raising and lowering of symbol vectors
"""

import math
import typing
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg as la
from scipy.spatial import cKDTree
from pydantic import BaseModel

from ..core.exceptions import IllConditionedSchemeError, SchemeError, ValidationError
from ..core.spincore import coherent_state_matrix, rotation_matrix
from ..core.types import (
    ComplexArray,
    Direction,
    HermitianOperator,
    RealArray,
    TwoS,
    require_dim,
)
from .symbols import SymbolVector, Variance

# Relative eigenvalue ratio below which G counts as singular
SINGULAR_RATIO = 1e-13
# Two directions closer than this (Euclidean) count as equal
DISTINCT_ATOL = 1e-12


@dataclass(frozen=True, eq=False)
class DirectionScheme:
    """
    An ordered family of N_s = (2s+1)^2 measurement directions.

    Structured schemes put 2s+1 directions on each of 2s+1 cones about z,
    with azimuths offset_mu + 2 pi nu / (2s+1); the flat index is
    n = mu (2s+1) + nu. Unstructured schemes (from_directions) only carry the
    direction list and are used to study arbitrary designs.
    """
    two_s: TwoS
    cone_thetas: typing.Tuple[float, ...]
    cone_phi_offsets: typing.Tuple[float, ...]
    directions: typing.Tuple[Direction, ...]

    @property
    def structured(self) -> bool:
        return bool(self.cone_thetas)

    @property
    def size(self) -> int:
        return len(self.directions)

    @classmethod
    def from_cones(
        cls,
        two_s: typing.Union[TwoS, int],
        cone_thetas: typing.Sequence[float],
        cone_phi_offsets: typing.Sequence[float],
    ) -> "DirectionScheme":
        """
        Build a cone scheme.

        Raises:
            SchemeError: If the cone lists have the wrong length, the opening
                angles are not strictly increasing inside (0, pi), or two
                directions coincide
        """
        ts = TwoS.of(two_s)
        thetas = tuple(float(t) for t in cone_thetas)
        offsets = tuple(float(p) for p in cone_phi_offsets)
        if len(thetas) != ts.dim:
            raise SchemeError(f"Expected {ts.dim} cone angles, got {len(thetas)}")
        if len(offsets) != ts.dim:
            raise SchemeError(f"Expected {ts.dim} azimuth offsets, got {len(offsets)}")
        if not all(math.isfinite(x) for x in thetas + offsets):
            raise SchemeError("Cone angles and offsets must be finite")
        if not all(0.0 < t < math.pi for t in thetas):
            raise SchemeError("Cone opening angles must lie strictly inside (0, pi)")
        if any(b <= a for a, b in zip(thetas, thetas[1:])):
            raise SchemeError("Cone opening angles must be distinct and strictly increasing")

        step = 2.0 * math.pi / ts.dim
        directions = tuple(
            Direction.from_angles(theta, offset + step * nu)
            for theta, offset in zip(thetas, offsets)
            for nu in range(ts.dim)
        )
        _require_distinct(directions)
        return cls(ts, thetas, offsets, directions)

    @classmethod
    def from_directions(
        cls,
        two_s: typing.Union[TwoS, int],
        directions: typing.Sequence[Direction],
    ) -> "DirectionScheme":
        """Build an unstructured scheme from N_s pairwise distinct directions."""
        ts = TwoS.of(two_s)
        dirs = tuple(directions)
        if len(dirs) != ts.quorum_size:
            raise SchemeError(f"Expected {ts.quorum_size} directions, got {len(dirs)}")
        _require_distinct(dirs)
        return cls(ts, (), (), dirs)

    def unit_vectors(self) -> RealArray:
        """N x 3 array of unit vectors in index order."""
        return np.array([d.unit_vector() for d in self.directions])


def _require_distinct(directions: typing.Sequence[Direction]) -> None:
    vectors = np.array([d.unit_vector() for d in directions])
    pairs = cKDTree(vectors).query_pairs(DISTINCT_ATOL)
    if pairs:
        i, j = min(pairs)
        raise SchemeError(f"Directions {i} and {j} coincide")


def standard_directions(two_s: typing.Union[TwoS, int]) -> DirectionScheme:
    """
    The default scheme: cone angles pi (mu+1) / (2s+2), offsets pi mu / (2s+1)^2.

    Poles are excluded and each cone is invariant under a z rotation by 2 pi / (2s+1).
    """
    ts = TwoS.of(two_s)
    thetas = [math.pi * (mu + 1) / (ts.dim + 1) for mu in range(ts.dim)]
    offsets = [math.pi * mu / ts.quorum_size for mu in range(ts.dim)]
    return DirectionScheme.from_cones(ts, thetas, offsets)


def clustered_directions(two_s: typing.Union[TwoS, int], spread: float) -> DirectionScheme:
    """
    A scheme with every direction within `spread` of the north pole.

    Cone angles are spread (mu+1) / (2s+1). States peaked about the pole then
    have probability sums close to (2s+1)^2.
    """
    ts = TwoS.of(two_s)
    if not 0.0 < spread < math.pi:
        raise ValidationError(f"spread must lie in (0, pi), got {spread}")
    thetas = [spread * (mu + 1) / ts.dim for mu in range(ts.dim)]
    offsets = [math.pi * mu / ts.quorum_size for mu in range(ts.dim)]
    return DirectionScheme.from_cones(ts, thetas, offsets)


def rotated(scheme: DirectionScheme, axis: typing.Sequence[float], angle: float) -> DirectionScheme:
    """The scheme rigidly rotated by `angle` about `axis` (unstructured)."""
    r = rotation_matrix(axis, angle)
    dirs = [Direction.from_vector(r @ v) for v in scheme.unit_vectors()]
    return DirectionScheme.from_directions(scheme.two_s, dirs)


def gram_matrix(two_s: typing.Union[TwoS, int], directions: typing.Sequence[Direction]) -> RealArray:
    """G_nn' = Tr[Q_n Q_n'] = |<n_n|n_n'>|^2, real symmetric with unit diagonal."""
    states = coherent_state_matrix(two_s, directions)
    return _gram_from_states(states)


def _gram_from_states(states: ComplexArray) -> RealArray:
    g = np.abs(states.conj().T @ states) ** 2
    g = 0.5 * (g + g.T)
    np.fill_diagonal(g, 1.0)
    return g


class ConditionReport(BaseModel):
    """Spectral summary of a Gram matrix."""
    size: int
    lambda_min: float
    lambda_max: float
    condition_number: float
    determinant_sign: int
    singular: bool


def kernel_matrix(kernels: ComplexArray) -> ComplexArray:
    """d^2 x N_s matrix whose columns are the flattened kernels; G = A^H A."""
    n = kernels.shape[0]
    return kernels.reshape(n, -1).T


def _spectrum_report(a: ComplexArray) -> ConditionReport:
    # eigenvalues of G = A^H A as squared singular values of A
    s = la.svdvals(a)
    lam = s[::-1] ** 2
    if a.shape[1] > a.shape[0]:
        lam = np.concatenate([np.zeros(a.shape[1] - a.shape[0]), lam])
    lam_min, lam_max = float(lam[0]), float(lam[-1])
    singular = lam_min <= 0.0 or lam_min / lam_max < SINGULAR_RATIO
    return ConditionReport(
        size=int(a.shape[1]),
        lambda_min=lam_min,
        lambda_max=lam_max,
        condition_number=lam_max / lam_min if lam_min > 0.0 else math.inf,
        determinant_sign=1 if lam_min > 0.0 else 0,
        singular=bool(singular),
    )


def _kernels_from_states(states: ComplexArray) -> ComplexArray:
    return np.einsum("in,jn->nij", states, states.conj())


def condition_report(scheme: DirectionScheme) -> ConditionReport:
    """
    Eigenvalue bounds, condition number and determinant sign of G.

    The spectrum is taken from the singular values of the kernel matrix, so
    lambda_min stays resolved where forming G would bury it in rounding.
    Never raises for singular G; the `singular` flag is set instead.
    """
    states = coherent_state_matrix(scheme.two_s, scheme.directions)
    return _spectrum_report(kernel_matrix(_kernels_from_states(states)))


@dataclass(frozen=True, eq=False)
class Quorum:
    """
    The quorum {Q_n}, its Gram metric and the dual family {Q^n}.

    Kernel stacks have shape (N_s, d, d). Duals satisfy
    (1/(2s+1)) Tr[Q_n Q^n'] = delta_n^n'.
    """
    scheme: DirectionScheme
    states: ComplexArray
    kernels: ComplexArray
    gram: RealArray
    gram_inverse: RealArray
    duals: ComplexArray
    condition_number: float
    frame: ComplexArray
    kernel_factor: typing.Tuple[ComplexArray, np.ndarray]

    @property
    def two_s(self) -> TwoS:
        return self.scheme.two_s

    @property
    def dim(self) -> int:
        return self.two_s.dim

    @property
    def size(self) -> int:
        return self.scheme.size

    def kernel(self, n: int) -> HermitianOperator:
        return HermitianOperator(self.kernels[n])

    def dual(self, n: int) -> HermitianOperator:
        return HermitianOperator(self.duals[n])

    def lower_values(self, upper: RealArray) -> RealArray:
        """(1/(2s+1)) G x."""
        x = np.asarray(upper, dtype=float)
        require_dim(self.size, x.size, "symbol vector")
        return (self.gram @ x) / self.dim

    def raise_values(self, lower: RealArray) -> RealArray:
        """(2s+1) G^-1 x = (2s+1) A^-1 A^-H x, from the stored LU factor of A."""
        x = np.asarray(lower, dtype=float)
        require_dim(self.size, x.size, "symbol vector")
        y = self._solve(x.astype(complex), adjoint=True)
        return self.dim * self._solve(y).real

    def _solve(self, b: np.ndarray, adjoint: bool = False) -> np.ndarray:
        """A x = b (or A^H x = b) with one step of iterative refinement."""
        trans = 2 if adjoint else 0
        a = self.frame.conj().T if adjoint else self.frame
        x = la.lu_solve(self.kernel_factor, b, trans=trans)
        return x + la.lu_solve(self.kernel_factor, b - a @ x, trans=trans)

    def dual_sum(self, values: RealArray) -> np.ndarray:
        """(1/(2s+1)) sum_n x_n Q^n = A^-H x, solved without the explicit duals."""
        x = np.asarray(values, dtype=float)
        require_dim(self.size, x.size, "symbol vector")
        m = self._solve(x.astype(complex), adjoint=True).reshape(self.dim, self.dim)
        return 0.5 * (m + m.conj().T)

    def dual_traces(self, matrix: np.ndarray) -> RealArray:
        """Tr[M Q^n] = (2s+1) (A^-1 vec M)_n for Hermitian M."""
        b = np.asarray(matrix, dtype=complex).reshape(-1)
        return self.dim * self._solve(b).real


def build_quorum(scheme: DirectionScheme) -> Quorum:
    """
    Build projectors, Gram metric and duals for a scheme.

    With A the matrix of flattened kernels, G = A^H A and the duals
    Q^n = (2s+1) sum_n' (G^-1)_nn' Q_n' are the columns of (2s+1) A^-H.
    They come from an LU solve of A^H X = (2s+1) I, which works at the
    conditioning of A rather than of G. G^-1 is kept for diagnostics.

    Raises:
        IllConditionedSchemeError: If lambda_min / lambda_max < 1e-13 or the
            LU factorization is singular
    """
    ts = scheme.two_s
    states = coherent_state_matrix(ts, scheme.directions)
    kernels = _kernels_from_states(states)
    a = kernel_matrix(kernels)
    gram = _gram_from_states(states)

    report = _spectrum_report(a)
    if report.singular:
        raise IllConditionedSchemeError(report.condition_number, report)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("error", la.LinAlgWarning)
            factor = la.lu_factor(a)
    except (la.LinAlgError, la.LinAlgWarning):
        raise IllConditionedSchemeError(report.condition_number, report)

    eye = np.eye(scheme.size, dtype=complex)
    inverse_adjoint = la.lu_solve(factor, eye, trans=2)
    inverse_adjoint += la.lu_solve(factor, eye - a.conj().T @ inverse_adjoint, trans=2)
    gram_inverse = (inverse_adjoint.conj().T @ inverse_adjoint).real
    gram_inverse = 0.5 * (gram_inverse + gram_inverse.T)
    duals = ts.dim * inverse_adjoint.T.reshape(scheme.size, ts.dim, ts.dim)
    duals = 0.5 * (duals + np.conj(np.swapaxes(duals, 1, 2)))

    for arr in (states, kernels, a, gram, gram_inverse, duals):
        arr.flags.writeable = False
    return Quorum(
        scheme=scheme,
        states=states,
        kernels=kernels,
        gram=gram,
        gram_inverse=gram_inverse,
        duals=duals,
        condition_number=report.condition_number,
        frame=a,
        kernel_factor=factor,
    )


def metric_lower(q: Quorum, upper: SymbolVector) -> SymbolVector:
    """
    Lower an upper symbol: lower_n = (1/(2s+1)) sum_n' G_nn' upper^n'.

    Raises:
        ValidationError: If the symbol is not an upper symbol
        DimensionMismatchError: If its length is not N_s
    """
    if upper.variance is not Variance.UPPER:
        raise ValidationError("metric_lower expects an upper symbol")
    return SymbolVector(q.lower_values(upper.values), Variance.LOWER)


def metric_raise(q: Quorum, lower: SymbolVector) -> SymbolVector:
    """
    Raise a lower symbol: the inverse of metric_lower.

    Raises:
        ValidationError: If the symbol is not a lower symbol
        DimensionMismatchError: If its length is not N_s
    """
    if lower.variance is not Variance.LOWER:
        raise ValidationError("metric_raise expects a lower symbol")
    return SymbolVector(q.raise_values(lower.values), Variance.UPPER)


class CommutatorWitness(BaseModel):
    """The pair of quorum kernels with the largest commutator."""
    first: int
    second: int
    norm: float


def commutator_witness(q: Quorum) -> CommutatorWitness:
    """
    Locate the largest Frobenius norm ||[Q_n, Q_n']||.

    For rank-1 projectors ||[Q_n, Q_n']||_F^2 = 2 G (1 - G), so the pair is
    found from G and its commutator is then evaluated explicitly.
    """
    g = q.gram
    score = g * (1.0 - g)
    np.fill_diagonal(score, -1.0)
    n, m = np.unravel_index(int(np.argmax(score)), score.shape)
    a, b = q.kernels[n], q.kernels[m]
    norm = float(np.linalg.norm(a @ b - b @ a))
    return CommutatorWitness(first=int(n), second=int(m), norm=norm)
