"""
Tomography Module

Stern-Gerlach state reconstruction on a quorum:
- Exact probabilities P_n = <n_n|rho|n_n> and finite-shot binomial sampling
- Linear reconstruction rho = (1/(2s+1)) sum_n P_n Q^n with diagnostics
- Validation of the probability bounds and the normalization constraint
- Normalization, PSD repair, Uhlmann fidelity and random test states
- Shot-noise scaling study of the reconstruction error
"""

import math
import typing
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from pydantic import BaseModel

from ..core.exceptions import DegenerateStateError, InvalidStateError, ValidationError
from ..core.types import HermitianOperator, RealArray, StateVector, TwoS, require_dim
from ..frames.quorum import Quorum
from ..frames.symbols import SymbolVector, Variance, lower_symbol, reconstruct_from_lower

# A state counts as PSD when lambda_min >= -PSD_ATOL
PSD_ATOL = 1e-10
# exact_probabilities rejects states below -INVALID_STATE_ATOL
INVALID_STATE_ATOL = 1e-8
NORMALIZED_ATOL = 1e-10
NORMALIZATION_TOL = 1e-9
DEGENERATE_TRACE = 1e-12
# Eigenvalues below RANK_RTOL * d * lambda_max count as zero in fidelity
RANK_RTOL = 1e-12


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """A (possibly unnormalized or non-PSD) density matrix; see `diagnostics`."""
    op: HermitianOperator

    @classmethod
    def from_matrix(cls, matrix: np.ndarray) -> "DensityMatrix":
        return cls(HermitianOperator(matrix))

    @classmethod
    def pure(cls, state: StateVector) -> "DensityMatrix":
        """|psi><psi| for a normalized state vector."""
        psi = state.amplitudes / state.norm()
        return cls(StateVector(psi).projector())

    @classmethod
    def maximally_mixed(cls, two_s: typing.Union[TwoS, int]) -> "DensityMatrix":
        ts = TwoS.of(two_s)
        return cls(HermitianOperator(np.eye(ts.dim) / ts.dim))

    @property
    def matrix(self) -> np.ndarray:
        return self.op.matrix

    @property
    def dim(self) -> int:
        return self.op.dim

    def trace(self) -> float:
        return self.op.trace()

    def min_eigenvalue(self) -> float:
        return float(self.op.eigvalsh()[0])

    @property
    def is_psd(self) -> bool:
        return self.min_eigenvalue() >= -PSD_ATOL

    @property
    def is_normalized(self) -> bool:
        return abs(self.trace() - 1.0) <= NORMALIZED_ATOL


@dataclass(frozen=True, eq=False)
class ProbabilityVector:
    """
    Measured or exact probabilities P_n, one per quorum direction.

    `shots` is None for exact probabilities; sampled vectors also keep the
    per-direction counts.
    """
    values: RealArray
    shots: typing.Optional[int] = None
    counts: typing.Optional[np.ndarray] = None

    def __post_init__(self) -> None:
        vals = np.array(self.values, dtype=float, copy=True)
        if vals.ndim != 1:
            raise ValidationError(f"Probabilities must be 1-d, got shape {vals.shape}")
        if not np.all(np.isfinite(vals)):
            raise ValidationError("Probabilities must be finite")
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)
        if self.shots is not None and self.shots < 1:
            raise ValidationError(f"shots must be positive, got {self.shots}")
        if self.counts is not None:
            counts = np.array(self.counts, dtype=np.int64, copy=True)
            require_dim(vals.size, counts.size, "count vector")
            counts.flags.writeable = False
            object.__setattr__(self, "counts", counts)

    @property
    def exact(self) -> bool:
        return self.shots is None

    def __len__(self) -> int:
        return int(self.values.size)

    def as_symbol(self) -> SymbolVector:
        """Probabilities are the lower symbol of rho."""
        return SymbolVector(self.values, Variance.LOWER)


def exact_probabilities(q: Quorum, rho: DensityMatrix) -> ProbabilityVector:
    """
    P_n = <n_n|rho|n_n> for every quorum direction.

    Raises:
        DimensionMismatchError: If rho does not act on the quorum's space
        InvalidStateError: If rho has an eigenvalue below -1e-8
    """
    require_dim(q.dim, rho.dim, "density matrix")
    lam_min = rho.min_eigenvalue()
    if lam_min < -INVALID_STATE_ATOL:
        raise InvalidStateError(
            f"Density matrix is not positive semidefinite (lambda_min = {lam_min:.3e})",
            min_eigenvalue=lam_min,
        )
    values = lower_symbol(q, rho.op).values
    # rounding can leave zero probabilities at -1e-17
    values = np.where((values < 0.0) & (values > -INVALID_STATE_ATOL), 0.0, values)
    return ProbabilityVector(values)


def sample_counts(p: ProbabilityVector, shots: int, seed: int) -> ProbabilityVector:
    """
    Simulate `shots` Stern-Gerlach runs per direction.

    Each direction independently yields count ~ Binomial(shots, P_n) for the
    outcome "spin s along n_n"; the result holds frequencies count / shots.

    Raises:
        ValidationError: If shots < 1 or the input is already sampled
    """
    if not p.exact:
        raise ValidationError("sample_counts expects exact probabilities")
    if isinstance(shots, bool) or int(shots) != shots or shots < 1:
        raise ValidationError(f"shots must be a positive integer, got {shots}")
    rng = np.random.default_rng(seed)
    counts = rng.binomial(int(shots), np.clip(p.values, 0.0, 1.0))
    return ProbabilityVector(counts / float(shots), shots=int(shots), counts=counts)


@dataclass(frozen=True, eq=False)
class Reconstruction:
    """Raw linear estimate of rho with its trace and smallest eigenvalue."""
    density: DensityMatrix
    trace: float
    min_eigenvalue: float

    @property
    def is_physical(self) -> bool:
        return self.min_eigenvalue >= -PSD_ATOL and abs(self.trace - 1.0) <= NORMALIZED_ATOL


def reconstruct_density(q: Quorum, p: ProbabilityVector) -> Reconstruction:
    """
    rho = (1/(2s+1)) sum_n P_n Q^n.

    Sampled data is returned as the raw linear estimate; it may be
    unnormalized or have negative eigenvalues, which the diagnostics report.
    """
    require_dim(q.size, len(p), "probability vector")
    rho = DensityMatrix(reconstruct_from_lower(q, p.as_symbol()))
    return Reconstruction(rho, rho.trace(), rho.min_eigenvalue())


class ProbabilityReport(BaseModel):
    """Outcome of the probability-constraint checks."""
    length_ok: bool
    exact: bool
    in_unit_interval: bool
    sum_in_bounds: bool
    normalization_ok: bool
    min_value: float
    max_value: float
    total: float
    upper_bound: float
    normalization_residual: float
    passed: bool


def normalization_weights(q: Quorum) -> RealArray:
    """w_n = Tr[Q^n] / (2s+1), so that Tr[rho] = sum_n w_n P_n."""
    return q.dual_traces(np.eye(q.dim)) / q.dim


def validate_probabilities(q: Quorum, p: ProbabilityVector) -> ProbabilityReport:
    """
    Check 0 <= P_n <= 1, 0 < sum P_n < (2s+1)^2 and the normalization residual.

    Never raises. The normalization residual only gates `passed` for exact
    data; for sampled data it is reported as a statistic.
    """
    bound = float(q.dim ** 2)
    if len(p) != q.size:
        return ProbabilityReport(
            length_ok=False, exact=p.exact, in_unit_interval=False, sum_in_bounds=False,
            normalization_ok=False, min_value=math.nan, max_value=math.nan, total=math.nan,
            upper_bound=bound, normalization_residual=math.inf, passed=False,
        )
    vals = p.values
    total = float(vals.sum())
    residual = abs(float(np.dot(normalization_weights(q), vals)) - 1.0)
    in_unit = bool(np.all((vals >= 0.0) & (vals <= 1.0)))
    in_bounds = 0.0 < total < bound
    norm_ok = residual < NORMALIZATION_TOL
    return ProbabilityReport(
        length_ok=True,
        exact=p.exact,
        in_unit_interval=in_unit,
        sum_in_bounds=in_bounds,
        normalization_ok=norm_ok,
        min_value=float(vals.min()),
        max_value=float(vals.max()),
        total=total,
        upper_bound=bound,
        normalization_residual=residual,
        passed=in_unit and in_bounds and (norm_ok or not p.exact),
    )


def normalize(rho: DensityMatrix) -> DensityMatrix:
    """
    Divide rho by its trace.

    Raises:
        DegenerateStateError: If the trace is at most 1e-12
    """
    tr = rho.trace()
    if tr <= DEGENERATE_TRACE:
        raise DegenerateStateError(tr)
    return DensityMatrix(rho.op.scaled(1.0 / tr))


def psd_project(rho: DensityMatrix) -> DensityMatrix:
    """
    Clip negative eigenvalues to zero and renormalize the trace to 1.

    Raises:
        DegenerateStateError: If nothing positive is left to normalize
    """
    w, v = np.linalg.eigh(rho.matrix)
    w = np.clip(w, 0.0, None)
    tr = float(w.sum())
    if tr <= DEGENERATE_TRACE:
        raise DegenerateStateError(tr)
    return DensityMatrix(HermitianOperator((v * (w / tr)) @ v.conj().T))


def _sqrt_psd(m: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(m)
    return (v * np.sqrt(_drop_noise(w))) @ v.conj().T


def _drop_noise(w: np.ndarray) -> np.ndarray:
    """Zero eigenvalues at the rounding level of the largest one."""
    cutoff = RANK_RTOL * w.size * float(np.max(np.abs(w)))
    return np.where(w > cutoff, w, 0.0)


def fidelity(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    """
    Uhlmann fidelity (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2, clamped to [0, 1].

    When either state has rank one, F = <psi|other|psi> lambda is used; square
    roots of rounding-level eigenvalues would otherwise push F past 1.
    """
    require_dim(rho.dim, sigma.dim, "density matrix")
    for pure, other in ((rho, sigma), (sigma, rho)):
        w, v = np.linalg.eigh(pure.matrix)
        w = _drop_noise(w)
        if np.count_nonzero(w) == 1:
            psi = v[:, -1]
            value = float(w[-1] * np.vdot(psi, other.matrix @ psi).real)
            return min(1.0, max(0.0, value))
    root = _sqrt_psd(rho.matrix)
    inner = root @ sigma.matrix @ root
    w = _drop_noise(np.linalg.eigvalsh(0.5 * (inner + inner.conj().T)))
    return min(1.0, float(np.sum(np.sqrt(w)) ** 2))


def random_density_matrix(two_s: typing.Union[TwoS, int], rng: np.random.Generator) -> DensityMatrix:
    """Hilbert-Schmidt random state rho = X X^H / Tr with complex Gaussian X."""
    ts = TwoS.of(two_s)
    x = rng.standard_normal((ts.dim, ts.dim)) + 1j * rng.standard_normal((ts.dim, ts.dim))
    m = x @ x.conj().T
    return DensityMatrix(HermitianOperator(m / np.trace(m).real))


def random_pure_state(two_s: typing.Union[TwoS, int], rng: np.random.Generator) -> StateVector:
    """Normalized complex Gaussian vector."""
    ts = TwoS.of(two_s)
    v = rng.standard_normal(ts.dim) + 1j * rng.standard_normal(ts.dim)
    return StateVector(v / np.linalg.norm(v))


class ScalingReport(BaseModel):
    """Median reconstruction error per shot count and the fitted log-log slope."""
    shots: typing.List[int]
    median_errors: typing.List[float]
    seeds: int
    slope: float


def shot_noise_scaling(
    q: Quorum,
    rho: DensityMatrix,
    shots_grid: typing.Sequence[int],
    seeds: int = 20,
    base_seed: int = 0,
    jobs: int = 1,
) -> ScalingReport:
    """
    Max-norm reconstruction error against shots, median over `seeds` trials.

    Trial seeds are spawned from SeedSequence(base_seed), so results do not
    depend on `jobs`. The slope is a least-squares fit of log(median error)
    against log(shots); binomial noise predicts -1/2. Shot counts whose
    median error is exactly zero are left out of the fit.

    Raises:
        ValidationError: If the grid or counts are invalid, or fewer than two
            shot counts have a nonzero median error
    """
    if len(shots_grid) < 2:
        raise ValidationError("shots_grid needs at least two entries")
    if seeds < 1 or jobs < 1:
        raise ValidationError("seeds and jobs must be positive")
    exact = exact_probabilities(q, rho)
    children = np.random.SeedSequence(base_seed).spawn(seeds)
    trial_seeds = [int(c.generate_state(1)[0]) for c in children]

    def trial(args: typing.Tuple[int, int]) -> float:
        shots, seed = args
        estimate = reconstruct_density(q, sample_counts(exact, shots, seed)).density
        return rho.op.max_abs_diff(estimate.op)

    tasks = [(int(m), sd) for m in shots_grid for sd in trial_seeds]
    if jobs == 1:
        errors = [trial(t) for t in tasks]
    else:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            errors = list(pool.map(trial, tasks))

    grid = np.asarray(errors).reshape(len(shots_grid), seeds)
    medians = np.median(grid, axis=1)
    fitted = medians > 0.0
    if np.count_nonzero(fitted) < 2:
        raise ValidationError("Fewer than two shot counts have a nonzero median error; no slope to fit")
    x = np.log(np.asarray(shots_grid, dtype=float)[fitted])
    slope = float(np.polyfit(x, np.log(medians[fitted]), 1)[0])
    return ScalingReport(
        shots=[int(m) for m in shots_grid],
        median_errors=[float(e) for e in medians],
        seeds=seeds,
        slope=slope,
    )
