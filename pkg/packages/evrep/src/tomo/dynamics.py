"""
Probability-Space Dynamics Module

Unitary time evolution carried by the probability vector alone (hbar = 1):
- EvolutionGenerator: the real matrix L with dP/dt = L P
- Fixed-step classical Runge-Kutta integration of the probability ODE
- Exact propagation rho(t) = U rho U^H as an oracle
"""

import math
import typing
from dataclasses import dataclass

import numpy as np

from ..core.exceptions import ValidationError
from ..core.spincore import hermitian_exp
from ..core.types import HermitianOperator, RealArray, require_dim
from ..frames.quorum import Quorum
from .tomography import DensityMatrix, ProbabilityVector, exact_probabilities, normalization_weights


@dataclass(frozen=True, eq=False)
class EvolutionGenerator:
    """L_nm = (1/(2s+1)) Tr[Q_n (-i)[H, Q^m]]."""
    matrix: RealArray
    hamiltonian: HermitianOperator

    @property
    def size(self) -> int:
        return int(self.matrix.shape[0])

    def rate(self, p: RealArray) -> RealArray:
        """dP/dt for the probability vector p."""
        return self.matrix @ p


def evolution_generator(q: Quorum, hamiltonian: HermitianOperator) -> EvolutionGenerator:
    """
    Build the generator coupling the probabilities.

    Substituting rho = (1/(2s+1)) sum_m P_m Q^m into the von Neumann equation
    and taking Tr[Q_n .] gives dP_n/dt = sum_m L_nm P_m.

    Raises:
        DimensionMismatchError: If H does not act on the quorum's space
    """
    require_dim(q.dim, hamiltonian.dim, "Hamiltonian")
    h = hamiltonian.matrix
    commutators = -1j * (h @ q.duals - q.duals @ h)
    lmat = np.einsum("nij,mji->nm", q.kernels, commutators).real / q.dim
    lmat.flags.writeable = False
    return EvolutionGenerator(lmat, hamiltonian)


def _check_times(t: float, dt: float) -> None:
    if not (math.isfinite(t) and math.isfinite(dt)):
        raise ValidationError(f"t and dt must be finite, got t={t}, dt={dt}")
    if dt <= 0.0:
        raise ValidationError(f"dt must be positive, got {dt}")
    if t < 0.0:
        raise ValidationError(f"t must be non-negative, got {t}")


def _step_plan(t: float, dt: float) -> typing.Tuple[int, float]:
    if t == 0.0:
        return 0, 0.0
    steps = max(1, int(math.ceil(t / dt - 1e-9)))
    return steps, t / steps


def _rk4_step(g: EvolutionGenerator, p: RealArray, h: float) -> RealArray:
    k1 = g.rate(p)
    k2 = g.rate(p + 0.5 * h * k1)
    k3 = g.rate(p + 0.5 * h * k2)
    k4 = g.rate(p + h * k3)
    return p + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def trajectory(
    g: EvolutionGenerator,
    p0: ProbabilityVector,
    t: float,
    dt: float,
    every: int = 1,
) -> typing.List[typing.Tuple[float, RealArray]]:
    """
    Integrate dP/dt = L P from 0 to t with fixed classical RK4 steps.

    The step count is ceil(t / dt) and the step is shrunk to land exactly on
    t. Rows are kept every `every` steps; the first and last rows are always
    present, so t = 0 yields a single row.

    Raises:
        ValidationError: For non-finite input, dt <= 0, t < 0 or every < 1
        DimensionMismatchError: If p0 does not match the generator
    """
    _check_times(t, dt)
    if every < 1:
        raise ValidationError(f"every must be >= 1, got {every}")
    require_dim(g.size, len(p0), "probability vector")

    p = np.array(p0.values, dtype=float)
    rows = [(0.0, p.copy())]
    steps, h = _step_plan(t, dt)
    for k in range(1, steps + 1):
        p = _rk4_step(g, p, h)
        if k % every == 0 or k == steps:
            rows.append((k * h, p.copy()))
    return rows


def propagate(g: EvolutionGenerator, p0: ProbabilityVector, t: float, dt: float) -> ProbabilityVector:
    """
    P(t) from fixed-step RK4; the global error is O(dt^4).

    A sampled P0 keeps its shot count; the raw counts do not evolve and are dropped.
    """
    _check_times(t, dt)
    require_dim(g.size, len(p0), "probability vector")
    steps, h = _step_plan(t, dt)
    p = np.array(p0.values, dtype=float)
    for _ in range(steps):
        p = _rk4_step(g, p, h)
    return ProbabilityVector(p, shots=p0.shots)


def evolve_density(rho0: DensityMatrix, hamiltonian: HermitianOperator, t: float) -> DensityMatrix:
    """rho(t) = U rho0 U^H with U = exp(-i H t)."""
    require_dim(rho0.dim, hamiltonian.dim, "Hamiltonian")
    u = hermitian_exp(hamiltonian, t)
    return DensityMatrix(HermitianOperator(u @ rho0.matrix @ u.conj().T))


def exact_propagate(q: Quorum, rho0: DensityMatrix, hamiltonian: HermitianOperator, t: float) -> ProbabilityVector:
    """Exact probabilities of rho(t); the oracle for `propagate`."""
    require_dim(q.dim, rho0.dim, "density matrix")
    if not math.isfinite(t):
        raise ValidationError(f"t must be finite, got {t}")
    return exact_probabilities(q, evolve_density(rho0, hamiltonian, t))


def normalization_functional(q: Quorum, p: typing.Union[ProbabilityVector, RealArray]) -> float:
    """(1/(2s+1)) sum_n Tr[Q^n] P_n, equal to Tr[rho] and conserved by L."""
    values = p.values if isinstance(p, ProbabilityVector) else np.asarray(p, dtype=float)
    require_dim(q.size, values.size, "probability vector")
    return float(np.dot(normalization_weights(q), values))


def finite_difference_rate(
    q: Quorum,
    rho0: DensityMatrix,
    hamiltonian: HermitianOperator,
    t: float,
    h: float = 1e-4,
) -> RealArray:
    """Centred difference (P(t+h) - P(t-h)) / 2h of the exact probabilities."""
    ahead = exact_probabilities(q, evolve_density(rho0, hamiltonian, t + h)).values
    behind = exact_probabilities(q, evolve_density(rho0, hamiltonian, t - h)).values
    return (ahead - behind) / (2.0 * h)
