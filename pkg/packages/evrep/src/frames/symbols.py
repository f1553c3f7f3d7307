"""
Symbol Calculus Module

The two-sided symbol calculus on a quorum:
- lower symbols A_n = Tr[A Q_n] and upper symbols A^n = Tr[A Q^n]
- reconstruction of an operator from either symbol
- trace pairings Tr[A B] computed entirely in symbol space

Symbols carry their variance so a lower symbol is never silently used where
an upper one is expected.
"""

import enum
import typing
from dataclasses import dataclass

import numpy as np

from ..core.exceptions import ValidationError
from ..core.types import HermitianOperator, RealArray, require_dim

if typing.TYPE_CHECKING:
    from .quorum import Quorum

# Imaginary parts of lower symbols above this (times the operator scale) are an error
REALITY_ATOL = 1e-12


class Variance(str, enum.Enum):
    """Index position of a symbol."""
    LOWER = "lower"
    UPPER = "upper"


@dataclass(frozen=True, eq=False)
class SymbolVector:
    """N_s real numbers tagged as a lower (covariant) or upper (contravariant) symbol."""
    values: RealArray
    variance: Variance

    def __post_init__(self) -> None:
        raw = np.asarray(self.values)
        if np.iscomplexobj(raw):
            raise ValidationError("Symbol values must be real")
        vals = np.array(raw, dtype=float, copy=True)
        if vals.ndim != 1:
            raise ValidationError(f"Symbol values must be 1-d, got shape {vals.shape}")
        if not np.all(np.isfinite(vals)):
            raise ValidationError("Symbol values must be finite")
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "variance", Variance(self.variance))

    def __len__(self) -> int:
        return int(self.values.size)

    def __add__(self, other: "SymbolVector") -> "SymbolVector":
        if other.variance is not self.variance:
            raise ValidationError("Cannot add symbols of different variance")
        return SymbolVector(self.values + other.values, self.variance)

    def scaled(self, factor: float) -> "SymbolVector":
        return SymbolVector(factor * self.values, self.variance)


def _operator_matrix(q: "Quorum", a: HermitianOperator) -> np.ndarray:
    require_dim(q.dim, a.dim, "operator")
    return a.matrix


def lower_symbol(q: "Quorum", a: HermitianOperator) -> SymbolVector:
    """
    A_n = Tr[A Q_n] = <n_n|A|n_n>.

    Raises:
        DimensionMismatchError: If A does not act on the quorum's Hilbert space
    """
    m = _operator_matrix(q, a)
    raw = np.einsum("in,ij,jn->n", q.states.conj(), m, q.states)
    scale = max(1.0, float(np.max(np.abs(m))))
    if float(np.max(np.abs(raw.imag))) > REALITY_ATOL * scale * q.dim:
        raise ValidationError("Lower symbol has a non-negligible imaginary part")
    return SymbolVector(raw.real, Variance.LOWER)


def upper_symbol(q: "Quorum", a: HermitianOperator) -> SymbolVector:
    """
    A^n = Tr[A Q^n].

    Equals metric_raise(lower_symbol(A)) up to rounding; solved against the
    kernel matrix rather than summed over the explicit duals.
    """
    m = _operator_matrix(q, a)
    return SymbolVector(q.dual_traces(m), Variance.UPPER)


def _require_symbol(q: "Quorum", sym: SymbolVector, variance: Variance) -> None:
    if sym.variance is not variance:
        raise ValidationError(f"Expected a {variance.value} symbol, got {sym.variance.value}")
    require_dim(q.size, len(sym), "symbol vector")


def reconstruct_from_lower(q: "Quorum", sym: SymbolVector) -> HermitianOperator:
    """A = (1/(2s+1)) sum_n A_n Q^n."""
    _require_symbol(q, sym, Variance.LOWER)
    return HermitianOperator(q.dual_sum(sym.values))


def reconstruct_from_upper(q: "Quorum", sym: SymbolVector) -> HermitianOperator:
    """A = (1/(2s+1)) sum_n A^n Q_n."""
    _require_symbol(q, sym, Variance.UPPER)
    return HermitianOperator(np.einsum("n,nij->ij", sym.values, q.kernels) / q.dim)


def trace_pairing(q: "Quorum", a: SymbolVector, b: SymbolVector) -> float:
    """
    Tr[A B] from two symbols.

    Mixed variance:   (1/(2s+1)) sum_n a^n b_n
    Both upper:       (1/(2s+1)^2) sum_nn' G_nn' a^n b^n'
    Both lower:       sum_nn' (G^-1)_nn' a_n b_n'

    The prefactors make all routes agree with the direct matrix trace. With A
    the kernel matrix (G = A^H A), the upper pair is evaluated as
    (A a)^H (A b) and the lower pair as (A^-H a)^H (A^-H b), so neither
    route squares the conditioning of A.
    """
    require_dim(q.size, len(a), "symbol vector")
    require_dim(q.size, len(b), "symbol vector")
    if a.variance is not b.variance:
        return float(np.dot(a.values, b.values)) / q.dim
    if a.variance is Variance.UPPER:
        return float(np.vdot(q.frame @ a.values, q.frame @ b.values).real) / q.dim ** 2
    return float(np.vdot(q.dual_sum(a.values), q.dual_sum(b.values)).real)
