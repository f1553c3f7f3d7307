import numpy as np
import pytest

from conftest import random_hermitian, standard_quorum, unit_norm
from packages.evrep.src.core.exceptions import DimensionMismatchError, ValidationError
from packages.evrep.src.core.types import HermitianOperator
from packages.evrep.src.frames.quorum import metric_lower, metric_raise
from packages.evrep.src.frames.symbols import (
    SymbolVector,
    Variance,
    lower_symbol,
    reconstruct_from_lower,
    reconstruct_from_upper,
    trace_pairing,
    upper_symbol,
)


class TestSymbolVector:
    def test_complex_values_are_rejected(self):
        with pytest.raises(ValidationError):
            SymbolVector(np.array([1.0 + 1j, 0.0]), Variance.LOWER)

    def test_non_finite_values_are_rejected(self):
        with pytest.raises(ValidationError):
            SymbolVector(np.array([np.nan, 0.0]), Variance.UPPER)

    def test_addition_requires_matching_variance(self):
        a = SymbolVector(np.ones(4), Variance.LOWER)
        b = SymbolVector(np.ones(4), Variance.UPPER)
        assert np.allclose((a + a).values, 2.0)
        with pytest.raises(ValidationError):
            a + b

    def test_variance_accepts_string(self):
        assert SymbolVector(np.ones(2), "upper").variance is Variance.UPPER


class TestUnitySymbols:
    @pytest.mark.parametrize("two_s", [1, 2, 4])
    def test_identity_symbols(self, two_s):
        q = standard_quorum(two_s)
        unity = HermitianOperator.identity(q.dim)
        assert np.allclose(lower_symbol(q, unity).values, 1.0, atol=1e-12)
        dual_traces = np.trace(q.duals, axis1=1, axis2=2).real
        assert np.allclose(upper_symbol(q, unity).values, dual_traces, atol=1e-9)


class TestReconstruction:
    @pytest.mark.parametrize("two_s", [1, 2, 3, 4, 6, 10])
    def test_round_trip_through_both_symbols(self, two_s, rng):
        q = standard_quorum(two_s)
        for _ in range(5):
            a = unit_norm(random_hermitian(q.dim, rng))
            assert reconstruct_from_lower(q, lower_symbol(q, a)).max_abs_diff(a) < 1e-9
            assert reconstruct_from_upper(q, upper_symbol(q, a)).max_abs_diff(a) < 1e-9

    def test_upper_symbol_is_raised_lower_symbol(self, rng):
        q = standard_quorum(3)
        a = random_hermitian(q.dim, rng)
        raised = metric_raise(q, lower_symbol(q, a)).values
        direct = upper_symbol(q, a).values
        assert np.allclose(raised, direct, rtol=1e-9, atol=1e-9)
        lowered = metric_lower(q, upper_symbol(q, a)).values
        assert np.allclose(lowered, lower_symbol(q, a).values, atol=1e-9)

    def test_upper_symbol_of_a_dual_is_a_gram_inverse_column(self):
        q = standard_quorum(2)
        for n in (0, 4, q.size - 1):
            upper = upper_symbol(q, q.dual(n)).values
            expected = q.dim ** 2 * q.gram_inverse[:, n]
            assert np.allclose(upper, expected, rtol=1e-8, atol=1e-8)
            lower = lower_symbol(q, q.dual(n)).values
            assert np.allclose(lower, q.dim * np.eye(q.size)[n], atol=1e-9)

    def test_indicator_symbols_reconstruct_kernels(self):
        q = standard_quorum(2)
        for n in (0, 5):
            indicator = np.eye(q.size)[n]
            from_upper = reconstruct_from_upper(q, SymbolVector(q.dim * indicator, Variance.UPPER))
            assert from_upper.max_abs_diff(q.kernel(n)) < 1e-12
            from_lower = reconstruct_from_lower(q, SymbolVector(q.dim * indicator, Variance.LOWER))
            assert from_lower.max_abs_diff(q.dual(n)) < 1e-9

    @pytest.mark.parametrize("two_s", [1, 2, 3])
    def test_kernels_expand_in_their_own_frame(self, two_s):
        q = standard_quorum(two_s)
        for n in range(q.size):
            upper = upper_symbol(q, q.kernel(n)).values
            assert np.allclose(upper, q.dim * np.eye(q.size)[n], atol=1e-9)
            assert reconstruct_from_upper(q, SymbolVector(upper, Variance.UPPER)).max_abs_diff(q.kernel(n)) < 1e-9

    def test_wrong_variance_is_rejected(self, rng):
        q = standard_quorum(1)
        a = random_hermitian(q.dim, rng)
        with pytest.raises(ValidationError):
            reconstruct_from_upper(q, lower_symbol(q, a))
        with pytest.raises(ValidationError):
            reconstruct_from_lower(q, upper_symbol(q, a))

    def test_wrong_length_is_rejected(self):
        q = standard_quorum(1)
        with pytest.raises(DimensionMismatchError):
            reconstruct_from_lower(q, SymbolVector(np.ones(9), Variance.LOWER))

    def test_operator_dimension_is_checked(self):
        q = standard_quorum(1)
        with pytest.raises(DimensionMismatchError):
            lower_symbol(q, HermitianOperator.identity(3))


class TestTracePairing:
    @pytest.mark.parametrize("two_s", [1, 2, 3])
    def test_all_routes_agree_with_matrix_trace(self, two_s, rng):
        q = standard_quorum(two_s)
        for _ in range(10):
            a = random_hermitian(q.dim, rng)
            b = random_hermitian(q.dim, rng)
            direct = float(np.trace(a.matrix @ b.matrix).real)
            a_lo, a_up = lower_symbol(q, a), upper_symbol(q, a)
            b_lo, b_up = lower_symbol(q, b), upper_symbol(q, b)
            for x, y in [(a_up, b_lo), (a_lo, b_up), (a_up, b_up), (a_lo, b_lo)]:
                assert trace_pairing(q, x, y) == pytest.approx(direct, rel=1e-9, abs=1e-9)

    def test_pairing_checks_lengths(self):
        q = standard_quorum(1)
        with pytest.raises(DimensionMismatchError):
            trace_pairing(q, SymbolVector(np.ones(4), Variance.LOWER), SymbolVector(np.ones(3), Variance.UPPER))
