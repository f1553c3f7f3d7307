import math

import numpy as np
import pytest

from conftest import standard_quorum
from packages.evrep.src.core.exceptions import (
    DegenerateStateError,
    DimensionMismatchError,
    InvalidStateError,
    ValidationError,
)
from packages.evrep.src.core.spincore import coherent_state
from packages.evrep.src.core.types import StateVector
from packages.evrep.src.tomo import tomography
from packages.evrep.src.tomo.tomography import (
    DensityMatrix,
    ProbabilityVector,
    Reconstruction,
    exact_probabilities,
    fidelity,
    normalization_weights,
    normalize,
    psd_project,
    random_density_matrix,
    random_pure_state,
    reconstruct_density,
    sample_counts,
    shot_noise_scaling,
    validate_probabilities,
)


class TestExactProbabilities:
    @pytest.mark.parametrize("two_s", [1, 2, 3, 6])
    def test_maximally_mixed_state(self, two_s):
        q = standard_quorum(two_s)
        p = exact_probabilities(q, DensityMatrix.maximally_mixed(two_s))
        assert np.allclose(p.values, 1.0 / q.dim, atol=1e-12)
        assert p.values.sum() == pytest.approx(q.dim, abs=1e-10)
        assert p.exact

    def test_coherent_state_along_first_direction(self):
        q = standard_quorum(3)
        rho = DensityMatrix.pure(coherent_state(3, q.scheme.directions[0]))
        p = exact_probabilities(q, rho)
        assert p.values[0] == pytest.approx(1.0, abs=1e-12)
        assert np.all(p.values[1:] < 1.0)

    def test_probabilities_are_bounded(self, rng):
        q = standard_quorum(4)
        for _ in range(10):
            p = exact_probabilities(q, random_density_matrix(4, rng)).values
            assert np.all((p >= 0.0) & (p <= 1.0))
            assert 0.0 < p.sum() < q.dim ** 2

    def test_non_psd_state_is_rejected(self):
        q = standard_quorum(1)
        with pytest.raises(InvalidStateError) as excinfo:
            exact_probabilities(q, DensityMatrix.from_matrix(np.diag([1.5, -0.5])))
        assert excinfo.value.min_eigenvalue == pytest.approx(-0.5)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            exact_probabilities(standard_quorum(1), DensityMatrix.maximally_mixed(2))


class TestReconstruction:
    @pytest.mark.parametrize("two_s", [1, 2, 3, 4])
    def test_exact_round_trip(self, two_s, rng):
        q = standard_quorum(two_s)
        for _ in range(10):
            rho = random_density_matrix(two_s, rng)
            result = reconstruct_density(q, exact_probabilities(q, rho))
            assert result.density.op.max_abs_diff(rho.op) < 1e-9
            assert result.is_physical

    def test_pure_state_round_trip(self, rng):
        q = standard_quorum(2)
        rho = DensityMatrix.pure(random_pure_state(2, rng))
        estimate = reconstruct_density(q, exact_probabilities(q, rho)).density
        assert fidelity(rho, estimate) == pytest.approx(1.0, abs=1e-9)

    def test_sampled_estimate_reports_diagnostics(self):
        q = standard_quorum(2)
        rho = DensityMatrix.pure(coherent_state(2, q.scheme.directions[4]))
        p = sample_counts(exact_probabilities(q, rho), 100, seed=3)
        result = reconstruct_density(q, p)
        assert math.isfinite(result.trace)
        assert result.min_eigenvalue == pytest.approx(result.density.min_eigenvalue())

    def test_sampled_trace_within_shot_noise(self, rng):
        q = standard_quorum(2)
        shots = 10_000
        exact = exact_probabilities(q, random_density_matrix(2, rng))
        result = reconstruct_density(q, sample_counts(exact, shots, seed=11))
        w = normalization_weights(q)
        p = exact.values
        sigma = math.sqrt(float(np.sum(w ** 2 * p * (1.0 - p))) / shots)
        assert abs(result.trace - 1.0) < 5.0 * sigma

    @pytest.mark.parametrize("two_s", [5, 8, 10])
    def test_round_trip_at_larger_spin(self, two_s, rng):
        q = standard_quorum(two_s)
        for _ in range(5):
            rho = random_density_matrix(two_s, rng)
            estimate = reconstruct_density(q, exact_probabilities(q, rho)).density
            assert estimate.op.max_abs_diff(rho.op) < 1e-9

    def test_length_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            reconstruct_density(standard_quorum(1), ProbabilityVector(np.ones(5)))


class TestSampling:
    def test_same_seed_same_counts(self):
        q = standard_quorum(2)
        p = exact_probabilities(q, DensityMatrix.maximally_mixed(2))
        a = sample_counts(p, 1000, seed=7)
        b = sample_counts(p, 1000, seed=7)
        assert np.array_equal(a.counts, b.counts)
        assert a.shots == 1000
        assert np.allclose(a.values, a.counts / 1000)

    @pytest.mark.parametrize("shots", [0, -5, 2.5])
    def test_invalid_shots(self, shots):
        p = exact_probabilities(standard_quorum(1), DensityMatrix.maximally_mixed(1))
        with pytest.raises(ValidationError):
            sample_counts(p, shots, seed=0)

    def test_certain_outcomes_are_reproduced(self):
        p = ProbabilityVector(np.array([0.0, 1.0, 0.25, 1.0]))
        sampled = sample_counts(p, 400, seed=9)
        assert sampled.counts[0] == 0
        assert sampled.counts[1] == 400
        assert sampled.counts[3] == 400
        assert 0 < sampled.counts[2] < 400

    def test_frequencies_concentrate_with_shots(self, rng):
        q = standard_quorum(2)
        exact = exact_probabilities(q, random_density_matrix(2, rng))
        few = np.max(np.abs(sample_counts(exact, 100, seed=4).values - exact.values))
        many = np.max(np.abs(sample_counts(exact, 1_000_000, seed=4).values - exact.values))
        assert many < few
        assert many < 5e-3

    def test_sampled_input_is_rejected(self):
        p = exact_probabilities(standard_quorum(1), DensityMatrix.maximally_mixed(1))
        with pytest.raises(ValidationError):
            sample_counts(sample_counts(p, 10, seed=0), 10, seed=0)


class TestValidation:
    def test_exact_data_passes(self, rng):
        q = standard_quorum(3)
        report = validate_probabilities(q, exact_probabilities(q, random_density_matrix(3, rng)))
        assert report.passed
        assert report.normalization_residual < 1e-9

    def test_value_above_one_fails(self):
        q = standard_quorum(1)
        report = validate_probabilities(q, ProbabilityVector(np.array([1.2, 0.1, 0.1, 0.1])))
        assert not report.in_unit_interval
        assert not report.passed

    def test_all_ones_exceeds_sum_bound(self):
        q = standard_quorum(1)
        report = validate_probabilities(q, ProbabilityVector(np.ones(q.size)))
        assert report.in_unit_interval
        assert not report.sum_in_bounds
        assert not report.passed

    def test_wrong_length_is_reported(self):
        report = validate_probabilities(standard_quorum(1), ProbabilityVector(np.ones(3) / 3))
        assert not report.length_ok
        assert not report.passed

    def test_sampled_normalization_residual_does_not_gate(self):
        q = standard_quorum(2)
        exact = exact_probabilities(q, DensityMatrix.maximally_mixed(2))
        report = validate_probabilities(q, sample_counts(exact, 50, seed=1))
        assert not report.exact
        assert report.passed == (report.in_unit_interval and report.sum_in_bounds)

    def test_normalization_weights_reproduce_trace(self, rng):
        q = standard_quorum(3)
        rho = random_density_matrix(3, rng)
        p = exact_probabilities(q, rho).values
        assert float(normalization_weights(q) @ p) == pytest.approx(1.0, abs=1e-10)


class TestStateRepair:
    def test_normalize(self):
        rho = DensityMatrix.from_matrix(np.diag([0.4, 0.4]))
        assert normalize(rho).trace() == pytest.approx(1.0)

    def test_normalize_degenerate(self):
        with pytest.raises(DegenerateStateError):
            normalize(DensityMatrix.from_matrix(np.zeros((2, 2))))

    def test_psd_project(self):
        rho = psd_project(DensityMatrix.from_matrix(np.diag([1.2, -0.1, -0.1])))
        assert rho.is_psd and rho.is_normalized
        assert np.allclose(np.diag(rho.matrix).real, [1.0, 0.0, 0.0])

    def test_psd_project_clips_and_is_idempotent(self):
        rho = psd_project(DensityMatrix.from_matrix(np.diag([1.1, -0.1])))
        assert np.allclose(rho.matrix, np.diag([1.0, 0.0]), atol=1e-12)
        again = psd_project(rho)
        assert np.allclose(again.matrix, rho.matrix, atol=1e-12)

    def test_psd_project_of_negative_operator(self):
        with pytest.raises(DegenerateStateError):
            psd_project(DensityMatrix.from_matrix(-np.eye(2)))


class TestFidelity:
    def test_identical_and_orthogonal_states(self):
        up = DensityMatrix.pure(StateVector([1, 0]))
        down = DensityMatrix.pure(StateVector([0, 1]))
        assert fidelity(up, up) == pytest.approx(1.0)
        assert fidelity(up, down) == pytest.approx(0.0, abs=1e-12)

    def test_symmetric_and_bounded(self, rng):
        a, b = random_density_matrix(3, rng), random_density_matrix(3, rng)
        assert fidelity(a, b) == pytest.approx(fidelity(b, a), abs=1e-10)
        assert 0.0 <= fidelity(a, b) <= 1.0 + 1e-12

    def test_pure_state_fidelity_never_exceeds_one(self, rng):
        q = standard_quorum(6)
        for _ in range(5):
            rho = DensityMatrix.pure(random_pure_state(6, rng))
            estimate = reconstruct_density(q, exact_probabilities(q, rho)).density
            f = fidelity(rho, estimate)
            assert f <= 1.0
            assert f == pytest.approx(1.0, abs=1e-9)
            assert fidelity(estimate, rho) <= 1.0

    def test_rank_one_fidelity_is_expectation(self, rng):
        psi = random_pure_state(3, rng)
        sigma = random_density_matrix(3, rng)
        expected = float(np.vdot(psi.amplitudes, sigma.matrix @ psi.amplitudes).real)
        assert fidelity(DensityMatrix.pure(psi), sigma) == pytest.approx(expected, abs=1e-12)

    def test_random_states_are_physical(self, rng):
        for _ in range(5):
            rho = random_density_matrix(4, rng)
            assert rho.is_psd and rho.is_normalized
        assert random_pure_state(4, rng).norm() == pytest.approx(1.0)


class TestShotNoiseScaling:
    def test_jobs_do_not_change_results(self, rng):
        q = standard_quorum(1)
        rho = random_density_matrix(1, rng)
        serial = shot_noise_scaling(q, rho, [100, 1000], seeds=6, base_seed=5, jobs=1)
        threaded = shot_noise_scaling(q, rho, [100, 1000], seeds=6, base_seed=5, jobs=3)
        assert serial.median_errors == threaded.median_errors
        assert serial.slope == threaded.slope

    def test_needs_two_shot_counts(self, rng):
        with pytest.raises(ValidationError):
            shot_noise_scaling(standard_quorum(1), random_density_matrix(1, rng), [100])

    def test_zero_error_points_are_left_out_of_the_fit(self, rng, monkeypatch):
        q = standard_quorum(1)
        rho = random_density_matrix(1, rng)
        original = tomography.reconstruct_density

        def exact_at_high_shots(quorum, p):
            if p.shots >= 10_000:
                return Reconstruction(rho, 1.0, rho.min_eigenvalue())
            return original(quorum, p)

        monkeypatch.setattr(tomography, "reconstruct_density", exact_at_high_shots)
        report = shot_noise_scaling(q, rho, [100, 1000, 10_000], seeds=6, base_seed=1)
        assert report.median_errors[-1] == 0.0
        assert math.isfinite(report.slope)
        assert report.slope < 0.0

    def test_vanishing_errors_cannot_be_fitted(self, rng, monkeypatch):
        q = standard_quorum(1)
        rho = random_density_matrix(1, rng)
        monkeypatch.setattr(
            tomography, "reconstruct_density", lambda quorum, p: Reconstruction(rho, 1.0, 0.0)
        )
        with pytest.raises(ValidationError):
            shot_noise_scaling(q, rho, [100, 1000], seeds=3)
