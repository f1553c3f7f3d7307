import json
import math

import numpy as np
import pytest
from typer.testing import CliRunner

from conftest import random_hermitian, unit_norm
from packages.cli.src.commands import get_app
from packages.cli.src.utils.config import RunConfig, load_run_config
from packages.evrep.src.core.spincore import spin_operators
from packages.evrep.src.io.formats import (
    read_probabilities,
    read_quorum,
    read_state,
    read_trajectory,
    write_operator,
    write_state,
)
from packages.evrep.src.tomo.tomography import DensityMatrix, random_density_matrix

runner = CliRunner()
ENV_VARS = ("EVREP_SEED", "EVREP_SHOTS", "EVREP_JOBS")


@pytest.fixture(autouse=True)
def isolated(tmp_path, monkeypatch):
    """Run every command from tmp_path with no EVREP_* settings; values loaded from .env are undone too."""
    monkeypatch.chdir(tmp_path)
    for var in ENV_VARS:
        monkeypatch.setenv(var, "")
        monkeypatch.delenv(var)
    return tmp_path


def invoke(*args: str):
    return runner.invoke(get_app(), [str(a) for a in args])


def make_quorum(tmp_path, two_s: int):
    path = tmp_path / f"q{two_s}.json"
    result = invoke("quorum", path, "--two-s", two_s)
    assert result.exit_code == 0, result.output
    return path


class TestQuorumCommand:
    def test_spin_half(self, tmp_path):
        path = make_quorum(tmp_path, 1)
        q, data = read_quorum(path)
        assert len(data.directions) == 4
        assert data.format == "evrep-quorum/1"
        assert math.isfinite(data.condition_number)

    def test_condition_report(self, tmp_path):
        result = invoke("quorum", tmp_path / "q.json", "--two-s", 2, "--report", tmp_path / "cond.json")
        assert result.exit_code == 0
        report = json.loads((tmp_path / "cond.json").read_text())
        assert report["lambda_min"] > 0
        assert report["singular"] is False

    def test_custom_cones(self, tmp_path):
        result = invoke("quorum", tmp_path / "q.json", "--two-s", 1, "--cone-thetas", "0.8,2.0")
        assert result.exit_code == 0
        _, data = read_quorum(tmp_path / "q.json")
        assert data.cone_thetas == [0.8, 2.0]

    def test_duplicate_cones_fail(self, tmp_path):
        result = invoke("quorum", tmp_path / "q.json", "--two-s", 1, "--cone-thetas", "1.0,1.0")
        assert result.exit_code == 1
        assert not (tmp_path / "q.json").exists()

    def test_invalid_spin(self, tmp_path):
        assert invoke("quorum", tmp_path / "q.json", "--two-s", 0).exit_code != 0

    def test_bad_number_list(self, tmp_path):
        result = invoke("quorum", tmp_path / "q.json", "--two-s", 1, "--cone-thetas", "1.0,x")
        assert result.exit_code != 0


class TestSimulateCommand:
    def test_maximally_mixed_state(self, tmp_path):
        q = make_quorum(tmp_path, 2)
        state = write_state(tmp_path / "rho.json", DensityMatrix.maximally_mixed(2))
        result = invoke("simulate", q, state, "--out", tmp_path / "p.csv")
        assert result.exit_code == 0, result.output
        p = read_probabilities(tmp_path / "p.csv")
        assert p.exact
        assert np.allclose(p.values, 1.0 / 3.0, atol=1e-12)
        assert p.values.sum() == pytest.approx(3.0, abs=1e-10)

    def test_shots_are_deterministic(self, tmp_path, rng):
        q = make_quorum(tmp_path, 1)
        state = write_state(tmp_path / "rho.json", random_density_matrix(1, rng))
        for name in ("a.csv", "b.csv"):
            assert invoke("simulate", q, state, "--out", tmp_path / name, "--shots", 1000, "--seed", 3).exit_code == 0
        assert (tmp_path / "a.csv").read_text() == (tmp_path / "b.csv").read_text()
        assert read_probabilities(tmp_path / "a.csv").shots == 1000

    def test_seed_from_environment(self, tmp_path, rng, monkeypatch):
        q = make_quorum(tmp_path, 1)
        state = write_state(tmp_path / "rho.json", random_density_matrix(1, rng))
        assert invoke("simulate", q, state, "--out", tmp_path / "flag.csv", "--sample", "--seed", 11).exit_code == 0
        monkeypatch.setenv("EVREP_SEED", "11")
        monkeypatch.setenv("EVREP_SHOTS", "10000")
        assert invoke("simulate", q, state, "--out", tmp_path / "env.csv", "--sample").exit_code == 0
        assert (tmp_path / "flag.csv").read_text() == (tmp_path / "env.csv").read_text()

    def test_dimension_mismatch(self, tmp_path):
        q = make_quorum(tmp_path, 1)
        state = write_state(tmp_path / "rho.json", DensityMatrix.maximally_mixed(2))
        assert invoke("simulate", q, state, "--out", tmp_path / "p.csv").exit_code == 1

    def test_invalid_environment(self, tmp_path, monkeypatch):
        q = make_quorum(tmp_path, 1)
        state = write_state(tmp_path / "rho.json", DensityMatrix.maximally_mixed(1))
        monkeypatch.setenv("EVREP_SHOTS", "many")
        assert invoke("simulate", q, state, "--out", tmp_path / "p.csv", "--sample").exit_code == 1


class TestReconstructCommand:
    @pytest.mark.parametrize("two_s", [1, 2, 3])
    def test_exact_round_trip(self, tmp_path, rng, two_s):
        q = make_quorum(tmp_path, two_s)
        rho = random_density_matrix(two_s, rng)
        state = write_state(tmp_path / "rho.json", rho)
        assert invoke("simulate", q, state, "--out", tmp_path / "p.csv").exit_code == 0
        result = invoke(
            "reconstruct", q, tmp_path / "p.csv", "--out", tmp_path / "est.json",
            "--reference", state, "--report", tmp_path / "report.json",
        )
        assert result.exit_code == 0, result.output
        report = json.loads((tmp_path / "report.json").read_text())
        assert report["fidelity"] >= 1 - 1e-9
        assert report["physical"] is True
        assert read_state(tmp_path / "est.json").op.max_abs_diff(rho.op) < 1e-9

    def test_sampled_data_with_repair(self, tmp_path, rng):
        q = make_quorum(tmp_path, 2)
        state = write_state(tmp_path / "rho.json", random_density_matrix(2, rng))
        assert invoke("simulate", q, state, "--out", tmp_path / "p.csv", "--shots", 200, "--seed", 1).exit_code == 0
        result = invoke("reconstruct", q, tmp_path / "p.csv", "--out", tmp_path / "est.json", "--psd-repair")
        assert result.exit_code == 0, result.output
        est = read_state(tmp_path / "est.json")
        assert est.is_psd and est.is_normalized

    def test_malformed_csv(self, tmp_path):
        q = make_quorum(tmp_path, 1)
        bad = tmp_path / "p.csv"
        bad.write_text("# evrep-probabilities/1\nn,theta,phi,value\n0,abc,0,0.5\n")
        result = invoke("reconstruct", q, bad, "--out", tmp_path / "est.json")
        assert result.exit_code == 1
        assert not (tmp_path / "est.json").exists()


class TestCheckCommand:
    def test_standard_quorum_passes(self, tmp_path):
        q = make_quorum(tmp_path, 3)
        result = invoke("check", q, "--out", tmp_path / "check.json")
        assert result.exit_code == 0, result.output
        report = json.loads((tmp_path / "check.json").read_text())
        assert report["passed"] is True
        names = [c["name"] for c in report["checks"]]
        assert names[:4] == ["hermiticity", "completeness", "biorthogonality", "covariance"]
        assert "inversion_duality" in names
        assert all(c["pass"] for c in report["checks"])

    def test_perturbed_duals_fail(self, tmp_path):
        q = make_quorum(tmp_path, 2)
        result = invoke("check", q, "--out", tmp_path / "check.json", "--perturb", "1e-3")
        assert result.exit_code == 1
        report = json.loads((tmp_path / "check.json").read_text())
        assert report["passed"] is False
        failed = {c["name"] for c in report["checks"] if not c["pass"]}
        assert {"hermiticity", "completeness", "biorthogonality", "inversion_duality"} <= failed

    def test_tampered_condition_number(self, tmp_path):
        q = make_quorum(tmp_path, 1)
        data = json.loads(q.read_text())
        data["condition_number"] *= 2.0
        q.write_text(json.dumps(data))
        result = invoke("check", q, "--out", tmp_path / "check.json")
        assert result.exit_code == 1
        checks = json.loads((tmp_path / "check.json").read_text())["checks"]
        assert [c["pass"] for c in checks if c["name"] == "stored_condition_number"] == [False]

    def test_non_unit_axis(self, tmp_path):
        q = make_quorum(tmp_path, 1)
        assert invoke("check", q, "--axis", "1,1,0").exit_code != 0


class TestEvolveCommand:
    def _inputs(self, tmp_path, two_s, rng, hamiltonian=None):
        q = make_quorum(tmp_path, two_s)
        state = write_state(tmp_path / "rho.json", random_density_matrix(two_s, rng))
        h = hamiltonian if hamiltonian is not None else unit_norm(random_hermitian(two_s + 1, rng))
        return q, state, write_operator(tmp_path / "h.json", h)

    def test_zero_time(self, tmp_path, rng):
        q, state, h = self._inputs(tmp_path, 1, rng)
        result = invoke("evolve", q, state, h, "--t", 0, "--dt", 0.01, "--out", tmp_path / "traj.csv")
        assert result.exit_code == 0, result.output
        rows = read_trajectory(tmp_path / "traj.csv")
        assert len(rows) == 1 and rows[0][0] == 0.0

    def test_full_period_of_sz(self, tmp_path, rng):
        q, state, h = self._inputs(tmp_path, 2, rng, spin_operators(2)[2])
        result = invoke(
            "evolve", q, state, h, "--t", 2 * math.pi, "--dt", 1e-3,
            "--every", 100, "--out", tmp_path / "traj.csv",
        )
        assert result.exit_code == 0, result.output
        rows = read_trajectory(tmp_path / "traj.csv")
        assert rows[-1][0] == pytest.approx(2 * math.pi)
        assert np.max(np.abs(rows[-1][1] - rows[0][1])) < 1e-8

    def test_oracle(self, tmp_path, rng):
        q, state, h = self._inputs(tmp_path, 2, rng)
        result = invoke(
            "evolve", q, state, h, "--t", 1.0, "--dt", 1e-3,
            "--every", 100, "--oracle", "--out", tmp_path / "traj.csv",
        )
        assert result.exit_code == 0, result.output

    def test_oracle_catches_coarse_steps(self, tmp_path, rng):
        q, state, h = self._inputs(tmp_path, 2, rng)
        result = invoke(
            "evolve", q, state, h, "--t", 5.0, "--dt", 0.5,
            "--oracle", "--tolerance", "1e-12", "--out", tmp_path / "traj.csv",
        )
        assert result.exit_code == 1

    def test_state_file_is_not_a_hamiltonian(self, tmp_path, rng):
        q, state, _ = self._inputs(tmp_path, 1, rng)
        result = invoke("evolve", q, state, state, "--t", 1, "--dt", 0.1, "--out", tmp_path / "traj.csv")
        assert result.exit_code == 1

    def test_negative_step(self, tmp_path, rng):
        q, state, h = self._inputs(tmp_path, 1, rng)
        result = invoke("evolve", q, state, h, "--t", 1, "--dt", -0.1, "--out", tmp_path / "traj.csv")
        assert result.exit_code == 1


class TestScalingCommand:
    def test_report_is_written(self, tmp_path, rng):
        q = make_quorum(tmp_path, 1)
        state = write_state(tmp_path / "rho.json", random_density_matrix(1, rng))
        invoke(
            "scaling", q, state, "--shots-grid", "100,10000", "--seeds", 5,
            "--jobs", 2, "--out", tmp_path / "scaling.json",
        )
        report = json.loads((tmp_path / "scaling.json").read_text())
        assert report["shots"] == [100, 10000]
        assert len(report["median_errors"]) == 2
        assert report["seeds"] == 5

    def test_bad_grid(self, tmp_path, rng):
        q = make_quorum(tmp_path, 1)
        state = write_state(tmp_path / "rho.json", random_density_matrix(1, rng))
        assert invoke("scaling", q, state, "--shots-grid", "100,0.5").exit_code != 0


class TestRunConfig:
    def test_defaults(self, tmp_path):
        assert load_run_config(tmp_path) == RunConfig(seed=0, shots=10_000, jobs=1)

    def test_precedence(self, tmp_path, monkeypatch):
        (tmp_path / "evrep.toml").write_text("[evrep]\nseed = 4\nshots = 50\njobs = 2\n")
        assert load_run_config(tmp_path) == RunConfig(seed=4, shots=50, jobs=2)
        monkeypatch.setenv("EVREP_SHOTS", "70")
        assert load_run_config(tmp_path) == RunConfig(seed=4, shots=70, jobs=2)
        assert load_run_config(tmp_path, shots=90, seed=None) == RunConfig(seed=4, shots=90, jobs=2)

    def test_dotenv_file(self, tmp_path):
        (tmp_path / ".env").write_text("EVREP_JOBS=3\n")
        assert load_run_config(tmp_path).jobs == 3

    def test_invalid_values(self, tmp_path, monkeypatch):
        with pytest.raises(ValueError):
            load_run_config(tmp_path, shots=0)
        (tmp_path / "evrep.toml").write_text("[evrep]\nseed = 'abc'\n")
        with pytest.raises(ValueError):
            load_run_config(tmp_path)
        (tmp_path / "evrep.toml").write_text("[evrep\n")
        with pytest.raises(ValueError):
            load_run_config(tmp_path)
