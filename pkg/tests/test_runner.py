import numpy as np
import pytest

from pendular.basis import SymmetryBlock, build_basis
from pendular.errors import ConfigError
from pendular.fields import DcSpec, PulseSpec
from pendular.molecule import BENZONITRILE
from pendular.operators import build_operators, total_hamiltonian
from pendular.runner import (
    RunConfig,
    adiabatic_reference,
    prepare_initial,
    run,
    sweep,
    sweep_to_csv,
)
from pendular.spectrum import StateLabel, diagonalize, label_by_field_free

MOL = BENZONITRILE


def small_config(**kw):
    """Cheap config for structural tests: tiny basis, short pulse."""
    args = dict(
        molecule=MOL,
        block=SymmetryBlock(0, "even", "even"),
        initial_label=StateLabel.parse("0_0_0_M0"),
        dc=DcSpec(300.0),
        pulse=PulseSpec(1e10, 0.1),
        J_max=8,
        n_track=4,
        sample_count=40,
    )
    args.update(kw)
    return RunConfig(**args)


class TestRunConfig:
    def test_label_block_consistency(self):
        with pytest.raises(ConfigError, match="M"):
            small_config(initial_label=StateLabel.parse("1_0_1_M1"))
        with pytest.raises(ConfigError, match="parity"):
            small_config(initial_label=StateLabel.parse("1_1_0_M0"))

    def test_sample_count_minimum(self):
        with pytest.raises(ConfigError):
            small_config(sample_count=1)

    def test_post_peak_window_rejected(self):
        with pytest.raises(ConfigError, match="t_end"):
            small_config(pulse=PulseSpec(1e10, 0.1, t_end_ns=0.5))

    def test_label_must_be_tracked(self):
        cfg = small_config(initial_label=StateLabel.parse("4_2_3_M0"), J_max=10)
        with pytest.raises(ConfigError, match="raise n_track"):
            run(cfg)


class TestPrepareInitial:
    def test_ground_state_is_dressed_ground(self):
        cfg = small_config()
        basis = build_basis(cfg.block, cfg.J_max)
        ops = build_operators(basis, MOL)
        psi = prepare_initial(cfg, ops, label_by_field_free(basis, MOL, cfg.n_track))
        h = total_hamiltonian(ops, Es=300.0)
        w, v = diagonalize(h, 1)
        assert abs(np.vdot(v[:, 0], psi.coefficients)) == pytest.approx(1.0, abs=1e-12)

    def test_zero_field_gives_rotor_eigenvector(self):
        cfg = small_config(dc=DcSpec(0.0))
        basis = build_basis(cfg.block, cfg.J_max)
        ops = build_operators(basis, MOL)
        psi = prepare_initial(cfg, ops, label_by_field_free(basis, MOL, cfg.n_track))
        h = total_hamiltonian(ops)
        w, v = diagonalize(h, 1)
        assert abs(np.vdot(v[:, 0], psi.coefficients)) == pytest.approx(1.0, abs=1e-12)

    def test_excited_label_matches_rank(self):
        cfg = small_config(
            block=SymmetryBlock(3, "even"),
            initial_label=StateLabel.parse("4_0_4_M3"),
            J_max=10,
        )
        basis = build_basis(cfg.block, cfg.J_max)
        ops = build_operators(basis, MOL)
        psi = prepare_initial(cfg, ops, label_by_field_free(basis, MOL, cfg.n_track))
        h = total_hamiltonian(ops, Es=300.0)
        _, v = diagonalize(h, 2)
        assert abs(np.vdot(v[:, 1], psi.coefficients)) == pytest.approx(1.0, abs=1e-12)

    def test_adiabatic_ramp_reproduces_instantaneous_mode(self):
        slow = DcSpec(300.0, mode="ramp", ramp_rate=30.0)  # 10 ns ramp
        cfg = small_config(dc=slow)
        basis = build_basis(cfg.block, cfg.J_max)
        ops = build_operators(basis, MOL)
        labels = label_by_field_free(basis, MOL, cfg.n_track)
        psi_ramp = prepare_initial(cfg, ops, labels)
        psi_inst = prepare_initial(small_config(), ops, labels)
        assert abs(np.vdot(psi_inst.coefficients, psi_ramp.coefficients)) > 0.9999

    def test_fast_ramp_warns(self):
        fast = DcSpec(300.0, mode="ramp", ramp_rate=3e5)  # 1 ps ramp: diabatic
        cfg = small_config(
            block=SymmetryBlock(3, "even"),
            initial_label=StateLabel.parse("3_2_2_M3"),
            dc=fast,
            J_max=8,
        )
        basis = build_basis(cfg.block, cfg.J_max)
        ops = build_operators(basis, MOL)
        labels = label_by_field_free(basis, MOL, cfg.n_track)
        with pytest.warns(UserWarning, match="not adiabatic"):
            prepare_initial(cfg, ops, labels)


@pytest.fixture(scope="module")
def stationary():
    """No pulse: populations and orientation must stay frozen."""
    cfg = small_config(pulse=PulseSpec(0.0, 0.1, t_start_ns=-0.5), sample_count=25)
    return run(cfg)


@pytest.fixture(scope="module")
def short_pulse():
    return run(small_config())


class TestRun:
    def test_stationary_populations(self, stationary):
        pop = stationary.population("0_0_0_M0")
        assert pop[0] == pytest.approx(1.0, abs=1e-10)
        assert np.abs(pop - pop[0]).max() < 1e-8

    def test_stationary_cos_theta(self, stationary):
        assert np.abs(stationary.cos_theta - stationary.cos_theta[0]).max() < 1e-8

    def test_norm_column(self, stationary):
        assert np.abs(stationary.norm - 1.0).max() < 1e-7

    def test_projection_consistency(self, stationary):
        total = sum(stationary.populations[str(l)] for l in stationary.labels)
        np.testing.assert_allclose(total + stationary.leakage, 1.0, atol=1e-7)

    def test_pulse_run_monotone_time(self, short_pulse):
        assert np.all(np.diff(short_pulse.t_ns) > 0.0)
        assert short_pulse.t_ns[-1] == 0.0
        assert short_pulse.intensity[-1] == pytest.approx(1e10)

    def test_pulse_run_leakage_small(self, short_pulse):
        assert short_pulse.leakage.max() < 1e-3

    def test_populations_bounded(self, short_pulse):
        total = sum(short_pulse.populations[str(l)] for l in short_pulse.labels)
        assert np.all(total <= 1.0 + 1e-8)
        assert np.all(short_pulse.cos_theta >= -1.0) and np.all(short_pulse.cos_theta <= 1.0)

    def test_trajectory_csv(self, short_pulse, tmp_path):
        path = tmp_path / "traj.csv"
        short_pulse.to_csv(path)
        lines = path.read_text().strip().splitlines()
        header = lines[0].split(",")
        assert header[:6] == ["t_ns", "I_Wcm2", "Es_Vcm", "cos_theta", "norm", "energy_MHz"]
        assert header[6] == "pop_0_0_0_M0"
        assert len(lines) == short_pulse.t_ns.shape[0] + 1


class TestAdiabaticReference:
    def test_matches_direct_expectation(self):
        cfg = small_config(pulse=PulseSpec(5e10, 1.0), J_max=16)
        basis = build_basis(cfg.block, cfg.J_max)
        ops = build_operators(basis, MOL)
        h = total_hamiltonian(ops, Es=300.0, intensity=5e10)
        _, v = diagonalize(h, 1)
        expected = float(v[:, 0] @ ops.dense("cos") @ v[:, 0])
        assert adiabatic_reference(cfg) == pytest.approx(expected, abs=1e-9)


class TestSweep:
    def test_rows_keep_order_and_isolate_failures(self):
        good = small_config(sample_count=20)
        rows = sweep([good, good], threads=1)
        assert len(rows) == 2
        assert rows[0].error is None
        assert rows[0].cos_theta_t0 == pytest.approx(rows[1].cos_theta_t0)
        assert rows[0].top_populations[0][0] == "0_0_0_M0"

    def test_empty_sweep(self):
        assert sweep([]) == []

    def test_sweep_csv(self, tmp_path):
        rows = sweep([small_config(sample_count=20)])
        path = tmp_path / "sweep.csv"
        sweep_to_csv(rows, path)
        lines = path.read_text().strip().splitlines()
        assert lines[0].startswith("config_id,cos_theta_t0,pop1_label")
        assert len(lines) == 2

    def test_threaded_matches_serial(self):
        cfgs = [small_config(sample_count=15), small_config(sample_count=15, J_max=7)]
        serial = sweep(cfgs, threads=1)
        threaded = sweep(cfgs, threads=2)
        for a, b in zip(serial, threaded):
            assert a.cos_theta_t0 == pytest.approx(b.cos_theta_t0, abs=1e-12)
