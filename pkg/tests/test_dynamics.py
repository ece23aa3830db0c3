"""Gate tests for the structured kernels against dense-basis propagators."""

import numpy as np
import pytest

from wglink.dynamics import (
    evolve_double,
    evolve_single,
    filter_index,
    mode_slice,
    pair_initial,
    single_initial,
    snapshot_spectrum,
)
from wglink.model import ConfigurationError, EmitterSpec, NetworkSpec, WaveguideSpec
from wglink.units import ghz, mhz
from wglink.wavepackets import Control, TimeGrid, sech_mode, synthesize_control, time_reverse

from _dense_oracle import (
    pair_basis,
    pair_vector_from_matrix,
    propagate_double_ivp,
    propagate_single_expm,
    propagate_single_ivp,
)

KAPPA = mhz(20.0)
W_C = ghz(8.9)


@pytest.fixture(scope="module")
def net():
    wg = WaveguideSpec(length=2.0, cross_section=0.02286, n_modes=8, center_frequency=W_C)
    emitters = [
        EmitterSpec(qubit_frequency=W_C, filter_frequency=W_C, kappa=KAPPA, node_side="left"),
        EmitterSpec(qubit_frequency=W_C, filter_frequency=W_C, kappa=KAPPA, node_side="right"),
    ]
    return NetworkSpec(waveguide=wg, emitters=emitters)


@pytest.fixture(scope="module")
def grid():
    return TimeGrid(-2.0 / KAPPA, 2.0 / KAPPA, 80)


@pytest.fixture(scope="module")
def controls(net, grid):
    send = synthesize_control(sech_mode(KAPPA, TimeGrid(-2.0 / KAPPA, 2.0 / KAPPA, 2000)), KAPPA)
    return [send, time_reverse(send)]


def _const_control(grid, value, phase=0.0):
    n = grid.n_steps + 1
    return Control(grid=grid, modulus=np.full(n, value), phase=np.full(n, phase))


class TestSingleExcitation:
    def test_norm_conserved(self, net, grid, controls):
        traj = evolve_single(net, controls, grid)
        assert np.max(np.abs(traj.norm - 1.0)) < 1e-10

    def test_constant_control_vs_expm(self, net, grid):
        ctrls = [_const_control(grid, 0.3 * KAPPA), _const_control(grid, 0.17 * KAPPA, 0.7)]
        traj = evolve_single(net, ctrls, grid, dt_scale=0.05)
        g = [0.3 * KAPPA * np.exp(0j), 0.17 * KAPPA * np.exp(0.7j)]
        x_ref = propagate_single_expm(net, g, traj.frame, grid.t1 - grid.t0, single_initial(net))
        assert np.max(np.abs(traj.final_state - x_ref)) < 1e-10

    def test_time_dependent_vs_ivp(self, net, grid, controls):
        traj = evolve_single(net, controls, grid)
        x_ref = propagate_single_ivp(
            net, controls, traj.frame, grid.t0, grid.t1, single_initial(net)
        )[:, -1]
        assert np.max(np.abs(traj.final_state - x_ref)) < 1e-8

    def test_linearity(self, net, grid, controls):
        x_a = single_initial(net, 0)
        x_b = np.zeros_like(x_a)
        x_b[filter_index(net, 1)] = 1.0
        fa = evolve_single(net, controls, grid, initial=x_a).final_state
        fb = evolve_single(net, controls, grid, initial=x_b).final_state
        mix = (0.6 + 0.1j) * x_a + (0.2 - 0.3j) * x_b
        fm = evolve_single(net, controls, grid, initial=mix).final_state
        assert np.max(np.abs(fm - ((0.6 + 0.1j) * fa + (0.2 - 0.3j) * fb))) < 1e-12

    def test_snapshots(self, net, grid, controls):
        ts = 0.5 * (grid.t0 + grid.t1)
        traj = evolve_single(net, controls, grid, snapshot_times=(grid.t0, ts, grid.t1))
        assert len(traj.snapshots) == 3
        freqs, psi = snapshot_spectrum(traj, ts)
        assert freqs.shape == psi.shape == (net.n_modes,)
        i = int(round((ts - grid.t0) / grid.dt))
        assert np.sum(np.abs(psi) ** 2) == pytest.approx(traj.mode_pop[i], abs=1e-12)

    def test_grid_required(self, net, controls):
        with pytest.raises(ConfigurationError):
            evolve_single(net, controls, None)

    def test_bad_initial_shape(self, net, grid, controls):
        with pytest.raises(ConfigurationError):
            evolve_single(net, controls, grid, initial=np.ones(3, dtype=complex))


class TestDoubleExcitation:
    def test_oracle_gate(self, net, grid, controls):
        traj = evolve_double(net, controls, grid)
        pairs = pair_basis(net)
        psi0 = pair_vector_from_matrix(pair_initial(net), pairs)
        assert np.linalg.norm(psi0) == pytest.approx(1.0, abs=1e-14)
        psi_ref = propagate_double_ivp(net, controls, traj.frame, grid.t0, grid.t1, psi0, pairs)
        psi_got = pair_vector_from_matrix(traj.final_state, pairs)
        assert np.max(np.abs(psi_got - psi_ref)) < 1e-8

    def test_norm_conserved(self, net, grid, controls):
        traj = evolve_double(net, controls, grid)
        assert np.max(np.abs(traj.norm - 1.0)) < 1e-8

    def test_hard_core_pinned(self, net, grid, controls):
        traj = evolve_double(net, controls, grid)
        for j in range(net.n_emitters):
            assert traj.final_state[j, j] == 0.0

    def test_frozen_spectator_matches_single(self, net, grid, controls):
        # qubit 1 has no control, so its excitation is inert and every pair
        # amplitude against it follows the one-excitation dynamics exactly
        ctrls = [controls[0], None]
        dbl = evolve_double(net, ctrls, grid)
        sng = evolve_single(net, ctrls, grid)
        b = np.arange(dbl.final_state.shape[0]) != 1
        got = np.sqrt(2.0) * dbl.final_state[1, b]
        want = sng.final_state[b]
        assert np.max(np.abs(got - want)) < 1e-6

    def test_symmetry_preserved(self, net, grid, controls):
        M = evolve_double(net, controls, grid).final_state
        assert np.max(np.abs(M - M.T)) == 0.0

    def test_rejects_double_occupied_qubit(self, net, grid, controls):
        M0 = pair_initial(net)
        M0[0, 0] = 0.1
        with pytest.raises(ConfigurationError):
            evolve_double(net, controls, grid, initial=M0)

    def test_rejects_asymmetric_initial(self, net, grid, controls):
        M0 = pair_initial(net)
        M0[0, 1] *= 2.0
        with pytest.raises(ConfigurationError):
            evolve_double(net, controls, grid, initial=M0)


class TestConvergence:
    def test_half_step_agreement(self, net, grid, controls):
        f1 = evolve_single(net, controls, grid).final_state
        f2 = evolve_single(net, controls, grid, dt_scale=0.5).final_state
        assert np.max(np.abs(f1 - f2)) < 1e-9
