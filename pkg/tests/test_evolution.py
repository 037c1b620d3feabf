import numpy as np
import pytest

from darkpath.darkbright import basis_from_angles
from darkpath.evolution import (
    DEFAULT_CONFIG,
    IntegratorConfig,
    Trajectory,
    dark_path_state,
    evolve_state,
    loop_propagator,
    propagate,
    propagate_operator,
    simulate_state,
)
from darkpath.levels import fidelity, unitarity_defect
from darkpath.pulses import PulseSchedule, hamiltonian, qutrit_loop

from conftest import random_loop


class TestPropagateOperator:
    def test_zero_hamiltonian_gives_identity(self):
        u = propagate_operator(lambda t: np.zeros((4, 4)), 0.0, 1.0, 4)
        assert np.max(np.abs(u - np.eye(4))) < 1e-10

    def test_constant_rabi_closed_form(self):
        # two-level (Omega/2)(|b><e| + h.c.) for time T rotates by Omega*T/2
        omega, T = 1.3, 0.9
        h = 0.5 * omega * np.array([[0, 1], [1, 0]], dtype=complex)
        u = propagate_operator(lambda t: h, 0.0, T, 2)
        half = omega * T / 2
        expected = np.array(
            [[np.cos(half), -1j * np.sin(half)], [-1j * np.sin(half), np.cos(half)]]
        )
        assert np.max(np.abs(u - expected)) < 1e-8

    def test_rejects_reversed_interval(self):
        with pytest.raises(ValueError):
            propagate_operator(lambda t: np.zeros((2, 2)), 1.0, 0.0, 2)

    def test_failure_carries_time(self):
        from darkpath.evolution import IntegrationError

        # a non-integrable pole forces step underflow mid-interval
        def blow_up(t):
            return np.eye(2) / (t - 0.5)

        with pytest.raises(IntegrationError) as exc:
            propagate_operator(blow_up, 0.0, 1.0, 2)
        assert 0.0 <= exc.value.t <= 1.0


class TestSegmentPropagator:
    def test_first_segment_maps_brights_to_excited(self, rng):
        # the half loop sends b_k -> +i e_k for k <= d-2 and b_{d-1} -> -i e_{d-1}
        loop = random_loop(rng, 3, eta=4.0)
        basis = basis_from_angles(loop.angles)
        u = propagate(PulseSchedule(loop, "first"), basis, 0.0, loop.tau / 2)
        space = basis.space
        for k, sign in ((1, +1j), (2, -1j)):
            expected = sign * np.exp(1j * loop.pulse_phases[k - 1]) * space.basis_state(
                space.excited(k)
            )
            assert fidelity(u @ basis.bright_full(k), expected) > 1 - 1e-6
            assert np.max(np.abs(u @ basis.bright_full(k) - expected)) < 1e-6

    def test_dark_state_is_stationary(self, rng):
        loop = random_loop(rng, 4, eta=4.0)
        basis = basis_from_angles(loop.angles)
        u = propagate(PulseSchedule(loop, "first"), basis, 0.0, loop.tau / 2)
        d_state = basis.dark_full()
        assert np.max(np.abs(u @ d_state - d_state)) < 1e-7

    def test_unitarity(self, rng):
        loop = random_loop(rng, 3)
        basis = basis_from_angles(loop.angles)
        u = propagate(PulseSchedule(loop, "second"), basis, loop.tau / 2, loop.tau)
        assert unitarity_defect(u) < 10 * DEFAULT_CONFIG.rel_tol

    def test_domain_validation(self, rng):
        loop = random_loop(rng, 3)
        basis = basis_from_angles(loop.angles)
        with pytest.raises(ValueError):
            propagate(PulseSchedule(loop, "first"), basis, 0.0, loop.tau)


class TestDarkPaths:
    def test_start_in_bright_state(self, rng):
        loop = random_loop(rng, 4, eta=4.0)
        basis = basis_from_angles(loop.angles)
        for k in range(1, 4):
            expected = np.exp(-1j * loop.pulse_phases[k - 1]) * basis.bright_full(k)
            assert np.max(np.abs(dark_path_state(0.0, k, loop, basis) - expected)) < 1e-12

    def test_midpoint_is_excited(self, rng):
        loop = random_loop(rng, 4, eta=4.0)
        basis = basis_from_angles(loop.angles)
        space = basis.space
        state = dark_path_state(loop.tau / 2, 3, loop, basis)
        expected = -1j * space.basis_state(space.excited(3))
        assert np.max(np.abs(state - expected)) < 1e-12

    def test_cyclic_return(self, rng):
        loop = random_loop(rng, 3, eta=2.0)
        basis = basis_from_angles(loop.angles)
        for k in (1, 2):
            start = dark_path_state(0.0, k, loop, basis)
            end = dark_path_state(loop.tau, k, loop, basis)
            assert np.max(np.abs(end - start)) < 1e-12

    def test_index_out_of_range(self, rng):
        loop = random_loop(rng, 3)
        basis = basis_from_angles(loop.angles)
        with pytest.raises(ValueError):
            dark_path_state(0.1, 3, loop, basis)

    def test_orthonormal_along_paths(self, rng):
        for d in (3, 4, 5):
            loop = random_loop(rng, d)
            basis = basis_from_angles(loop.angles)
            for t in rng.uniform(0, loop.tau, 10):
                paths = [dark_path_state(t, k, loop, basis) for k in range(1, d)]
                for i, pi_state in enumerate(paths):
                    for j, pj_state in enumerate(paths):
                        expected = 1.0 if i == j else 0.0
                        assert abs(np.vdot(pi_state, pj_state) - expected) < 1e-10

    def test_energy_conditions_on_grid(self, rng):
        # <D_k|H|D_l> = 0 for all k, l on a dense grid
        for d in (3, 4, 5):
            loop = random_loop(rng, d)
            basis = basis_from_angles(loop.angles)
            sched = PulseSchedule(loop, "first")
            for t in np.linspace(0.0, loop.tau / 2, 25):
                h = hamiltonian(t, sched, basis)
                paths = [dark_path_state(t, k, loop, basis) for k in range(1, d)]
                for pi_state in paths:
                    for pj_state in paths:
                        assert abs(np.vdot(pi_state, h @ pj_state)) < 1e-10

    def test_integrator_tracks_analytic_paths(self, rng):
        # the module's integrator oracle
        loop = random_loop(rng, 3, eta=4.0)
        basis = basis_from_angles(loop.angles)
        sched = PulseSchedule(loop, "first")
        times = np.linspace(0.0, loop.tau / 2, 60)
        for k in (1, 2):
            states = evolve_state(dark_path_state(0.0, k, loop, basis), sched, basis, times)
            for i, t in enumerate(times):
                assert fidelity(states[i], dark_path_state(t, k, loop, basis)) > 1 - 1e-6


class TestSimulateState:
    def test_dark_state_populations_constant(self, rng):
        loop = random_loop(rng, 3, eta=4.0)
        basis = basis_from_angles(loop.angles)
        traj = simulate_state(basis.dark_full(), loop, basis, n_points=100)
        assert np.all(np.abs(traj.population_computational - 1.0) < 1e-6)
        assert np.all(traj.population_excited < 1e-6)
        assert np.all(traj.population_auxiliary < 1e-6)

    def test_eta_zero_never_populates_auxiliary(self, rng):
        loop = random_loop(rng, 3, eta=0.0)
        basis = basis_from_angles(loop.angles)
        psi0 = np.zeros(6, dtype=complex)
        psi0[:3] = [0.5, 0.5, np.sqrt(0.5)]
        traj = simulate_state(psi0, loop, basis, n_points=150)
        assert np.max(traj.population_auxiliary) < 1e-10

    def test_norm_conservation(self, rng):
        loop = random_loop(rng, 4, eta=4.0)
        basis = basis_from_angles(loop.angles)
        psi0 = np.zeros(8, dtype=complex)
        psi0[0] = psi0[2] = np.sqrt(0.5)
        traj = simulate_state(psi0, loop, basis, n_points=120)
        norms = np.linalg.norm(traj.states, axis=1)
        assert np.max(np.abs(norms - 1.0)) < 10 * DEFAULT_CONFIG.rel_tol

    def test_block_populations_sum_to_one(self, rng):
        loop = random_loop(rng, 3, eta=4.0)
        basis = basis_from_angles(loop.angles)
        psi0 = np.zeros(6, dtype=complex)
        psi0[1] = 1.0
        traj = simulate_state(psi0, loop, basis, n_points=80)
        total = (
            traj.population_computational + traj.population_excited + traj.population_auxiliary
        )
        assert np.max(np.abs(total - 1.0)) < 1e-6

    def test_rejects_excited_support(self, rng):
        loop = random_loop(rng, 3)
        basis = basis_from_angles(loop.angles)
        psi0 = np.zeros(6, dtype=complex)
        psi0[4] = 1.0
        with pytest.raises(ValueError):
            simulate_state(psi0, loop, basis)

    def test_delta_perturbs_endpoint(self, rng):
        loop = qutrit_loop(0, 0, 0.7, 0.4, 1.1, 0.3, eta=0.0)
        basis = basis_from_angles(loop.angles)
        psi0 = np.zeros(6, dtype=complex)
        psi0[:3] = 1 / np.sqrt(3)
        clean = simulate_state(psi0, loop, basis, delta=0.0, n_points=50)
        shifted = simulate_state(psi0, loop, basis, delta=0.1, n_points=50)
        assert np.max(np.abs(clean.final_state - shifted.final_state)) > 1e-3


class TestCyclicity:
    def test_computational_projector_returns(self, rng):
        # U(tau) maps the ground subspace onto itself
        for d in (3, 4):
            loop = random_loop(rng, d, eta=4.0)
            basis = basis_from_angles(loop.angles)
            u = loop_propagator(loop, basis)
            proj = np.zeros((2 * d, 2 * d), dtype=complex)
            proj[:d, :d] = np.eye(d)
            evolved = u @ proj @ u.conj().T
            assert np.max(np.abs(evolved - proj)) < 1e-6


class TestTrajectory:
    def test_length_validation(self):
        with pytest.raises(ValueError):
            Trajectory(times=np.zeros(3), states=np.zeros((2, 6)), d=3, tau=1.0)

    def test_integrator_config_validation(self):
        with pytest.raises(ValueError):
            IntegratorConfig(rel_tol=0.0)
