import numpy as np
import pytest

from darkpath.levels import (
    LevelSpace,
    fidelity,
    gate_distance,
    haar_state,
    haar_unitary,
    random_state,
    unitarity_defect,
)


class TestLevelSpace:
    def test_index_map_is_bijection(self):
        for d in range(2, 8):
            space = LevelSpace(d)
            indices = (
                [space.ground(k) for k in range(1, d + 1)]
                + [space.excited(l) for l in range(1, d)]
                + [space.aux]
            )
            assert sorted(indices) == list(range(2 * d))

    def test_rejects_small_dimension(self):
        with pytest.raises(ValueError):
            LevelSpace(1)

    def test_labels_match_layout(self):
        space = LevelSpace(3)
        assert space.labels() == ["g1", "g2", "g3", "e1", "e2", "a"]

    def test_embed_ground(self):
        space = LevelSpace(3)
        full = space.embed_ground([1.0, 0.0, 0.0])
        assert full.shape == (6,)
        assert full[0] == 1.0 and np.all(full[1:] == 0)


class TestFidelity:
    def test_identical_states(self):
        psi = random_state(3, seed=1)
        assert fidelity(psi, psi) == pytest.approx(1.0, abs=1e-12)

    def test_orthogonal_basis_states(self):
        space = LevelSpace(3)
        one = space.basis_state(space.ground(1))
        two = space.basis_state(space.ground(2))
        assert fidelity(one, two) == 0.0

    def test_superposition_overlap(self):
        space = LevelSpace(3)
        one = space.basis_state(space.ground(1))
        plus = (one + space.basis_state(space.ground(2))) / np.sqrt(2)
        assert fidelity(one, plus) == pytest.approx(0.7071067811865476, abs=1e-12)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            fidelity(np.ones(4) / 2, np.ones(6) / np.sqrt(6))

    def test_symmetric_and_bounded(self, rng):
        for _ in range(1000):
            a = haar_state(4, rng)
            b = haar_state(4, rng)
            f = fidelity(a, b)
            assert 0.0 <= f <= 1.0 + 1e-12
            assert f == pytest.approx(fidelity(b, a), abs=1e-14)


class TestGateDistance:
    def test_identity(self):
        eye = np.eye(4, dtype=complex)
        assert gate_distance(eye, eye) == 0.0

    def test_global_phase_invariance(self):
        eye = np.eye(4, dtype=complex)
        assert gate_distance(eye, np.exp(1j * np.pi / 7) * eye) == pytest.approx(0.0, abs=1e-15)

    def test_trace_arithmetic(self):
        # tr(diag(1, 1, -1)) = 1, so the distance is 1 - 1/3
        assert gate_distance(np.eye(3), np.diag([1.0, 1.0, -1.0])) == pytest.approx(
            2.0 / 3.0, abs=1e-12
        )

    def test_random_phase_invariance(self, rng):
        u = haar_unitary(5, rng)
        for alpha in rng.uniform(0, 2 * np.pi, 100):
            assert gate_distance(u, np.exp(1j * alpha) * u) < 1e-12

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            gate_distance(np.eye(3), np.eye(4))


class TestRandomState:
    def test_deterministic_per_seed(self):
        a = random_state(3, seed=42)
        b = random_state(3, seed=42)
        assert np.array_equal(a, b)

    def test_normalized(self):
        for seed in range(20):
            assert np.linalg.norm(random_state(3, seed)) == pytest.approx(1.0, abs=1e-12)

    def test_ground_support_only(self):
        psi = random_state(4, seed=7)
        assert psi.shape == (8,)
        assert np.all(psi[4:] == 0)

    def test_rejects_bad_dimension(self):
        with pytest.raises(ValueError):
            random_state(0, seed=1)

    def test_haar_first_component_moment(self, rng):
        # E |<1|psi>|^2 = 1/3 for Haar states on a 3-dimensional space
        samples = np.array([abs(haar_state(3, rng)[0]) ** 2 for _ in range(100_000)])
        assert samples.mean() == pytest.approx(1.0 / 3.0, abs=0.01)


class TestHaarUnitary:
    def test_unitarity(self, rng):
        for dim in (2, 3, 5):
            assert unitarity_defect(haar_unitary(dim, rng)) < 1e-12
