import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from eigengesture.errors import DegenerateTrainingSet, DimensionMismatch, TooFewSamples
from eigengesture.imageio import DatasetManifest, scan_dataset
from eigengesture.linalg import EigenDecomposition, jacobi_eigh
from eigengesture.trainer import (
    EigenspaceModel,
    EnergyFraction,
    ExplicitK,
    TrainConfig,
    compute_threshold,
    lift_eigenvectors,
    normalize_training,
    project_weights,
    reconstruct,
    select_top_k,
    small_covariance,
    train,
    train_with_report,
)

SQRT2 = math.sqrt(2.0)
RAW = TrainConfig(n=None)


def brute_force_max_distance(columns):
    return max(math.dist(a, b) for a, b in itertools.combinations(columns, 2))


def random_corpus(rng, pixels, m, labels="abc"):
    images = rng.random((m, pixels))
    return DatasetManifest.from_vectors([labels[i % len(labels)] for i in range(m)], images)


class TestNormalizeTraining:
    def test_worked_example(self, worked_corpus):
        mean, a = normalize_training(worked_corpus)
        np.testing.assert_array_equal(mean, [2, 1, 1])
        np.testing.assert_array_equal(a, [[-1, 1], [-1, 1], [0, 0]])

    def test_identical_images(self):
        man = DatasetManifest.from_vectors(["x", "y", "z"], [[0.3, 0.6]] * 3)
        _, a = normalize_training(man)
        np.testing.assert_array_equal(a, 0)

    def test_mirror_pair(self):
        man = DatasetManifest.from_vectors(["x", "y"], [[0.2, 0.9, 0.5], [0.8, 0.1, 0.5]])
        _, a = normalize_training(man)
        np.testing.assert_allclose(a[:, 0], -a[:, 1], atol=1e-15)

    def test_too_few(self):
        with pytest.raises(TooFewSamples):
            normalize_training(DatasetManifest.from_vectors(["x"], [[1.0]]))


class TestSmallCovariance:
    def test_worked_example(self, worked_corpus):
        _, a = normalize_training(worked_corpus)
        cols = a.T.tolist()
        oracle = [[sum(x * y for x, y in zip(ci, cj)) for cj in cols] for ci in cols]
        assert oracle == [[2, -2], [-2, 2]]
        np.testing.assert_array_equal(small_covariance(a), oracle)

    def test_zero(self):
        np.testing.assert_array_equal(small_covariance(np.zeros((5, 3))), np.zeros((3, 3)))

    def test_orthonormal_columns(self):
        q, _ = np.linalg.qr(np.random.default_rng(0).normal(size=(9, 4)))
        np.testing.assert_allclose(small_covariance(q), np.eye(4), atol=1e-15)


class TestLift:
    def test_worked_example_matches_direct_decomposition(self, worked_corpus):
        _, a = normalize_training(worked_corpus)
        decomp = jacobi_eigh(small_covariance(a))
        np.testing.assert_allclose(decomp.values, [4, 0], atol=1e-15)
        np.testing.assert_allclose(decomp.vectors[:, 0], [1 / SQRT2, -1 / SQRT2], atol=1e-15)
        u = lift_eigenvectors(a, decomp)
        assert u.shape == (3, 1)
        # oracle: decompose the 3 x 3 matrix A A^T directly
        direct = jacobi_eigh(a @ a.T)
        np.testing.assert_array_equal(a @ a.T, [[2, 2, 0], [2, 2, 0], [0, 0, 0]])
        assert direct.values[0] == pytest.approx(4.0, abs=1e-14)
        np.testing.assert_allclose(u[:, 0], direct.vectors[:, 0], atol=1e-14)
        np.testing.assert_allclose(u[:, 0], [1 / SQRT2, 1 / SQRT2, 0], atol=1e-15)

    def test_zero_matrix_is_degenerate(self):
        a = np.zeros((4, 3))
        with pytest.raises(DegenerateTrainingSet):
            lift_eigenvectors(a, jacobi_eigh(small_covariance(a)))

    def test_epsilon_cutoff(self):
        a = np.array([[1.0, 0.0], [0.0, 1e-15], [0.0, 0.0]])
        decomp = EigenDecomposition(np.array([4.0, 1e-30]), np.eye(2))
        u = lift_eigenvectors(a, decomp)
        assert u.shape == (3, 1)
        np.testing.assert_array_equal(u[:, 0], [1, 0, 0])

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            lift_eigenvectors(np.ones((3, 2)), jacobi_eigh(np.eye(3)))


class TestSelectTopK:
    def test_single_component(self):
        assert select_top_k([4.0], EnergyFraction(0.95)) == 1

    def test_cumulative(self):
        energy = np.cumsum([5, 3, 2]) / 10
        np.testing.assert_allclose(energy, [0.5, 0.8, 1.0])
        assert select_top_k([5.0, 3.0, 2.0], EnergyFraction(0.95)) == 3
        assert select_top_k([5.0, 3.0, 2.0], EnergyFraction(0.8)) == 2
        assert select_top_k([5.0, 3.0, 2.0], EnergyFraction(0.5)) == 1

    def test_explicit(self):
        assert select_top_k([3.0, 1.0], ExplicitK(1)) == 1

    def test_explicit_capped(self):
        assert select_top_k([3.0, 1.0], ExplicitK(10)) == 2

    def test_full_energy_takes_everything(self):
        assert select_top_k([0.7, 0.2, 0.1], EnergyFraction(1.0)) == 3

    @pytest.mark.parametrize("bad", [0.0, -0.1, 1.5])
    def test_bad_fraction(self, bad):
        with pytest.raises(ValueError):
            EnergyFraction(bad)

    def test_bad_k(self):
        with pytest.raises(ValueError):
            ExplicitK(0)

    @settings(max_examples=200, deadline=None)
    @given(
        st.lists(st.floats(1e-6, 1e6), min_size=1, max_size=12),
        st.floats(0.001, 1.0),
        st.floats(0.001, 1.0),
    )
    def test_energy_monotone(self, values, f1, f2):
        values = sorted(values, reverse=True)
        lo, hi = sorted((f1, f2))
        k_lo = select_top_k(values, EnergyFraction(lo))
        k_hi = select_top_k(values, EnergyFraction(hi))
        assert 1 <= k_lo <= k_hi <= len(values)


class TestProjectWeights:
    def test_worked_example(self, worked_corpus):
        mean = np.array([2.0, 1.0, 1.0])
        u = np.array([[1 / SQRT2], [1 / SQRT2], [0.0]])
        w = project_weights(u, mean, np.array([1.0, 0.0, 1.0]))
        assert w.shape == (1,)
        assert w[0] == pytest.approx(-SQRT2, abs=1e-15)

    def test_mean_projects_to_zero(self):
        u, _ = np.linalg.qr(np.random.default_rng(2).normal(size=(6, 3)))
        mean = np.random.default_rng(3).random(6)
        np.testing.assert_array_equal(project_weights(u, mean, mean), np.zeros(3))

    def test_basis_vector_projects_to_unit(self):
        u, _ = np.linalg.qr(np.random.default_rng(4).normal(size=(8, 3)))
        mean = np.random.default_rng(5).random(8)
        for j in range(3):
            np.testing.assert_allclose(project_weights(u, mean, mean + u[:, j]), np.eye(3)[j], atol=1e-14)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            project_weights(np.ones((3, 1)), np.zeros(3), np.zeros(4))


class TestThreshold:
    def test_three_four_five(self):
        cols = [(0, 0), (3, 4)]
        assert brute_force_max_distance(cols) == 5.0
        assert compute_threshold(np.array(cols, dtype=float).T, 0.5) == 2.5

    def test_zero_spread(self):
        w = np.tile([[1.5], [-2.0]], (1, 4))
        assert compute_threshold(w, 0.7) == 0.0

    def test_worked_example(self):
        assert compute_threshold(np.array([[-SQRT2, SQRT2]]), 0.5) == pytest.approx(SQRT2, abs=1e-15)

    def test_random_against_brute_force(self):
        w = np.random.default_rng(6).normal(size=(4, 9))
        expected = brute_force_max_distance(w.T.tolist())
        assert compute_threshold(w, 1.0) == pytest.approx(expected, rel=1e-14)

    def test_too_few(self):
        with pytest.raises(TooFewSamples):
            compute_threshold(np.ones((3, 1)), 0.5)


class TestTrain:
    def test_worked_example_golden(self, worked_corpus):
        model = train(worked_corpus, RAW)
        assert model.k == 1 and model.m == 2 and model.n2 == 3
        np.testing.assert_array_equal(model.mean, [2, 1, 1])
        np.testing.assert_allclose(model.eigenimages[:, 0], [1 / SQRT2, 1 / SQRT2, 0], atol=1e-12)
        np.testing.assert_allclose(model.eigenvalues, [4.0], atol=1e-12)
        np.testing.assert_allclose(model.training_weights, [[-SQRT2, SQRT2]], atol=1e-12)
        assert model.threshold == pytest.approx(SQRT2, abs=1e-12)
        assert model.labels == ("a", "b")
        assert model.invariant_violations() == []

    def test_identical_images_degenerate(self):
        man = DatasetManifest.from_vectors(["a", "b"], [[0.1, 0.2, 0.3]] * 2)
        with pytest.raises(DegenerateTrainingSet):
            train(man, RAW)

    def test_single_image(self):
        with pytest.raises(TooFewSamples):
            train(DatasetManifest.from_vectors(["a"], [[0.1, 0.2]]), RAW)

    @pytest.mark.parametrize("m", [2, 3, 5, 9])
    def test_rank_bound(self, m):
        man = random_corpus(np.random.default_rng(m), 30, m)
        model = train(man, TrainConfig(n=None, k_policy=ExplicitK(100)))
        assert model.k == m - 1

    def test_rank_bound_with_duplicates(self):
        rng = np.random.default_rng(12)
        base = rng.random((3, 20))
        man = DatasetManifest.from_vectors(list("abcdef"), np.vstack([base, base]))
        model = train(man, TrainConfig(n=None, k_policy=ExplicitK(100)))
        assert model.k == 2

    def test_deterministic(self, fixtures_dir):
        man = scan_dataset(fixtures_dir / "gestures", 16)
        assert train(man, TrainConfig(n=16)) == train(man, TrainConfig(n=16))

    def test_training_weights_match_projection(self, fixtures_dir):
        man = scan_dataset(fixtures_dir / "gestures", 16)
        model = train(man, TrainConfig(n=16))
        for j, s in enumerate(man.samples):
            assert model.training_weights[:, j].tobytes() == project_weights(
                model.eigenimages, model.mean, s.vector).tobytes()

    def test_report(self, fixtures_dir):
        man = scan_dataset(fixtures_dir / "gestures", 16)
        model, report = train_with_report(man, TrainConfig(n=16, k_policy=EnergyFraction(0.95)))
        assert report.surviving == 9
        assert report.energy >= 0.95
        assert model.k < report.surviving

    def test_bad_threshold_factor(self):
        with pytest.raises(ValueError):
            TrainConfig(threshold_factor=0.0)


class TestModelInvariants:
    def _model(self, **changes):
        fields = dict(
            mean=np.zeros(3),
            eigenimages=np.array([[1.0], [0.0], [0.0]]),
            eigenvalues=np.array([2.0]),
            labels=("a", "b"),
            training_weights=np.array([[-1.0, 1.0]]),
            threshold=1.0,
        )
        fields.update(changes)
        return EigenspaceModel(**fields)

    def test_valid(self):
        assert self._model().invariant_violations() == []

    @pytest.mark.parametrize(
        "changes,fragment",
        [
            ({"eigenimages": np.array([[2.0], [0.0], [0.0]])}, "unit norm"),
            ({"eigenvalues": np.array([-1.0])}, "positive"),
            ({"threshold": -1.0}, "threshold"),
            ({"threshold": np.nan}, "threshold"),
            ({"labels": ("a", "")}, "labels"),
            ({"labels": ("a",), "training_weights": np.array([[1.0]])}, "at least 2"),
            ({"training_weights": np.zeros((1, 3))}, "shape"),
            ({"mean": np.array([0.0, np.inf, 0.0])}, "non-finite"),
        ],
    )
    def test_violations(self, changes, fragment):
        problems = self._model(**changes).invariant_violations()
        assert any(fragment in p for p in problems), problems

    def test_non_orthogonal(self):
        u = np.array([[1.0, 1 / SQRT2], [0.0, 1 / SQRT2], [0.0, 0.0]])
        model = self._model(eigenimages=u, eigenvalues=np.array([2.0, 1.0]), labels=("a", "b", "c"),
                            training_weights=np.zeros((2, 3)))
        assert any("orthogonal" in p for p in model.invariant_violations())

    def test_increasing_eigenvalues(self):
        u = np.eye(3)[:, :2]
        model = self._model(eigenimages=u, eigenvalues=np.array([1.0, 2.0]), labels=("a", "b", "c"),
                            training_weights=np.zeros((2, 3)))
        assert any("non-increasing" in p for p in model.invariant_violations())

    def test_equality_is_bitwise(self):
        assert self._model() == self._model()
        assert self._model() != self._model(threshold=np.nextafter(1.0, 2.0))
        assert self._model() != self._model(labels=("a", "c"))


class TestProperties:
    def test_covariance_trick_equivalence(self):
        rng = np.random.default_rng(77)
        for _ in range(50):
            pixels, m = int(rng.integers(2, 101)), int(rng.integers(2, 9))
            a = rng.normal(size=(pixels, m))
            small = jacobi_eigh(small_covariance(a))
            big = np.linalg.eigvalsh(a @ a.T)[::-1]
            rank = np.linalg.matrix_rank(a)
            np.testing.assert_allclose(small.values[:rank], big[:rank], rtol=1e-8)
            u = lift_eigenvectors(a, small)
            for i in range(u.shape[1]):
                lam = small.values[i]
                residual = np.linalg.norm((a @ a.T) @ u[:, i] - lam * u[:, i])
                assert residual <= 1e-8 * max(1.0, lam)

    def test_perfect_reconstruction(self):
        rng = np.random.default_rng(5)
        for _ in range(20):
            n, m = int(rng.integers(2, 17)), int(rng.integers(2, 11))
            man = random_corpus(rng, n * n, m)
            model = train(man, TrainConfig(n=n, k_policy=ExplicitK(m)))
            for j, s in enumerate(man.samples):
                rebuilt = reconstruct(model, model.training_weights[:, j])
                assert np.sqrt(np.mean((rebuilt - s.vector) ** 2)) <= 1e-8

    @pytest.mark.parametrize("offset", [0.25, -3.0, 100.0])
    def test_constant_offset_invariance(self, offset):
        rng = np.random.default_rng(31)
        images = rng.random((6, 25))
        labels = list("aabbcc")
        base = train(DatasetManifest.from_vectors(labels, images), RAW)
        shifted = train(DatasetManifest.from_vectors(labels, images + offset), RAW)
        _, a0 = normalize_training(DatasetManifest.from_vectors(labels, images))
        _, a1 = normalize_training(DatasetManifest.from_vectors(labels, images + offset))
        np.testing.assert_allclose(a1, a0, atol=1e-9)
        assert shifted.k == base.k
        np.testing.assert_allclose(shifted.eigenimages, base.eigenimages, atol=1e-9)
        np.testing.assert_allclose(shifted.training_weights, base.training_weights, atol=1e-9)
        assert shifted.threshold == pytest.approx(base.threshold, abs=1e-9)

    def test_projection_is_lipschitz(self, fixtures_dir):
        man = scan_dataset(fixtures_dir / "gestures", 16)
        model = train(man, TrainConfig(n=16))
        rng = np.random.default_rng(8)
        for s in man.samples:
            for _ in range(10):
                noise = rng.uniform(-0.005, 0.005, s.vector.size)
                shift = project_weights(model.eigenimages, model.mean, s.vector + noise) - project_weights(
                    model.eigenimages, model.mean, s.vector)
                assert np.linalg.norm(shift) <= np.linalg.norm(noise) * (1 + 1e-12)
