import numpy as np
import pytest

from drbench.mds import (
    ClassicalMDS,
    DegenerateGeometryError,
    classical_mds,
    double_center,
    strain,
)
from drbench.numerics import NumericsError, pairwise_sq_dists


def euclid(X):
    return np.sqrt(pairwise_sq_dists(X))


class TestDoubleCenter:
    def test_hand_two_point_case(self):
        # J = [[.5,-.5],[-.5,.5]], B = -1/2 J D^2 J = [[1,-1],[-1,1]]
        B = double_center(np.array([[0.0, 2.0], [2.0, 0.0]]))
        np.testing.assert_allclose(B, [[1.0, -1.0], [-1.0, 1.0]], atol=1e-12)

    def test_zero_matrix(self):
        np.testing.assert_array_equal(double_center(np.zeros((3, 3))), 0.0)

    def test_row_sums_zero(self):
        rng = np.random.default_rng(0)
        for _ in range(10):
            D = euclid(rng.normal(size=(8, 3)))
            B = double_center(D)
            assert np.max(np.abs(B.sum(axis=1))) <= 1e-9
            np.testing.assert_allclose(B, B.T, atol=1e-12)

    def test_rejects_asymmetric(self):
        with pytest.raises(NumericsError):
            double_center(np.array([[0.0, 1.0], [2.0, 0.0]]))

    def test_rejects_negative(self):
        with pytest.raises(NumericsError):
            double_center(np.array([[0.0, -1.0], [-1.0, 0.0]]))


class TestClassicalMds:
    def test_hand_two_point_case(self):
        r = classical_mds(np.array([[0.0, 2.0], [2.0, 0.0]]), 1)
        np.testing.assert_allclose(np.abs(r.X.ravel()), [1.0, 1.0], atol=1e-10)
        assert abs(r.X[0, 0] - r.X[1, 0]) == pytest.approx(2.0, abs=1e-10)
        assert r.strain <= 1e-10

    def test_collinear_points_recovered(self):
        P = np.array([[0.0], [1.0], [3.0]])
        r = classical_mds(euclid(P), 1)
        got = euclid(r.X)
        np.testing.assert_allclose(
            sorted(got[np.triu_indices(3, 1)]), [1.0, 2.0, 3.0], atol=1e-8
        )

    def test_exact_recovery_random_4d(self):
        rng = np.random.default_rng(1)
        P = rng.normal(size=(20, 4))
        r = classical_mds(euclid(P), 4)
        np.testing.assert_allclose(euclid(r.X), euclid(P), atol=1e-7)

    def test_exact_recovery_property(self):
        rng = np.random.default_rng(2)
        for trial in range(8):
            n = int(rng.integers(5, 31))
            p = int(rng.integers(1, 7))
            P = rng.normal(size=(n, p))
            r = classical_mds(euclid(P), p)
            assert np.max(np.abs(euclid(r.X) - euclid(P))) <= 1e-7
            assert r.n_clamped == 0

    def test_columns_ordered_by_eigenvalue(self):
        rng = np.random.default_rng(3)
        r = classical_mds(euclid(rng.normal(size=(12, 5))), 5)
        assert np.all(np.diff(r.eigenvalues) <= 1e-12)

    def test_deterministic(self):
        rng = np.random.default_rng(4)
        D = euclid(rng.normal(size=(10, 3)))
        a = classical_mds(D, 3)
        b = classical_mds(D, 3)
        np.testing.assert_array_equal(a.X, b.X)

    def test_negative_eigenvalues_clamped(self):
        # random non-Euclidean dissimilarities put negative eigenvalues
        # inside the requested top-d block
        rng = np.random.default_rng(0)
        D = rng.uniform(0.5, 2.0, size=(6, 6))
        D = 0.5 * (D + D.T)
        np.fill_diagonal(D, 0.0)
        r = classical_mds(D, 5)
        assert r.n_clamped >= 1
        assert np.all(r.eigenvalues >= 0.0)

    def test_degenerate_geometry_rejected(self):
        with pytest.raises(DegenerateGeometryError):
            classical_mds(np.zeros((3, 3)), 1)

    def test_bad_dimension_rejected(self):
        with pytest.raises(NumericsError):
            classical_mds(np.array([[0.0, 1.0], [1.0, 0.0]]), 2)


class TestStrain:
    def test_perfect_fit(self):
        rng = np.random.default_rng(5)
        P = rng.normal(size=(10, 3))
        r = classical_mds(euclid(P), 3)
        assert r.strain <= 1e-7

    def test_zero_embedding_gives_one(self):
        B = double_center(np.array([[0.0, 2.0], [2.0, 0.0]]))
        assert strain(B, np.zeros((2, 1))) == pytest.approx(1.0)

    def test_all_zero_b_rejected(self):
        with pytest.raises(NumericsError):
            strain(np.zeros((2, 2)), np.ones((2, 1)))

    def test_monotone_in_dimension(self):
        rng = np.random.default_rng(6)
        D = euclid(rng.normal(size=(15, 6)))
        strains = [classical_mds(D, d).strain for d in range(1, 7)]
        assert all(s2 <= s1 + 1e-12 for s1, s2 in zip(strains, strains[1:]))


class TestClassicalMdsEstimator:
    def test_euclidean_mode_matches_precomputed(self):
        rng = np.random.default_rng(7)
        X = rng.normal(size=(12, 4))
        a = ClassicalMDS(n_components=2).fit_transform(X)
        b = ClassicalMDS(n_components=2, dissimilarity="precomputed").fit_transform(
            euclid(X)
        )
        np.testing.assert_allclose(a, b, atol=1e-12)

    def test_fitted_attributes(self):
        rng = np.random.default_rng(8)
        m = ClassicalMDS(n_components=3).fit(rng.normal(size=(10, 6)))
        assert m.embedding_.shape == (10, 3)
        assert m.eigenvalues_.shape == (3,)
        assert m.strain_ >= 0.0

    def test_transform_is_unavailable(self):
        with pytest.raises(NotImplementedError):
            ClassicalMDS().transform(np.zeros((4, 2)))

    def test_get_params_round_trip(self):
        m = ClassicalMDS(n_components=5)
        assert m.get_params()["n_components"] == 5
        m.set_params(n_components=2)
        assert m.n_components == 2
