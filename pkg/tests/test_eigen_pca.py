import numpy as np
import pytest

from milkspec.errors import DegenerateDataError
from milkspec.stats.eigen import sym_eigen
from milkspec.stats.pca import pca


class TestSymEigen:
    def test_diagonal_matrix(self):
        d = sym_eigen(np.diag([2.0, 1.0]))
        assert np.allclose(d.eigenvalues, [2.0, 1.0])
        assert np.allclose(np.abs(d.eigenvectors), np.eye(2))

    def test_two_by_two_characteristic_polynomial(self):
        d = sym_eigen(np.array([[2.0, 1.0], [1.0, 2.0]]))
        assert np.allclose(d.eigenvalues, [3.0, 1.0], atol=1e-12)
        v0 = d.eigenvectors[:, 0]
        v1 = d.eigenvectors[:, 1]
        assert np.allclose(np.abs(v0), [1 / np.sqrt(2)] * 2, atol=1e-12)
        assert np.allclose(np.abs(v1), [1 / np.sqrt(2)] * 2, atol=1e-12)
        assert abs(v0 @ v1) < 1e-12

    def test_random_symmetric_residual(self):
        rng = np.random.default_rng(21)
        for _ in range(5):
            M = rng.normal(size=(6, 6))
            A = (M + M.T) / 2
            d = sym_eigen(A)
            residual = A @ d.eigenvectors - d.eigenvectors @ np.diag(d.eigenvalues)
            assert np.linalg.norm(residual) < 1e-8
            gram = d.eigenvectors.T @ d.eigenvectors
            assert np.linalg.norm(gram - np.eye(6)) < 1e-8

    def test_eigenvalues_sorted_descending(self):
        rng = np.random.default_rng(22)
        M = rng.normal(size=(8, 8))
        d = sym_eigen((M + M.T) / 2)
        assert np.all(np.diff(d.eigenvalues) <= 1e-12)

    def test_asymmetric_rejected(self):
        with pytest.raises(DegenerateDataError, match="symmetric"):
            sym_eigen(np.array([[1.0, 2.0], [0.0, 1.0]]))

    def test_zero_matrix(self):
        d = sym_eigen(np.zeros((3, 3)))
        assert np.all(d.eigenvalues == 0.0)


class TestPca:
    def test_collinear_points(self):
        data = np.array([[x, x] for x in np.linspace(-2, 2, 9)])
        result = pca(data, 2)
        assert result.explained_variance_ratio[0] == pytest.approx(1.0, abs=1e-12)
        assert result.explained_variance_ratio[1] == pytest.approx(0.0, abs=1e-12)
        assert np.allclose(np.abs(result.loadings[:, 0]), [1 / np.sqrt(2)] * 2, atol=1e-10)

    def test_axis_variance_ratios(self):
        data = np.array([[1.0, 0.0], [-1.0, 0.0], [0.0, 0.5], [0.0, -0.5]])
        result = pca(data, 2)
        assert np.allclose(result.explained_variance_ratio, [0.8, 0.2], atol=1e-12)

    def test_ratio_properties(self):
        rng = np.random.default_rng(23)
        data = rng.normal(size=(20, 6)) @ np.diag([3.0, 2.0, 1.0, 0.5, 0.2, 0.1])
        result = pca(data)
        ratios = result.explained_variance_ratio
        assert np.all(ratios >= 0)
        assert np.all(np.diff(ratios) <= 1e-12)
        assert ratios.sum() == pytest.approx(1.0, abs=1e-10)

    def test_reconstruction_error_nonincreasing_in_components(self):
        rng = np.random.default_rng(24)
        data = rng.normal(size=(15, 5))
        errors = []
        for k in range(1, 6):
            result = pca(data, k)
            reconstruction = result.scores @ result.loadings.T + result.mean
            errors.append(float(((data - reconstruction) ** 2).sum()))
        assert all(b <= a + 1e-10 for a, b in zip(errors, errors[1:]))

    def test_sign_convention_deterministic(self):
        rng = np.random.default_rng(25)
        data = rng.normal(size=(12, 4))
        r1, r2 = pca(data, 3), pca(data.copy(), 3)
        assert np.array_equal(r1.loadings, r2.loadings)
        for j in range(3):
            pivot = np.argmax(np.abs(r1.loadings[:, j]))
            assert r1.loadings[pivot, j] > 0

    def test_scores_match_projection(self):
        rng = np.random.default_rng(26)
        data = rng.normal(size=(10, 4))
        result = pca(data, 2)
        assert np.allclose(result.scores, (data - result.mean) @ result.loadings, atol=1e-12)

    def test_too_few_samples(self):
        with pytest.raises(DegenerateDataError):
            pca(np.ones((1, 3)))

    def test_constant_data_rejected(self):
        with pytest.raises(DegenerateDataError):
            pca(np.ones((5, 3)))
