import numpy as np
import pytest

from milkspec.errors import DegenerateDataError
from milkspec.stats.mnf import estimate_noise_covariance, mnf
from milkspec.stats.pca import pca


def random_roi(seed, rows=8, cols=8, bands=5):
    rng = np.random.default_rng(seed)
    signal = rng.normal(size=(1, 1, bands)) * np.linspace(1.0, 2.0, bands)
    return signal + rng.normal(size=(rows, cols, bands))


class TestNoiseEstimation:
    def test_white_noise_estimate_near_identity(self):
        rng = np.random.default_rng(30)
        roi = rng.normal(size=(60, 60, 4))
        cov = estimate_noise_covariance(roi)
        assert np.allclose(cov, np.eye(4), atol=0.1)

    def test_single_column_rejected(self):
        with pytest.raises(DegenerateDataError, match="single column"):
            estimate_noise_covariance(np.zeros((5, 1, 3)))

    def test_vertical_axis(self):
        rng = np.random.default_rng(31)
        roi = rng.normal(size=(40, 40, 3))
        cov = estimate_noise_covariance(roi, axis="vertical")
        assert np.allclose(cov, np.eye(3), atol=0.15)


class TestMnf:
    def test_identity_noise_reproduces_pca_directions(self):
        for seed in range(5):
            roi = random_roi(seed)
            bands = roi.shape[2]
            result = mnf(roi, noise_covariance=np.eye(bands))
            reference = pca(roi.reshape(-1, bands), bands)
            assert np.abs(result.components - reference.loadings).max() < 1e-6

    def test_constant_cube_regularized_to_zero_snr(self):
        roi = np.full((6, 6, 4), 0.7)
        result = mnf(roi)
        assert np.all(result.snr_eigenvalues < 1e-8)

    def test_diagonal_noise_two_band_toy(self):
        # signal lives in band 1, noise only in band 2: first component -> e1
        rng = np.random.default_rng(33)
        n = 400
        signal = rng.normal(size=n) * 5.0
        noise = rng.normal(size=n)
        pixels = np.column_stack([signal, noise]).reshape(n, 1, 2)
        result = mnf(pixels, noise_covariance=np.diag([1e-6, 1.0]))
        direction = result.components[:, 0] / np.linalg.norm(result.components[:, 0])
        assert abs(abs(direction[0]) - 1.0) < 1e-6
        assert abs(direction[1]) < 1e-3

    def test_snr_eigenvalues_descending_nonnegative(self):
        result = mnf(random_roi(34))
        assert np.all(result.snr_eigenvalues >= 0)
        assert np.all(np.diff(result.snr_eigenvalues) <= 1e-10)

    def test_noise_covariance_positive_definite_after_regularization(self):
        result = mnf(random_roi(35))
        eigenvalues = np.linalg.eigvalsh(result.noise_covariance)
        assert eigenvalues.min() > 0

    def test_scores_shape_and_centering(self):
        roi = random_roi(36)
        result = mnf(roi, n_components=3)
        assert result.scores.shape == (64, 3)
        assert np.allclose(result.scores.mean(axis=0), 0.0, atol=1e-10)

    def test_too_few_pixels(self):
        with pytest.raises(DegenerateDataError, match="pixels"):
            mnf(np.zeros((1, 3, 5)))

    def test_deterministic(self):
        roi = random_roi(37)
        a = mnf(roi)
        b = mnf(roi.copy())
        assert np.array_equal(a.components, b.components)
        assert np.array_equal(a.snr_eigenvalues, b.snr_eigenvalues)
