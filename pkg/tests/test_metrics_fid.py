"""Frechet distance math: closed-form cases and square-root reconstruction."""

from __future__ import annotations

import numpy as np
import pytest

from cage.imaging.raster import RasterImage
from cage.metrics.fid import FeatureSet, embed_images, fid, matrix_sqrt_psd
from cage.mocks import MockEmbedder

from oracles import FID_MEAN_SHIFT, FID_VAR_GAP


def column(values) -> FeatureSet:
    return FeatureSet(np.array(values, dtype=np.float64)[:, None])


class TestClosedForms:
    def test_identical_sets_are_zero(self):
        rng = np.random.default_rng(3)
        fs = FeatureSet(rng.normal(size=(16, 8)))
        assert fid(fs, fs) <= 1e-6

    def test_unit_variance_mean_shift(self):
        # Sample mean 0 and unbiased variance 1, shifted by 3: d^2 = 9.
        a = column([-1.0, 0.0, 1.0])
        b = column([2.0, 3.0, 4.0])
        assert fid(a, b) == pytest.approx(FID_MEAN_SHIFT, abs=1e-6)

    def test_equal_means_variance_gap(self):
        # Variances 4 and 1, equal means: (2 - 1)^2 = 1.
        a = column([-2.0, 0.0, 2.0])
        b = column([-1.0, 0.0, 1.0])
        assert fid(a, b) == pytest.approx(FID_VAR_GAP, abs=1e-6)

    def test_symmetry(self):
        rng = np.random.default_rng(17)
        a = FeatureSet(rng.normal(size=(12, 6)))
        b = FeatureSet(rng.normal(size=(9, 6)) + 0.5)
        assert fid(a, b) == pytest.approx(fid(b, a), abs=1e-8)

    def test_non_negative(self):
        rng = np.random.default_rng(23)
        for _ in range(10):
            a = FeatureSet(rng.normal(size=(8, 4)))
            b = FeatureSet(rng.normal(size=(8, 4)))
            assert fid(a, b) >= 0.0


class TestMatrixSqrt:
    def test_reconstruction_on_random_psd(self):
        rng = np.random.default_rng(42)
        for _ in range(50):
            n = int(rng.integers(2, 65))
            r = rng.normal(size=(n, n))
            m = r @ r.T
            s = matrix_sqrt_psd(m)
            rel = np.linalg.norm(s @ s - m) / np.linalg.norm(m)
            assert rel < 1e-8, f"relative error {rel:.2e} at n={n}"

    def test_sqrt_is_symmetric(self):
        rng = np.random.default_rng(5)
        r = rng.normal(size=(6, 6))
        s = matrix_sqrt_psd(r @ r.T)
        assert np.allclose(s, s.T, atol=1e-12)

    def test_identity_and_diagonal(self):
        assert np.allclose(matrix_sqrt_psd(np.eye(4)), np.eye(4), atol=1e-12)
        s = matrix_sqrt_psd(np.diag([4.0, 9.0]))
        assert np.allclose(s, np.diag([2.0, 3.0]), atol=1e-12)

    def test_rejects_asymmetric(self):
        with pytest.raises(ValueError):
            matrix_sqrt_psd(np.array([[1.0, 2.0], [0.0, 1.0]]))

    def test_rejects_negative_definite(self):
        with pytest.raises(ValueError):
            matrix_sqrt_psd(np.diag([1.0, -0.5]))

    def test_tolerates_tiny_negative_roundoff(self):
        m = np.diag([1.0, -5e-9])
        s = matrix_sqrt_psd(m)
        assert s[1, 1] == 0.0


class TestValidation:
    def test_needs_two_vectors_per_set(self):
        a = column([1.0])
        b = column([0.0, 1.0])
        with pytest.raises(ValueError):
            fid(a, b)

    def test_dimension_mismatch(self):
        a = FeatureSet(np.zeros((3, 2)))
        b = FeatureSet(np.zeros((3, 3)))
        with pytest.raises(ValueError):
            fid(a, b)

    def test_non_finite_features_rejected(self):
        with pytest.raises(ValueError):
            FeatureSet(np.array([[1.0, np.nan]]))


class TestEmbedder:
    def test_embed_images_stacks_vectors(self):
        imgs = [RasterImage.blank(8, 8, color=(c, c, c)) for c in (0, 128, 255)]
        fs = embed_images(imgs, MockEmbedder())
        assert fs.count == 3 and fs.dim == 8
        assert fs.features[0, 0] == 0.0
        assert fs.features[2, 0] == 1.0

    def test_identical_image_sets_fid_zero(self):
        rng = np.random.default_rng(9)
        imgs = [RasterImage(rng.integers(0, 256, (10, 10, 3), dtype=np.uint8))
                for _ in range(5)]
        fs = embed_images(imgs, MockEmbedder())
        assert fid(fs, fs) <= 1e-6
