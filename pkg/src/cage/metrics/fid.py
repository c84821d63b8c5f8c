"""Frechet distance between Gaussian fits of image feature sets.

d^2 = ||mu_a - mu_b||^2 + Tr(S_a + S_b - 2 (S_a^{1/2} S_b S_a^{1/2})^{1/2})

The symmetric inner product keeps the matrix square root on a PSD operand,
which is friendlier numerically than sqrtm(S_a S_b). Covariances use the
unbiased 1/(n-1) normalization plus a small ridge so near-degenerate sets
stay invertible. Feature extraction itself is a pluggable embedder; this
module only owns the math.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Protocol, runtime_checkable

import numpy as np

from cage.imaging.raster import RasterImage

COVARIANCE_EPS = 1e-6
SYMMETRY_TOL = 1e-8
EIGENVALUE_FLOOR = -1e-8


@dataclass(frozen=True)
class FeatureSet:
    """n feature vectors of dimension d, one per image."""

    features: np.ndarray

    def __post_init__(self):
        f = np.asarray(self.features, dtype=np.float64)
        if f.ndim != 2:
            raise ValueError(f"expected (n, d) feature matrix, got shape {f.shape}")
        if not np.isfinite(f).all():
            raise ValueError("feature matrix contains non-finite values")
        object.__setattr__(self, "features", f)

    @property
    def count(self) -> int:
        return self.features.shape[0]

    @property
    def dim(self) -> int:
        return self.features.shape[1]


@runtime_checkable
class EmbedderBackend(Protocol):
    """Pluggable feature extractor: raster in, fixed-width vector out."""

    name: str
    dim: int

    def embed(self, image: RasterImage) -> np.ndarray:
        ...


def embed_images(images, backend: EmbedderBackend) -> FeatureSet:
    vectors = [np.asarray(backend.embed(img), dtype=np.float64) for img in images]
    return FeatureSet(np.stack(vectors))


def matrix_sqrt_psd(matrix: np.ndarray, sym_tol: float = SYMMETRY_TOL) -> np.ndarray:
    """Symmetric PSD square root via eigendecomposition: V sqrt(L) V^T.

    Eigenvalues in [-1e-8, 0] are clamped to zero (roundoff); anything more
    negative means the input is not PSD and raises.
    """
    m = np.asarray(matrix, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    if np.abs(m - m.T).max() > sym_tol:
        raise ValueError(f"matrix is not symmetric within {sym_tol}")
    eigenvalues, eigenvectors = np.linalg.eigh((m + m.T) / 2.0)
    if eigenvalues.min() < EIGENVALUE_FLOOR:
        raise ValueError(f"matrix has negative eigenvalue {eigenvalues.min():.3e}, not PSD")
    eigenvalues = np.clip(eigenvalues, 0.0, None)
    return (eigenvectors * np.sqrt(eigenvalues)) @ eigenvectors.T


def _mean_and_cov(fs: FeatureSet) -> tuple[np.ndarray, np.ndarray]:
    x = fs.features
    mu = x.mean(axis=0)
    centered = x - mu
    cov = centered.T @ centered / (fs.count - 1)
    return mu, cov + COVARIANCE_EPS * np.eye(fs.dim)


def fid(a: FeatureSet, b: FeatureSet) -> float:
    """Frechet distance between the Gaussian fits of two feature sets."""
    if a.dim != b.dim:
        raise ValueError(f"feature dimensions differ: {a.dim} vs {b.dim}")
    if a.count < 2 or b.count < 2:
        raise ValueError(f"each set needs >= 2 vectors, got {a.count} and {b.count}")
    mu_a, cov_a = _mean_and_cov(a)
    mu_b, cov_b = _mean_and_cov(b)
    sqrt_a = matrix_sqrt_psd(cov_a)
    inner = sqrt_a @ cov_b @ sqrt_a
    cross = matrix_sqrt_psd((inner + inner.T) / 2.0)
    diff = mu_a - mu_b
    value = float(diff @ diff + np.trace(cov_a + cov_b - 2.0 * cross))
    return max(value, 0.0)  # clamp roundoff just below zero
