"""Canny edge pipeline used to build the structural conditioning map.

The stages are the classic ones: Gaussian smoothing, 3x3 Sobel gradients,
non-maximum suppression along the gradient direction quantized to four
bins, then double-threshold hysteresis with 8-connected linking. Thresholds
are fractions of the maximum gradient magnitude, so the same settings work
across renderings with different contrast.

Implementation notes that matter for exactness:

* Border handling is clamp-to-edge for both blur and Sobel.
* NMS keeps a pixel iff its magnitude is strictly greater than the
  neighbor at ``p - d`` and >= the neighbor at ``p + d`` (``d`` the
  quantized direction). The asymmetric tie-break yields one-pixel-wide
  responses on symmetric step edges instead of suppressing both halves.
* Image-border pixels are never edges.
"""

from __future__ import annotations

import math

import numpy as np

from cage.imaging.raster import EdgeMap, RasterImage

DEFAULT_SIGMA = 1.4
DEFAULT_LOW = 0.1
DEFAULT_HIGH = 0.3

# Sobel kernels, correlation convention, y pointing down.
SOBEL_X = ((-1.0, 0.0, 1.0), (-2.0, 0.0, 2.0), (-1.0, 0.0, 1.0))
SOBEL_Y = ((-1.0, -2.0, -1.0), (0.0, 0.0, 0.0), (1.0, 2.0, 1.0))

# Quantized gradient direction offsets (dx, dy), folded to [0, pi).
_BIN_OFFSETS = ((1, 0), (1, 1), (0, 1), (-1, 1))


def gaussian_kernel(sigma: float) -> np.ndarray:
    """Normalized 1-D Gaussian taps with radius ceil(3*sigma)."""
    if sigma <= 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    radius = math.ceil(3.0 * sigma)
    taps = [math.exp(-(k * k) / (2.0 * sigma * sigma)) for k in range(-radius, radius + 1)]
    total = sum(taps)
    return np.array([t / total for t in taps], dtype=np.float64)


def _convolve1d_clamp(img: np.ndarray, kernel: np.ndarray, axis: int) -> np.ndarray:
    radius = len(kernel) // 2
    pad = [(0, 0), (0, 0)]
    pad[axis] = (radius, radius)
    padded = np.pad(img, pad, mode="edge")
    out = np.zeros_like(img)
    n = img.shape[axis]
    for k, weight in enumerate(kernel):
        if axis == 1:
            out += weight * padded[:, k:k + n]
        else:
            out += weight * padded[k:k + n, :]
    return out


def gaussian_blur(img: np.ndarray, sigma: float) -> np.ndarray:
    """Separable Gaussian blur of a grayscale raster, clamp-to-edge borders."""
    img = np.asarray(img, dtype=np.float64)
    if img.ndim != 2:
        raise ValueError(f"expected grayscale (h, w) raster, got shape {img.shape}")
    kernel = gaussian_kernel(sigma)
    return _convolve1d_clamp(_convolve1d_clamp(img, kernel, axis=1), kernel, axis=0)


def sobel_gradients(img: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """3x3 Sobel gradient magnitude and direction (radians, atan2(gy, gx))."""
    img = np.asarray(img, dtype=np.float64)
    if img.ndim != 2:
        raise ValueError(f"expected grayscale (h, w) raster, got shape {img.shape}")
    h, w = img.shape
    if h < 3 or w < 3:
        raise ValueError(f"image must be at least 3x3 for Sobel, got {h}x{w}")
    padded = np.pad(img, 1, mode="edge")
    gx = np.zeros_like(img)
    gy = np.zeros_like(img)
    for dy in range(3):
        for dx in range(3):
            window = padded[dy:dy + h, dx:dx + w]
            if SOBEL_X[dy][dx] != 0.0:
                gx += SOBEL_X[dy][dx] * window
            if SOBEL_Y[dy][dx] != 0.0:
                gy += SOBEL_Y[dy][dx] * window
    magnitude = np.sqrt(gx * gx + gy * gy)
    direction = np.arctan2(gy, gx)
    return magnitude, direction


def quantize_direction(direction: np.ndarray) -> np.ndarray:
    """Fold directions to [0, pi) and bin to 0deg/45deg/90deg/135deg (0..3)."""
    folded = np.mod(direction, math.pi)
    bins = np.zeros(folded.shape, dtype=np.int8)
    bins[(folded >= math.pi / 8) & (folded < 3 * math.pi / 8)] = 1
    bins[(folded >= 3 * math.pi / 8) & (folded < 5 * math.pi / 8)] = 2
    bins[(folded >= 5 * math.pi / 8) & (folded < 7 * math.pi / 8)] = 3
    return bins


def _shifted(padded: np.ndarray, dx: int, dy: int, h: int, w: int) -> np.ndarray:
    return padded[1 + dy:1 + dy + h, 1 + dx:1 + dx + w]


def non_maximum_suppression(magnitude: np.ndarray, direction: np.ndarray) -> np.ndarray:
    """Keep only directional local maxima; border pixels are suppressed."""
    h, w = magnitude.shape
    bins = quantize_direction(direction)
    # +inf beyond the border makes every comparison fail there.
    padded = np.pad(magnitude, 1, mode="constant", constant_values=np.inf)
    keep = np.zeros((h, w), dtype=bool)
    for b, (dx, dy) in enumerate(_BIN_OFFSETS):
        behind = _shifted(padded, -dx, -dy, h, w)
        ahead = _shifted(padded, dx, dy, h, w)
        keep |= (bins == b) & (magnitude > behind) & (magnitude >= ahead)
    # A gradient running parallel to the border still compares in-bounds, so
    # border rows and columns are zeroed outright; Sobel values there come
    # from clamped padding and are not trustworthy anyway.
    keep[0, :] = keep[-1, :] = False
    keep[:, 0] = keep[:, -1] = False
    return np.where(keep, magnitude, 0.0)


def hysteresis(suppressed: np.ndarray, low_threshold: float,
               high_threshold: float) -> np.ndarray:
    """Seed at strong pixels, grow through weak pixels, 8-connected."""
    strong = suppressed >= high_threshold
    weak = suppressed >= low_threshold
    if not strong.any():
        return np.zeros(suppressed.shape, dtype=bool)
    reachable = strong.copy()
    h, w = suppressed.shape
    while True:
        padded = np.pad(reachable, 1, mode="constant", constant_values=False)
        grown = np.zeros_like(reachable)
        for dy in (-1, 0, 1):
            for dx in (-1, 0, 1):
                grown |= padded[1 + dy:1 + dy + h, 1 + dx:1 + dx + w]
        grown &= weak
        if (grown == reachable).all():
            return reachable
        reachable = grown


def canny(image: RasterImage | np.ndarray, sigma: float = DEFAULT_SIGMA,
          low: float = DEFAULT_LOW, high: float = DEFAULT_HIGH) -> EdgeMap:
    """Full edge pipeline; low/high are fractions of the max gradient magnitude."""
    if not (0 < low < high <= 1):
        raise ValueError(f"thresholds must satisfy 0 < low < high <= 1, got {low}, {high}")
    gray = image.to_gray() if isinstance(image, RasterImage) else np.asarray(image, dtype=np.float64)
    blurred = gaussian_blur(gray, sigma)
    magnitude, direction = sobel_gradients(blurred)
    max_mag = float(magnitude.max())
    if max_mag <= 0.0:
        return EdgeMap(np.zeros(gray.shape, dtype=bool))
    suppressed = non_maximum_suppression(magnitude, direction)
    edges = hysteresis(suppressed, low * max_mag, high * max_mag)
    return EdgeMap(edges)


def edge_agreement(reference: EdgeMap, candidate: EdgeMap) -> float:
    """Fraction of reference edge pixels also present in the candidate map.

    Advisory structural-preservation score for a stylized output against
    the edges of its programmatic source; 1.0 when every source edge
    survives. Returns 1.0 for an edgeless reference.
    """
    if reference.mask.shape != candidate.mask.shape:
        raise ValueError("edge maps must share dimensions")
    total = reference.count()
    if total == 0:
        return 1.0
    return float((reference.mask & candidate.mask).sum()) / total
