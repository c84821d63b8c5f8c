"""Preservation-mask construction and label-region compositing.

``build_text_mask`` turns the renderer's text regions into a binary
preserve mask (union of padded boxes). ``composite_regions`` restores
masked pixels from the programmatic source into a stylized base image;
pixel-copy mode guarantees byte-equality inside the mask, feathered mode
trades exactness at the boundary for a softer seam.
"""

from __future__ import annotations

from collections.abc import Sequence

import numpy as np

from cage.errors import DimensionMismatch
from cage.imaging.raster import RasterImage, RegionMask, TextRegion

COMPOSITE_MODES = ("pixel-copy", "feathered")
FEATHER_BAND_PX = 2
DEFAULT_MASK_PADDING = 4


def build_text_mask(regions: Sequence[TextRegion], width: int, height: int,
                    padding: int = DEFAULT_MASK_PADDING) -> RegionMask:
    """Union of padded bounding boxes, clamped to the image extent."""
    if padding < 0:
        raise ValueError(f"padding must be >= 0, got {padding}")
    mask = np.zeros((height, width), dtype=bool)
    for region in regions:
        x, y, w, h = region.bbox
        x0 = max(0, x - padding)
        y0 = max(0, y - padding)
        x1 = min(width, x + w + padding)
        y1 = min(height, y + h + padding)
        if x1 > x0 and y1 > y0:
            mask[y0:y1, x0:x1] = True
    return RegionMask(mask)


def _erode8(mask: np.ndarray) -> np.ndarray:
    h, w = mask.shape
    padded = np.pad(mask, 1, mode="constant", constant_values=False)
    out = np.ones_like(mask)
    for dy in (-1, 0, 1):
        for dx in (-1, 0, 1):
            out &= padded[1 + dy:1 + dy + h, 1 + dx:1 + dx + w]
    return out


def composite_regions(base: RasterImage, source: RasterImage, mask: RegionMask,
                      mode: str = "pixel-copy") -> RasterImage:
    """Source pixels where the mask is set, base pixels elsewhere."""
    if mode not in COMPOSITE_MODES:
        raise ValueError(f"unknown composite mode {mode!r}, expected one of {COMPOSITE_MODES}")
    if not (base.pixels.shape == source.pixels.shape
            and base.pixels.shape[:2] == mask.mask.shape):
        raise DimensionMismatch(
            f"base {base.pixels.shape}, source {source.pixels.shape}, "
            f"mask {mask.mask.shape} must agree")

    if mode == "pixel-copy":
        out = np.where(mask.mask[:, :, None], source.pixels, base.pixels)
        return RasterImage(out.astype(np.uint8))

    # Feathered: alpha ramps linearly over a FEATHER_BAND_PX-wide band just
    # inside the mask boundary; deeper interior pixels copy exactly.
    inner = mask.mask
    depth = np.zeros(mask.mask.shape, dtype=np.float64)
    for _ in range(FEATHER_BAND_PX + 1):
        depth += inner
        inner = _erode8(inner)
    alpha = (depth / (FEATHER_BAND_PX + 1))[:, :, None]
    blended = np.rint(alpha * source.pixels.astype(np.float64)
                      + (1.0 - alpha) * base.pixels.astype(np.float64))
    return RasterImage(np.clip(blended, 0, 255).astype(np.uint8))
