"""Raster primitives, the Canny edge pipeline, and label-region compositing."""

from cage.imaging.raster import RasterImage, EdgeMap, RegionMask, TextRegion
from cage.imaging.canny import gaussian_blur, sobel_gradients, canny, edge_agreement
from cage.imaging.compose import build_text_mask, composite_regions

__all__ = [
    "RasterImage",
    "EdgeMap",
    "RegionMask",
    "TextRegion",
    "gaussian_blur",
    "sobel_gradients",
    "canny",
    "edge_agreement",
    "build_text_mask",
    "composite_regions",
]
