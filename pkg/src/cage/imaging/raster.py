"""8-bit RGB rasters, binary edge/mask rasters, and PNG round-trips.

All pixel data is held in numpy arrays: RGB images as uint8 ``(h, w, 3)``,
edge maps and masks as bool ``(h, w)``. Binary rasters serialize to
1-channel PNG with values 0/255.
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from cage.errors import DimensionMismatch, RenderError

# Conventional luma weights for RGB -> grayscale.
LUMA_WEIGHTS = (0.299, 0.587, 0.114)


@dataclass(frozen=True)
class RasterImage:
    """Row-major 8-bit RGB raster."""

    pixels: np.ndarray

    def __post_init__(self):
        px = np.asarray(self.pixels)
        if px.ndim != 3 or px.shape[2] != 3:
            raise ValueError(f"expected (h, w, 3) pixel array, got shape {px.shape}")
        if px.shape[0] < 1 or px.shape[1] < 1:
            raise ValueError("image must be at least 1x1")
        if px.dtype != np.uint8:
            raise ValueError(f"expected uint8 pixels, got {px.dtype}")
        object.__setattr__(self, "pixels", px)

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @classmethod
    def blank(cls, width: int, height: int,
              color: tuple[int, int, int] = (255, 255, 255)) -> "RasterImage":
        px = np.empty((height, width, 3), dtype=np.uint8)
        px[:, :] = color
        return cls(px)

    @classmethod
    def from_png(cls, path: str | Path) -> "RasterImage":
        path = Path(path)
        try:
            with Image.open(path) as im:
                return cls(np.asarray(im.convert("RGB"), dtype=np.uint8))
        except (UnidentifiedImageError, OSError) as exc:
            raise RenderError(f"cannot decode image file {path}: {exc}") from exc

    @classmethod
    def from_png_bytes(cls, data: bytes) -> "RasterImage":
        try:
            with Image.open(io.BytesIO(data)) as im:
                return cls(np.asarray(im.convert("RGB"), dtype=np.uint8))
        except (UnidentifiedImageError, OSError) as exc:
            raise RenderError(f"cannot decode PNG payload: {exc}") from exc

    def to_png(self, path: str | Path) -> Path:
        path = Path(path)
        Image.fromarray(self.pixels, mode="RGB").save(path, format="PNG")
        return path

    def to_png_bytes(self) -> bytes:
        buf = io.BytesIO()
        Image.fromarray(self.pixels, mode="RGB").save(buf, format="PNG")
        return buf.getvalue()

    def to_gray(self) -> np.ndarray:
        """Luma grayscale as float64 in [0, 255]."""
        r, g, b = LUMA_WEIGHTS
        px = self.pixels.astype(np.float64)
        return r * px[:, :, 0] + g * px[:, :, 1] + b * px[:, :, 2]

    def same_shape(self, other: "RasterImage") -> bool:
        return self.pixels.shape == other.pixels.shape


def _binary_to_png(mask: np.ndarray, path: str | Path) -> Path:
    path = Path(path)
    Image.fromarray(np.where(mask, 255, 0).astype(np.uint8), mode="L").save(path, format="PNG")
    return path


def _binary_to_png_bytes(mask: np.ndarray) -> bytes:
    buf = io.BytesIO()
    Image.fromarray(np.where(mask, 255, 0).astype(np.uint8), mode="L").save(buf, format="PNG")
    return buf.getvalue()


def _binary_from_png(path: str | Path) -> np.ndarray:
    with Image.open(path) as im:
        return np.asarray(im.convert("L")) >= 128


@dataclass(frozen=True)
class EdgeMap:
    """Binary per-pixel edge flags, dimensions matching the source image."""

    mask: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.mask)
        if m.ndim != 2:
            raise ValueError(f"expected (h, w) mask, got shape {m.shape}")
        object.__setattr__(self, "mask", m.astype(bool))

    @property
    def width(self) -> int:
        return self.mask.shape[1]

    @property
    def height(self) -> int:
        return self.mask.shape[0]

    def count(self) -> int:
        return int(self.mask.sum())

    def to_png(self, path: str | Path) -> Path:
        return _binary_to_png(self.mask, path)

    def to_png_bytes(self) -> bytes:
        return _binary_to_png_bytes(self.mask)

    @classmethod
    def from_png(cls, path: str | Path) -> "EdgeMap":
        return cls(_binary_from_png(path))


@dataclass(frozen=True)
class RegionMask:
    """Binary preserve flags over a target image's pixel grid."""

    mask: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.mask)
        if m.ndim != 2:
            raise ValueError(f"expected (h, w) mask, got shape {m.shape}")
        object.__setattr__(self, "mask", m.astype(bool))

    @property
    def width(self) -> int:
        return self.mask.shape[1]

    @property
    def height(self) -> int:
        return self.mask.shape[0]

    def coverage(self) -> float:
        return float(self.mask.mean())

    def count(self) -> int:
        return int(self.mask.sum())

    def to_png(self, path: str | Path) -> Path:
        return _binary_to_png(self.mask, path)

    def to_png_bytes(self) -> bytes:
        return _binary_to_png_bytes(self.mask)

    @classmethod
    def from_png(cls, path: str | Path) -> "RegionMask":
        return cls(_binary_from_png(path))


@dataclass(frozen=True)
class TextRegion:
    """A rendered text run and its pixel-space bounding box (x, y, w, h)."""

    text: str
    bbox: tuple[int, int, int, int]

    def __post_init__(self):
        x, y, w, h = self.bbox
        if w <= 0 or h <= 0:
            raise ValueError(f"region {self.text!r} has non-positive extent {self.bbox}")
        object.__setattr__(self, "bbox", (int(x), int(y), int(w), int(h)))

    def within(self, width: int, height: int) -> bool:
        x, y, w, h = self.bbox
        return 0 <= x and 0 <= y and x + w <= width and y + h <= height

    def to_dict(self) -> dict:
        return {"text": self.text, "bbox": list(self.bbox)}

    @classmethod
    def from_dict(cls, d: dict) -> "TextRegion":
        return cls(text=d["text"], bbox=tuple(d["bbox"]))


def require_same_dimensions(*rasters) -> None:
    shapes = [(r.height, r.width) for r in rasters]
    if len(set(shapes)) > 1:
        raise DimensionMismatch(f"dimension mismatch: {shapes}")
