"""OCR result container and the backend contract.

Real recognizers plug in behind ``OcrBackend``; the shipped deterministic
mock lives in ``cage.mocks``. Token order is whatever the backend reports;
``concatenated_text`` is always derived from the tokens, never stored.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Protocol, runtime_checkable

from cage.imaging.raster import RasterImage, TextRegion


@dataclass(frozen=True)
class OcrResult:
    """Recognized text runs with their bounding boxes."""

    tokens: tuple[TextRegion, ...]

    def __post_init__(self):
        object.__setattr__(self, "tokens", tuple(self.tokens))

    @property
    def concatenated_text(self) -> str:
        return " ".join(t.text for t in self.tokens)

    @property
    def token_texts(self) -> list[str]:
        return [t.text for t in self.tokens]

    @classmethod
    def empty(cls) -> "OcrResult":
        return cls(tokens=())


@runtime_checkable
class OcrBackend(Protocol):
    """Pluggable recognizer: raster in, text regions out."""

    name: str

    def recognize(self, image: RasterImage) -> OcrResult:
        ...
