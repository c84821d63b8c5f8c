"""Data model for generated diagram code and its rendered output."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Protocol, runtime_checkable

from cage.imaging.raster import RasterImage, TextRegion


class RenderLanguage(str, Enum):
    """Target languages a diagram script can be written in."""

    PYTHON_MATPLOTLIB = "python-matplotlib"
    LATEX_TIKZ = "latex-tikz"
    SVG = "svg"

    @property
    def extension(self) -> str:
        return {
            RenderLanguage.PYTHON_MATPLOTLIB: ".py",
            RenderLanguage.LATEX_TIKZ: ".tex",
            RenderLanguage.SVG: ".svg",
        }[self]


@dataclass(frozen=True)
class CodeArtifact:
    """A generated diagram script plus the labels lexically present in it.

    extracted_labels is always recomputed from the source at construction,
    so the two fields cannot drift apart.
    """

    source: str
    language: RenderLanguage
    extracted_labels: tuple[str, ...] = ()

    def __post_init__(self):
        from cage.synth.extract import extract_labels

        if not self.source.strip():
            raise ValueError("artifact source must be non-empty")
        object.__setattr__(self, "language", RenderLanguage(self.language))
        object.__setattr__(self, "extracted_labels",
                           tuple(extract_labels(self.source, self.language)))


@dataclass(frozen=True)
class RenderOutput:
    """The raster a script produced plus the text regions it reported.

    Every reported region has to sit inside the image bounds, and its text
    must be one of the labels present in the source; anything else means the
    renderer and the script disagree about what was drawn.
    """

    image: RasterImage
    regions: tuple[TextRegion, ...]
    artifact: CodeArtifact

    def __post_init__(self):
        object.__setattr__(self, "regions", tuple(self.regions))
        extracted = set(self.artifact.extracted_labels)
        for region in self.regions:
            if region.text not in extracted:
                raise ValueError(
                    f"region text {region.text!r} not among extracted labels")
            if not region.within(self.image.width, self.image.height):
                raise ValueError(
                    f"region {region.text!r} bbox {region.bbox} outside "
                    f"{self.image.width}x{self.image.height} image")

    def region_for(self, text: str) -> TextRegion | None:
        for region in self.regions:
            if region.text == text:
                return region
        return None


@runtime_checkable
class LlmBackend(Protocol):
    """Produces diagram source code from a natural-language instruction."""

    name: str

    def complete(self, instruction: str) -> str:
        ...
