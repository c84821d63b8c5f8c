"""Deterministic in-process backends for offline runs and tests.

The mock renderer encodes each label's text into a pixel strip at the top
row of its bounding box, and the mock OCR backend decodes those strips back
out of the raster. Text recognition on mock runs is therefore driven by
actual pixel content: erase or move a strip and the OCR result changes
accordingly, which is what makes end-to-end label-preservation tests
meaningful without a real OCR engine.

Strip layout, one pixel per tuple, starting at the bbox's top-left corner:

    (247, 3, 251)                  marker
    (nbytes, 0, 0)                 UTF-8 byte count of the text
    (w >> 8, w & 255, 0)           bbox width
    (h >> 8, h & 255, 0)           bbox height
    ... UTF-8 bytes packed 3 per pixel, zero padded
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from cage.errors import BackendError, RenderError
from cage.imaging.raster import RasterImage, TextRegion
from cage.metrics.ocr import OcrResult
from cage.refine import RefinementRequest
from cage.synth.artifacts import CodeArtifact, RenderLanguage
from cage.synth.sandbox import RenderLimits
from cage.synth.verify import StructureGraph

STRIP_MARKER = (247, 3, 251)
_HEADER_PIXELS = 4

RUNTIME_ERROR_MARKER = "RUNTIME_ERROR"
ISOLATED_NODE_MARKER = "ISOLATED_NODE"


def strip_length(text: str) -> int:
    """Pixels needed to encode text: header plus packed UTF-8 payload."""
    nbytes = len(text.encode("utf-8"))
    return _HEADER_PIXELS + (nbytes + 2) // 3


def encode_strip(pixels: np.ndarray, text: str, bbox: tuple[int, int, int, int]) -> None:
    """Write the strip for one label into a pixel array, in place."""
    x, y, w, h = bbox
    data = text.encode("utf-8")
    if len(data) > 255:
        raise ValueError(f"label too long to encode: {text!r}")
    needed = strip_length(text)
    if needed > w:
        raise ValueError(f"bbox width {w} cannot hold {needed}-pixel strip for {text!r}")
    if x + needed > pixels.shape[1] or y >= pixels.shape[0]:
        raise ValueError(f"strip for {text!r} does not fit the canvas")
    pixels[y, x] = STRIP_MARKER
    pixels[y, x + 1] = (len(data), 0, 0)
    pixels[y, x + 2] = (w >> 8, w & 255, 0)
    pixels[y, x + 3] = (h >> 8, h & 255, 0)
    padded = data + b"\x00" * (-len(data) % 3)
    for i in range(0, len(padded), 3):
        pixels[y, x + _HEADER_PIXELS + i // 3] = tuple(padded[i:i + 3])


def decode_strips(image: RasterImage) -> list[TextRegion]:
    """Scan a raster for strips; returns regions sorted by (y, x)."""
    px = image.pixels
    marker = np.all(px == np.array(STRIP_MARKER, dtype=np.uint8), axis=2)
    regions: list[TextRegion] = []
    for y, x in np.argwhere(marker):
        y, x = int(y), int(x)
        if x + _HEADER_PIXELS > image.width:
            continue
        nbytes = int(px[y, x + 1, 0])
        w = (int(px[y, x + 2, 0]) << 8) | int(px[y, x + 2, 1])
        h = (int(px[y, x + 3, 0]) << 8) | int(px[y, x + 3, 1])
        npix = (nbytes + 2) // 3
        if x + _HEADER_PIXELS + npix > image.width or w <= 0 or h <= 0:
            continue
        raw = bytearray()
        for i in range(npix):
            raw.extend(px[y, x + _HEADER_PIXELS + i].tolist())
        try:
            text = raw[:nbytes].decode("utf-8")
        except UnicodeDecodeError:
            continue
        regions.append(TextRegion(text=text, bbox=(x, y, w, h)))
    return regions


@dataclass
class MockCodegenLlm:
    """Deterministic stand-in for the code-writing model.

    Emits a minimal diagram script containing one text-rendering call per
    required label. Failures are injected per prompt id by attempt count:
    ``omit_label_attempts[pid] = n`` drops the last label on the first n
    attempts, ``runtime_error_attempts`` / ``isolated_node_attempts`` plant
    markers the mock renderer reacts to. Counters are per instance, so a
    fresh instance replays the exact same sequence.
    """

    language: RenderLanguage = RenderLanguage.PYTHON_MATPLOTLIB
    omit_label_attempts: dict[str, int] = field(default_factory=dict)
    runtime_error_attempts: dict[str, int] = field(default_factory=dict)
    isolated_node_attempts: dict[str, int] = field(default_factory=dict)
    omit_always: frozenset[str] = frozenset()
    name: str = "mock-codegen"

    def __post_init__(self):
        self.language = RenderLanguage(self.language)
        self._attempts: dict[str, int] = {}
        self._lock = threading.Lock()
        self.calls: list[str] = []

    def complete(self, instruction: str) -> str:
        from cage.synth.codegen import parse_codegen_prompt

        prompt_id, labels, _feedback = parse_codegen_prompt(instruction)
        with self._lock:
            self.calls.append(instruction)
            attempt = self._attempts.get(prompt_id, 0) + 1
            self._attempts[prompt_id] = attempt

        emit = list(labels)
        if prompt_id in self.omit_always or attempt <= self.omit_label_attempts.get(prompt_id, 0):
            emit = emit[:-1]
        markers: list[str] = []
        if attempt <= self.runtime_error_attempts.get(prompt_id, 0):
            markers.append(RUNTIME_ERROR_MARKER)
        if attempt <= self.isolated_node_attempts.get(prompt_id, 0):
            markers.append(ISOLATED_NODE_MARKER)
        return _emit_source(self.language, prompt_id, attempt, emit, markers)


def _emit_source(language: RenderLanguage, prompt_id: str, attempt: int,
                 labels: list[str], markers: list[str]) -> str:
    if language is RenderLanguage.PYTHON_MATPLOTLIB:
        lines = [f"# diagram script for {prompt_id}, attempt {attempt}"]
        lines += [f"# {m}" for m in markers]
        lines += [
            "import os",
            "import matplotlib",
            'matplotlib.use("Agg")',
            "import matplotlib.pyplot as plt",
            "",
            "fig, ax = plt.subplots(figsize=(4, 3))",
            "ax.plot([0, 1, 2], [0, 1, 0], color='black')",
        ]
        for i, lab in enumerate(labels):
            escaped = lab.replace("\\", "\\\\").replace('"', '\\"')
            lines.append(f'ax.text(0.1, {0.9 - 0.08 * i:.2f}, "{escaped}")')
        lines += ["ax.axis('off')", 'fig.savefig(os.environ["OUTPUT"], dpi=100)', ""]
        return "\n".join(lines)

    if language is RenderLanguage.LATEX_TIKZ:
        lines = [f"% diagram script for {prompt_id}, attempt {attempt}"]
        lines += [f"% {m}" for m in markers]
        lines += ["\\documentclass[tikz]{standalone}", "\\begin{document}",
                  "\\begin{tikzpicture}", "\\draw (0,0) -- (4,3);"]
        for i, lab in enumerate(labels):
            lines.append(f"\\node at (0,{-i}) {{{lab}}};")
        lines += ["\\end{tikzpicture}", "\\end{document}", ""]
        return "\n".join(lines)

    lines = [f"<!-- diagram script for {prompt_id}, attempt {attempt} -->"]
    lines += [f"<!-- {m} -->" for m in markers]
    lines += ['<svg xmlns="http://www.w3.org/2000/svg" width="320" height="240">',
              '<line x1="0" y1="0" x2="320" y2="240" stroke="black"/>']
    for i, lab in enumerate(labels):
        safe = lab.replace("&", "&amp;").replace("<", "&lt;")
        lines.append(f'<text x="10" y="{20 + 16 * i}">{safe}</text>')
    lines += ["</svg>", ""]
    return "\n".join(lines)


@dataclass
class ScriptedLlmBackend:
    """Replays a fixed list of sources, one per call, then raises."""

    sources: list[str]
    name: str = "scripted-llm"

    def __post_init__(self):
        self._index = 0
        self._lock = threading.Lock()
        self.instructions: list[str] = []

    def complete(self, instruction: str) -> str:
        with self._lock:
            self.instructions.append(instruction)
            if self._index >= len(self.sources):
                raise BackendError("scripted backend exhausted its sources")
            source = self.sources[self._index]
            self._index += 1
            return source


_CANVAS_WIDTH = 320
_MARGIN = 8
_ROW_STEP = 16
_LABEL_HEIGHT = 10


class MockRendererBackend:
    """Pure-function renderer: raster layout derived only from the source.

    Labels stack top to bottom as strip-encoded rows; a 2-pixel black frame
    and a diagonal line give the edge detector real structure to find. The
    connectivity sidecar chains the labels in order, so it is connected
    unless the source plants the isolated-node marker.
    """

    def __init__(self, language: RenderLanguage | str = RenderLanguage.PYTHON_MATPLOTLIB,
                 name: str = "mock-renderer"):
        self.language = RenderLanguage(language)
        self.name = name

    def render(self, artifact: CodeArtifact, workdir: Path,
               limits: RenderLimits) -> tuple[RasterImage, list[TextRegion], StructureGraph]:
        if RUNTIME_ERROR_MARKER in artifact.source:
            raise RenderError("mock renderer: script aborted",
                              stderr="RuntimeError: injected failure")
        labels = list(artifact.extracted_labels)
        height = max(240, 2 * _MARGIN + _ROW_STEP * len(labels))
        px = np.full((height, _CANVAS_WIDTH, 3), 255, dtype=np.uint8)

        # Frame and diagonal, 2 px thick, so the edge map is non-trivial.
        px[2:4, 2:-2] = 0
        px[-4:-2, 2:-2] = 0
        px[2:-2, 2:4] = 0
        px[2:-2, -4:-2] = 0
        span = min(height, _CANVAS_WIDTH) - 40
        for t in range(span):
            px[20 + t, 20 + t] = 0
            px[20 + t, 21 + t] = 0

        regions: list[TextRegion] = []
        for i, lab in enumerate(labels):
            y = _MARGIN + i * _ROW_STEP
            x = 40
            w = max(strip_length(lab), 24)
            bbox = (x, y, w, _LABEL_HEIGHT)
            px[y:y + _LABEL_HEIGHT, x:x + w] = (238, 238, 238)
            encode_strip(px, lab, bbox)
            regions.append(TextRegion(text=lab, bbox=bbox))

        nodes = list(labels)
        edges = [(labels[i], labels[i + 1]) for i in range(len(labels) - 1)]
        if ISOLATED_NODE_MARKER in artifact.source:
            nodes.append("floating-part")
        structure = StructureGraph(nodes=tuple(nodes), edges=tuple(edges))
        return RasterImage(px), regions, structure


@dataclass(frozen=True)
class StripOcrBackend:
    """Reads back whatever strips are actually present in the raster."""

    name: str = "mock-strip-ocr"

    def recognize(self, image: RasterImage) -> OcrResult:
        regions = decode_strips(image)
        regions.sort(key=lambda r: (r.bbox[1], r.bbox[0]))
        return OcrResult(tokens=tuple(regions))


@dataclass(frozen=True)
class IdentityDiffusionMock:
    """Returns the programmatic render with edge pixels drawn over in black."""

    name: str = "mock-identity"
    deterministic: bool = True

    def refine(self, request: RefinementRequest) -> RasterImage:
        if request.source_image is None:
            raise BackendError(f"{self.name} needs the source image in the request")
        out = request.source_image.pixels.copy()
        out[request.edge_map.mask] = 0
        return RasterImage(out)


@dataclass(frozen=True)
class RecolorDiffusionMock:
    """Bijective channel shuffle: every pixel changes, structure intact.

    (r, g, b) -> (g, b, 255 - r) moves white and black alike, so any pixel
    the recomposition fails to restore shows up as a byte difference.
    """

    name: str = "mock-recolor"
    deterministic: bool = True

    def refine(self, request: RefinementRequest) -> RasterImage:
        if request.source_image is None:
            raise BackendError(f"{self.name} needs the source image in the request")
        src = request.source_image.pixels
        out = np.empty_like(src)
        out[:, :, 0] = src[:, :, 1]
        out[:, :, 1] = src[:, :, 2]
        out[:, :, 2] = 255 - src[:, :, 0]
        return RasterImage(out)


@dataclass(frozen=True)
class MockEmbedder:
    """Cheap deterministic image features for the distributional metric."""

    name: str = "mock-stats"
    dim: int = 8

    def embed(self, image: RasterImage) -> np.ndarray:
        # Features live in [0, 1]: keeps downstream covariance math
        # well-conditioned so identical sets score ~0 within tight bounds.
        px = image.pixels.astype(np.float64) / 255.0
        gray = image.to_gray() / 255.0
        gx = np.abs(np.diff(gray, axis=1)).mean() if image.width > 1 else 0.0
        gy = np.abs(np.diff(gray, axis=0)).mean() if image.height > 1 else 0.0
        return np.array([
            px[:, :, 0].mean(), px[:, :, 1].mean(), px[:, :, 2].mean(),
            px[:, :, 0].std(), px[:, :, 1].std(), px[:, :, 2].std(),
            gx, gy,
        ], dtype=np.float64)
