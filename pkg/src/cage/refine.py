"""Stage 2: structure-conditioned stylization with label preservation.

The edge map of the programmatic render is handed to a diffusion backend as
hard spatial conditioning, together with a style prompt and a mask covering
every label region. The backend returns a stylized raster; recomposition
then copies the original label pixels back inside the mask, so whatever the
backend did to the text is discarded. Pixel-copy recomposition makes the
masked region byte-equal to the programmatic render by construction.
"""

from __future__ import annotations

import base64
import logging
from dataclasses import dataclass, field
from typing import Any, Protocol, runtime_checkable

from cage.errors import BackendError, DimensionMismatch
from cage.imaging.canny import DEFAULT_HIGH, DEFAULT_LOW, DEFAULT_SIGMA, canny
from cage.imaging.compose import DEFAULT_MASK_PADDING, build_text_mask, composite_regions
from cage.imaging.raster import EdgeMap, RasterImage, RegionMask
from cage.synth.artifacts import RenderOutput

log = logging.getLogger(__name__)

STYLE_TEMPLATE = ("clean educational illustration, professional textbook diagram, "
                  "clear colors, white background")
STYLE_MODIFIERS = {
    "K-5": "bold simple shapes",
    "9-12": "detailed, technical",
}


def style_prompt_for(grade_band: str, subject: str,
                     overrides: str | None = None) -> str:
    """Default style text for a grade band; overrides win verbatim."""
    if overrides is not None:
        return overrides
    modifier = STYLE_MODIFIERS.get(grade_band)
    if modifier:
        return f"{STYLE_TEMPLATE}, {modifier}"
    return STYLE_TEMPLATE


@dataclass(frozen=True)
class StyleSpec:
    """Style prompt, conditioning strength, and seed for one refinement."""

    prompt: str
    strength: float = 0.7
    seed: int = 0

    def __post_init__(self):
        if not 0 < self.strength <= 1:
            raise ValueError(f"strength must be in (0, 1], got {self.strength}")


@dataclass(frozen=True)
class RefinementRequest:
    """Everything a diffusion backend needs for one image.

    source_image carries the programmatic render for backends that work
    img2img style; pure edge-conditioned backends may ignore it.
    """

    edge_map: EdgeMap
    preservation_mask: RegionMask
    style: StyleSpec
    width: int
    height: int
    source_image: RasterImage | None = None
    extra: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.edge_map.mask.shape != self.preservation_mask.mask.shape:
            raise DimensionMismatch(
                f"edge map {self.edge_map.mask.shape} vs mask "
                f"{self.preservation_mask.mask.shape}")
        if (self.height, self.width) != self.edge_map.mask.shape:
            raise DimensionMismatch(
                f"target {self.width}x{self.height} does not match edge map "
                f"{self.edge_map.width}x{self.edge_map.height}")


@runtime_checkable
class DiffusionBackend(Protocol):
    """Client contract for the stylization model."""

    name: str
    deterministic: bool

    def refine(self, request: RefinementRequest) -> RasterImage:
        ...


@runtime_checkable
class LabelRenderer(Protocol):
    """Optional hook that re-renders label text instead of copying pixels."""

    def render_labels(self, prog: RenderOutput, onto: RasterImage) -> RasterImage:
        ...


def build_refinement_request(prog: RenderOutput, style: StyleSpec,
                             sigma: float = DEFAULT_SIGMA,
                             low: float = DEFAULT_LOW,
                             high: float = DEFAULT_HIGH,
                             mask_padding: int = DEFAULT_MASK_PADDING,
                             extra: dict[str, Any] | None = None) -> RefinementRequest:
    """Derive the edge map and label mask from a programmatic render."""
    edges = canny(prog.image, sigma=sigma, low=low, high=high)
    if not prog.regions:
        log.warning("render has no label regions; preservation mask is empty")
    mask = build_text_mask(prog.regions, prog.image.width, prog.image.height,
                           padding=mask_padding)
    return RefinementRequest(edge_map=edges, preservation_mask=mask, style=style,
                             width=prog.image.width, height=prog.image.height,
                             source_image=prog.image, extra=dict(extra or {}))


def stylize_with_preservation(prog: RenderOutput, style: StyleSpec,
                              backend: DiffusionBackend,
                              mode: str = "pixel-copy",
                              request: RefinementRequest | None = None,
                              label_renderer: LabelRenderer | None = None,
                              **request_kwargs) -> RasterImage:
    """Full Stage-2 pass: refine through the backend, then restore labels.

    In pixel-copy mode the returned image is byte-equal to prog.image at
    every masked pixel regardless of what the backend produced.
    """
    if request is None:
        request = build_refinement_request(prog, style, **request_kwargs)
    styled = backend.refine(request)
    if (styled.width, styled.height) != (request.width, request.height):
        raise DimensionMismatch(
            f"backend {backend.name} returned {styled.width}x{styled.height}, "
            f"expected {request.width}x{request.height}")
    result = composite_regions(styled, prog.image, request.preservation_mask, mode=mode)
    if label_renderer is not None:
        result = label_renderer.render_labels(prog, result)
    return result


class HttpDiffusionBackend:
    """Adapter for an external stylization server speaking the shipped schema.

    Field names follow schemas/diffusion_http.json: base-64 PNGs for the
    edge map, mask, and optional source image; the response carries one
    base-64 PNG under "image".
    """

    deterministic = False

    def __init__(self, base_url: str, name: str = "http-diffusion",
                 timeout_s: float = 120.0):
        self.base_url = base_url.rstrip("/")
        self.name = name
        self.timeout_s = timeout_s

    def refine(self, request: RefinementRequest) -> RasterImage:
        import httpx

        payload = {
            "edge_map_png": _b64(request.edge_map.to_png_bytes()),
            "mask_png": _b64(request.preservation_mask.to_png_bytes()),
            "style_prompt": request.style.prompt,
            "strength": request.style.strength,
            "seed": request.style.seed,
            "width": request.width,
            "height": request.height,
            "options": request.extra,
        }
        if request.source_image is not None:
            payload["source_png"] = _b64(request.source_image.to_png_bytes())
        try:
            response = httpx.post(f"{self.base_url}/refine", json=payload,
                                  timeout=self.timeout_s)
            response.raise_for_status()
        except httpx.HTTPError as exc:
            raise BackendError(f"diffusion server request failed: {exc}") from exc
        body = response.json()
        if "image" not in body:
            raise BackendError("diffusion server response missing 'image' field")
        return RasterImage.from_png_bytes(base64.b64decode(body["image"]))


def _b64(data: bytes) -> str:
    return base64.b64encode(data).decode("ascii")
