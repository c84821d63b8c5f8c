"""Pipeline configuration and backend wiring.

Config files are JSON. Backends are declared as named adapters under
``backends``; each entry picks a ``kind`` from the registry below plus
kind-specific options. Credentials are never stored in config: HTTP
adapters name the environment variable that holds the key instead.

    {
      "language": "python-matplotlib",
      "backends": {
        "llm":       {"kind": "mock-codegen"},
        "renderer":  {"kind": "mock"},
        "diffusion": {"kind": "mock-recolor"},
        "ocr":       {"kind": "mock-strip"},
        "embedder":  {"kind": "mock-stats"}
      }
    }

Every config problem raises ConfigError naming the offending key, before
any generation starts.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from cage.errors import BackendError, ConfigError
from cage.imaging.canny import DEFAULT_HIGH, DEFAULT_LOW, DEFAULT_SIGMA
from cage.imaging.compose import COMPOSITE_MODES, DEFAULT_MASK_PADDING
from cage.synth.artifacts import RenderLanguage
from cage.synth.repair import DEFAULT_MAX_ATTEMPTS

LLM_KINDS = ("mock-codegen", "scripted", "http")
RENDERER_KINDS = ("mock", "command")
DIFFUSION_KINDS = ("mock-identity", "mock-recolor", "http")
OCR_KINDS = ("mock-strip",)
EMBEDDER_KINDS = ("mock-stats",)


@dataclass(frozen=True)
class PipelineConfig:
    """Validated run settings plus the raw snapshot they came from."""

    language: RenderLanguage = RenderLanguage.PYTHON_MATPLOTLIB
    seed: int = 0
    jobs: int = 1
    max_attempts: int = DEFAULT_MAX_ATTEMPTS
    runs_dir: str = "runs"
    style_strength: float = 0.7
    style_prompt: str | None = None
    canny_sigma: float = DEFAULT_SIGMA
    canny_low: float = DEFAULT_LOW
    canny_high: float = DEFAULT_HIGH
    mask_padding: int = DEFAULT_MASK_PADDING
    composite_mode: str = "pixel-copy"
    render_timeout_s: float = 30.0
    backends: dict = field(default_factory=dict)
    reference_dir: str | None = None
    manifest: str | None = None
    review: dict = field(default_factory=dict)
    raw: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.jobs < 1:
            raise ConfigError(f"jobs must be >= 1, got {self.jobs}")
        if self.max_attempts < 1:
            raise ConfigError(f"max_attempts must be >= 1, got {self.max_attempts}")
        if self.composite_mode not in COMPOSITE_MODES:
            raise ConfigError(f"composite_mode must be one of {COMPOSITE_MODES}, "
                              f"got {self.composite_mode!r}")
        if not 0 < self.style_strength <= 1:
            raise ConfigError(f"style_strength must be in (0, 1], got {self.style_strength}")


def config_from_dict(data: dict) -> PipelineConfig:
    """Build a validated config; unknown top-level keys are rejected."""
    known = {"language", "seed", "jobs", "max_attempts", "runs_dir", "style_strength",
             "style_prompt", "canny", "mask_padding", "composite_mode",
             "render_timeout_s", "backends", "reference_dir", "manifest", "review"}
    unknown = sorted(set(data) - known)
    if unknown:
        raise ConfigError(f"unknown config keys: {unknown}")
    try:
        language = RenderLanguage(data.get("language", "python-matplotlib"))
    except ValueError as exc:
        allowed = [v.value for v in RenderLanguage]
        raise ConfigError(f"language must be one of {allowed}") from exc
    canny = data.get("canny", {})
    if not isinstance(canny, dict):
        raise ConfigError("canny must be an object with sigma/low/high")
    backends = data.get("backends", {})
    if not isinstance(backends, dict):
        raise ConfigError("backends must be an object of adapter specs")
    return PipelineConfig(
        language=language,
        seed=int(data.get("seed", 0)),
        jobs=int(data.get("jobs", 1)),
        max_attempts=int(data.get("max_attempts", DEFAULT_MAX_ATTEMPTS)),
        runs_dir=str(data.get("runs_dir", "runs")),
        style_strength=float(data.get("style_strength", 0.7)),
        style_prompt=data.get("style_prompt"),
        canny_sigma=float(canny.get("sigma", DEFAULT_SIGMA)),
        canny_low=float(canny.get("low", DEFAULT_LOW)),
        canny_high=float(canny.get("high", DEFAULT_HIGH)),
        mask_padding=int(data.get("mask_padding", DEFAULT_MASK_PADDING)),
        composite_mode=str(data.get("composite_mode", "pixel-copy")),
        render_timeout_s=float(data.get("render_timeout_s", 30.0)),
        backends=backends,
        reference_dir=data.get("reference_dir"),
        manifest=data.get("manifest"),
        review=dict(data.get("review", {})),
        raw=data,
    )


def load_config(path: str | Path) -> PipelineConfig:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"config file {path} must hold a JSON object")
    return config_from_dict(data)


def default_config(**overrides) -> PipelineConfig:
    """All-mock config used by tests and offline runs."""
    data = {
        "language": "python-matplotlib",
        "backends": {
            "llm": {"kind": "mock-codegen"},
            "renderer": {"kind": "mock"},
            "diffusion": {"kind": "mock-recolor"},
            "ocr": {"kind": "mock-strip"},
            "embedder": {"kind": "mock-stats"},
        },
    }
    data.update(overrides)
    return config_from_dict(data)


@dataclass(frozen=True)
class Backends:
    """Resolved backend instances for one run."""

    llm: object
    renderer: object
    diffusion: object
    ocr: object | None = None
    embedder: object | None = None

    def names(self) -> dict:
        out = {"llm": self.llm.name, "renderer": self.renderer.name,
               "diffusion": self.diffusion.name}
        if self.ocr is not None:
            out["ocr"] = self.ocr.name
        if self.embedder is not None:
            out["embedder"] = self.embedder.name
        return out


class HttpLlmBackend:
    """Minimal adapter for an instruction-to-code HTTP endpoint.

    POSTs {"instruction": ...} to {base_url}/complete and expects
    {"source": ...}. The API key is read from the environment variable
    named by ``auth_env`` at call time and sent as a bearer token.
    """

    def __init__(self, base_url: str, auth_env: str | None = None,
                 name: str = "http-llm", timeout_s: float = 120.0):
        self.base_url = base_url.rstrip("/")
        self.auth_env = auth_env
        self.name = name
        self.timeout_s = timeout_s

    def complete(self, instruction: str) -> str:
        import os

        import httpx

        headers = {}
        if self.auth_env:
            key = os.environ.get(self.auth_env)
            if not key:
                raise BackendError(f"environment variable {self.auth_env} is not set")
            headers["Authorization"] = f"Bearer {key}"
        try:
            response = httpx.post(f"{self.base_url}/complete",
                                  json={"instruction": instruction},
                                  headers=headers, timeout=self.timeout_s)
            response.raise_for_status()
        except httpx.HTTPError as exc:
            raise BackendError(f"llm server request failed: {exc}") from exc
        body = response.json()
        if "source" not in body:
            raise BackendError("llm server response missing 'source' field")
        return body["source"]


def _require(spec: dict, key: str, where: str):
    if key not in spec:
        raise ConfigError(f"{where} is missing required option {key!r}")
    return spec[key]


def _build_llm(spec: dict, config: PipelineConfig):
    from cage.mocks import MockCodegenLlm, ScriptedLlmBackend

    kind = spec.get("kind")
    if kind == "mock-codegen":
        return MockCodegenLlm(
            language=config.language,
            omit_label_attempts=dict(spec.get("omit_label_attempts", {})),
            runtime_error_attempts=dict(spec.get("runtime_error_attempts", {})),
            isolated_node_attempts=dict(spec.get("isolated_node_attempts", {})),
            omit_always=frozenset(spec.get("omit_always", ())),
        )
    if kind == "scripted":
        return ScriptedLlmBackend(sources=list(_require(spec, "sources", "backends.llm")))
    if kind == "http":
        return HttpLlmBackend(base_url=_require(spec, "base_url", "backends.llm"),
                              auth_env=spec.get("auth_env"))
    raise ConfigError(f"backends.llm.kind must be one of {LLM_KINDS}, got {kind!r}")


def _build_renderer(spec: dict, config: PipelineConfig):
    from cage.mocks import MockRendererBackend
    from cage.synth.sandbox import CommandRendererBackend

    kind = spec.get("kind")
    if kind == "mock":
        return MockRendererBackend(language=config.language)
    if kind == "command":
        return CommandRendererBackend(
            language=config.language,
            command_template=list(_require(spec, "command", "backends.renderer")))
    raise ConfigError(f"backends.renderer.kind must be one of {RENDERER_KINDS}, got {kind!r}")


def _build_diffusion(spec: dict):
    from cage.mocks import IdentityDiffusionMock, RecolorDiffusionMock
    from cage.refine import HttpDiffusionBackend

    kind = spec.get("kind")
    if kind == "mock-identity":
        return IdentityDiffusionMock()
    if kind == "mock-recolor":
        return RecolorDiffusionMock()
    if kind == "http":
        return HttpDiffusionBackend(base_url=_require(spec, "base_url", "backends.diffusion"))
    raise ConfigError(f"backends.diffusion.kind must be one of {DIFFUSION_KINDS}, got {kind!r}")


def _build_ocr(spec: dict):
    from cage.mocks import StripOcrBackend

    kind = spec.get("kind")
    if kind == "mock-strip":
        return StripOcrBackend()
    raise ConfigError(f"backends.ocr.kind must be one of {OCR_KINDS}, got {kind!r}")


def _build_embedder(spec: dict):
    from cage.mocks import MockEmbedder

    kind = spec.get("kind")
    if kind == "mock-stats":
        return MockEmbedder()
    raise ConfigError(f"backends.embedder.kind must be one of {EMBEDDER_KINDS}, got {kind!r}")


def build_backends(config: PipelineConfig) -> Backends:
    """Instantiate every declared backend; missing core adapters fail fast."""
    specs = config.backends
    for required in ("llm", "renderer", "diffusion"):
        if required not in specs:
            raise ConfigError(f"backends.{required} is required but missing from config")
    return Backends(
        llm=_build_llm(specs["llm"], config),
        renderer=_build_renderer(specs["renderer"], config),
        diffusion=_build_diffusion(specs["diffusion"]),
        ocr=_build_ocr(specs["ocr"]) if "ocr" in specs else None,
        embedder=_build_embedder(specs["embedder"]) if "embedder" in specs else None,
    )
