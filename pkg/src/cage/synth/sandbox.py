"""Rendering generated diagram scripts in an isolated subprocess.

CommandRendererBackend writes the script to a scratch directory, runs a
configurable command over it with a wall-clock timeout and resource limits,
and reads back the raster plus two optional JSON sidecars: ``regions.json``
(label text regions with pixel bounding boxes) and ``structure.json``
(diagram connectivity). Mock backends implement the same protocol in
process, so the pipeline never needs a TeX or browser toolchain to test.
"""

from __future__ import annotations

import json
import subprocess
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Protocol, runtime_checkable

from cage.errors import RenderError, RenderTimeout
from cage.imaging.raster import RasterImage, TextRegion
from cage.synth.artifacts import CodeArtifact, RenderLanguage, RenderOutput
from cage.synth.verify import StructureGraph

DEFAULT_TIMEOUT_S = 30.0
DEFAULT_MAX_OUTPUT_PIXELS = 64_000_000
REGIONS_SIDECAR = "regions.json"
STRUCTURE_SIDECAR = "structure.json"
OUTPUT_IMAGE = "prog.png"


@dataclass(frozen=True)
class RenderLimits:
    """Resource ceilings for one render invocation."""

    timeout_s: float = DEFAULT_TIMEOUT_S
    max_output_pixels: int = DEFAULT_MAX_OUTPUT_PIXELS
    memory_bytes: int | None = None

    def __post_init__(self):
        if self.timeout_s <= 0:
            raise ValueError("timeout must be positive")
        if self.max_output_pixels <= 0:
            raise ValueError("max_output_pixels must be positive")


@runtime_checkable
class RendererBackend(Protocol):
    """Turns a code artifact into a raster plus sidecar metadata."""

    name: str
    language: RenderLanguage

    def render(self, artifact: CodeArtifact, workdir: Path,
               limits: RenderLimits) -> tuple[RasterImage, list[TextRegion], StructureGraph | None]:
        ...


def render(artifact: CodeArtifact, backend: RendererBackend, workdir: str | Path,
           limits: RenderLimits | None = None) -> tuple[RenderOutput, StructureGraph | None]:
    """Render through a backend and assemble the validated output record."""
    if artifact.language != backend.language:
        raise RenderError(f"backend {backend.name} renders {backend.language.value}, "
                          f"artifact is {artifact.language.value}")
    workdir = Path(workdir)
    workdir.mkdir(parents=True, exist_ok=True)
    limits = limits or RenderLimits()
    image, regions, structure = backend.render(artifact, workdir, limits)
    if image.width * image.height > limits.max_output_pixels:
        raise RenderError(f"output image {image.width}x{image.height} exceeds "
                          f"{limits.max_output_pixels} pixel limit")
    output = RenderOutput(image=image, regions=tuple(regions), artifact=artifact)
    return output, structure


class CommandRendererBackend:
    """Runs an external command to render a script file into a PNG.

    command_template is a list of argv items where ``{source}`` and
    ``{output}`` are substituted per render, e.g.::

        [sys.executable, "{source}"]

    with the script expected to honor an OUTPUT environment variable, or::

        ["some-renderer", "--in", "{source}", "--out", "{output}"]
    """

    def __init__(self, language: RenderLanguage | str, command_template: list[str],
                 name: str = "command"):
        self.language = RenderLanguage(language)
        self.command_template = list(command_template)
        self.name = name
        if not any("{source}" in part for part in self.command_template):
            raise ValueError("command template must reference {source}")

    def render(self, artifact: CodeArtifact, workdir: Path,
               limits: RenderLimits) -> tuple[RasterImage, list[TextRegion], StructureGraph | None]:
        source_path = workdir / f"source{self.language.extension}"
        output_path = workdir / OUTPUT_IMAGE
        source_path.write_text(artifact.source, encoding="utf-8")
        argv = [part.replace("{source}", str(source_path)).replace("{output}", str(output_path))
                for part in self.command_template]
        try:
            proc = subprocess.run(
                argv, cwd=workdir, capture_output=True, text=True,
                timeout=limits.timeout_s,
                env=_render_env(output_path),
                preexec_fn=_limit_resources(limits) if sys.platform != "win32" else None,
            )
        except subprocess.TimeoutExpired as exc:
            raise RenderTimeout(f"render exceeded {limits.timeout_s}s",
                                stdout=_tail(exc.stdout), stderr=_tail(exc.stderr)) from exc
        if proc.returncode != 0:
            raise RenderError(f"render command exited {proc.returncode}",
                              stdout=_tail(proc.stdout), stderr=_tail(proc.stderr))
        if not output_path.exists():
            raise RenderError("render command produced no output image",
                              stdout=_tail(proc.stdout), stderr=_tail(proc.stderr))
        image = RasterImage.from_png(output_path)
        regions = _read_regions(workdir / REGIONS_SIDECAR)
        structure = _read_structure(workdir / STRUCTURE_SIDECAR)
        return image, regions, structure


def _render_env(output_path: Path) -> dict[str, str]:
    import os

    env = dict(os.environ)
    env["OUTPUT"] = str(output_path)
    return env


def _limit_resources(limits: RenderLimits):
    """preexec hook applied in the child before exec; POSIX only."""
    import resource

    def apply():
        cpu = max(1, int(limits.timeout_s) + 1)
        resource.setrlimit(resource.RLIMIT_CPU, (cpu, cpu))
        if limits.memory_bytes:
            resource.setrlimit(resource.RLIMIT_AS,
                               (limits.memory_bytes, limits.memory_bytes))

    return apply


def _tail(text, max_chars: int = 4000) -> str:
    if text is None:
        return ""
    if isinstance(text, bytes):
        text = text.decode("utf-8", errors="replace")
    return text[-max_chars:]


def _read_regions(path: Path) -> list[TextRegion]:
    if not path.exists():
        return []
    try:
        records = json.loads(path.read_text(encoding="utf-8"))
        return [TextRegion.from_dict(r) for r in records]
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise RenderError(f"malformed regions sidecar {path}: {exc}") from exc


def _read_structure(path: Path) -> StructureGraph | None:
    if not path.exists():
        return None
    try:
        return StructureGraph.from_dict(json.loads(path.read_text(encoding="utf-8")))
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise RenderError(f"malformed structure sidecar {path}: {exc}") from exc
