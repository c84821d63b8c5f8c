"""Pipeline execution over a manifest, with full artifact persistence.

Run directory layout::

    runs/<run-id>/
      config.json                config snapshot
      index.json                 per-prompt outcomes and backend names
      <prompt-id>/
        prompt.json
        attempt-1/ ... attempt-N/   code, render, verification per attempt
        prog.png  edges.png  mask.png  refined.png  regions.json
        metrics.json             written later by evaluation

Per-prompt failures are recorded in the index and never abort the run.
The index holds no timing, so re-running with deterministic backends
reproduces the directory byte for byte.
"""

from __future__ import annotations

import datetime as _dt
import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from cage.benchmark import DiagramPrompt, load_manifest
from cage.errors import CageError, ManifestError, RepairExhausted
from cage.harness.config import Backends, PipelineConfig, build_backends
from cage.refine import StyleSpec, build_refinement_request, style_prompt_for, stylize_with_preservation
from cage.synth.repair import synthesize_with_repair
from cage.synth.sandbox import RenderLimits

INDEX_NAME = "index.json"
CONFIG_NAME = "config.json"


@dataclass(frozen=True)
class PromptOutcome:
    prompt_id: str
    subject: str
    status: str  # "ok" or "failed"
    attempts: int
    error: str | None = None

    def to_dict(self) -> dict:
        return {"id": self.prompt_id, "subject": self.subject, "status": self.status,
                "attempts": self.attempts, "error": self.error}

    @classmethod
    def from_dict(cls, d: dict) -> "PromptOutcome":
        return cls(prompt_id=d["id"], subject=d["subject"], status=d["status"],
                   attempts=d["attempts"], error=d.get("error"))


@dataclass
class RunRecord:
    """Handle on one persisted run; elapsed time is in-memory only."""

    run_id: str
    root: Path
    config: dict
    backend_names: dict
    outcomes: list[PromptOutcome]
    elapsed_s: float = 0.0

    def ok_outcomes(self) -> list[PromptOutcome]:
        return [o for o in self.outcomes if o.status == "ok"]

    def prompt_dir(self, prompt_id: str) -> Path:
        return self.root / prompt_id

    def load_prompt(self, prompt_id: str) -> DiagramPrompt:
        data = json.loads((self.prompt_dir(prompt_id) / "prompt.json").read_text(encoding="utf-8"))
        return DiagramPrompt.from_dict(data)

    def save_index(self) -> Path:
        index = {
            "run_id": self.run_id,
            "backends": self.backend_names,
            "prompts": [o.to_dict() for o in sorted(self.outcomes, key=lambda o: o.prompt_id)],
        }
        path = self.root / INDEX_NAME
        path.write_text(json.dumps(index, indent=2, sort_keys=True) + "\n", encoding="utf-8")
        return path

    @classmethod
    def load(cls, root: str | Path) -> "RunRecord":
        root = Path(root)
        index_path = root / INDEX_NAME
        if not index_path.is_file():
            raise CageError(f"not a run directory (no {INDEX_NAME}): {root}")
        index = json.loads(index_path.read_text(encoding="utf-8"))
        config = json.loads((root / CONFIG_NAME).read_text(encoding="utf-8"))
        return cls(run_id=index["run_id"], root=root, config=config,
                   backend_names=index.get("backends", {}),
                   outcomes=[PromptOutcome.from_dict(d) for d in index["prompts"]])


def _default_run_id() -> str:
    stamp = _dt.datetime.now(_dt.timezone.utc).strftime("%Y%m%d-%H%M%S")
    return f"run-{stamp}"


def run_pipeline(manifest: str | Path | list[DiagramPrompt], config: PipelineConfig,
                 run_id: str | None = None,
                 backends: Backends | None = None) -> RunRecord:
    """Synthesize, refine, and persist every prompt in the manifest."""
    if isinstance(manifest, (str, Path)):
        prompts = load_manifest(manifest)
    else:
        prompts = list(manifest)
    if not prompts:
        raise ManifestError("manifest contains no prompts")

    # Backends resolve before any directory is created: config errors fail fast.
    if backends is None:
        backends = build_backends(config)

    run_id = run_id or _default_run_id()
    root = Path(config.runs_dir) / run_id
    root.mkdir(parents=True, exist_ok=False)
    (root / CONFIG_NAME).write_text(
        json.dumps(config.raw, indent=2, sort_keys=True) + "\n", encoding="utf-8")

    started = time.monotonic()
    with ThreadPoolExecutor(max_workers=config.jobs) as pool:
        outcomes = list(pool.map(
            lambda p: _run_prompt(p, config, backends, root), prompts))
    outcomes.sort(key=lambda o: o.prompt_id)

    record = RunRecord(run_id=run_id, root=root, config=config.raw,
                       backend_names=backends.names(), outcomes=outcomes,
                       elapsed_s=time.monotonic() - started)
    record.save_index()
    return record


def _run_prompt(prompt: DiagramPrompt, config: PipelineConfig,
                backends: Backends, root: Path) -> PromptOutcome:
    pdir = root / prompt.id
    pdir.mkdir(parents=True, exist_ok=True)
    (pdir / "prompt.json").write_text(
        json.dumps(prompt.to_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8")
    limits = RenderLimits(timeout_s=config.render_timeout_s)
    try:
        synth = synthesize_with_repair(prompt, backends.llm, backends.renderer,
                                       workdir=pdir, max_attempts=config.max_attempts,
                                       limits=limits)
        style = StyleSpec(
            prompt=style_prompt_for(prompt.grade_band, prompt.subject, config.style_prompt),
            strength=config.style_strength, seed=config.seed)
        request = build_refinement_request(
            synth.output, style, sigma=config.canny_sigma, low=config.canny_low,
            high=config.canny_high, mask_padding=config.mask_padding)
        refined = stylize_with_preservation(synth.output, style, backends.diffusion,
                                            mode=config.composite_mode, request=request)

        synth.output.image.to_png(pdir / "prog.png")
        request.edge_map.to_png(pdir / "edges.png")
        request.preservation_mask.to_png(pdir / "mask.png")
        refined.to_png(pdir / "refined.png")
        (pdir / "regions.json").write_text(
            json.dumps([r.to_dict() for r in synth.output.regions], indent=2) + "\n",
            encoding="utf-8")
        return PromptOutcome(prompt_id=prompt.id, subject=prompt.subject,
                             status="ok", attempts=synth.attempt_index)
    except RepairExhausted as exc:
        (pdir / "error.txt").write_text(str(exc) + "\n", encoding="utf-8")
        return PromptOutcome(prompt_id=prompt.id, subject=prompt.subject,
                             status="failed", attempts=exc.attempts, error=str(exc))
    except CageError as exc:
        (pdir / "error.txt").write_text(str(exc) + "\n", encoding="utf-8")
        return PromptOutcome(prompt_id=prompt.id, subject=prompt.subject,
                             status="failed", attempts=0, error=str(exc))
