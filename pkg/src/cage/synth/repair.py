"""Generate-verify-repair loop for diagram code.

Each attempt asks the model for a script, extracts its labels, renders it
if the labels pass, and runs full verification. On failure the next attempt
gets the failure summary appended to its instruction. Every attempt leaves
a complete audit trail under ``attempt-<n>/`` whether it passed or not.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from cage.benchmark import DiagramPrompt
from cage.errors import RenderError, RepairExhausted
from cage.synth.artifacts import CodeArtifact, LlmBackend, RenderLanguage, RenderOutput
from cage.synth.codegen import build_codegen_prompt
from cage.synth.sandbox import RendererBackend, RenderLimits, render
from cage.synth.verify import StructureGraph, VerificationResult, verify_code

DEFAULT_MAX_ATTEMPTS = 3


@dataclass(frozen=True)
class SynthesisResult:
    """A verified render plus which attempt produced it (1-based)."""

    output: RenderOutput
    verification: VerificationResult
    structure: StructureGraph | None
    attempt_index: int
    attempts_total: int


def synthesize_with_repair(prompt: DiagramPrompt, llm: LlmBackend,
                           renderer: RendererBackend,
                           workdir: str | Path,
                           max_attempts: int = DEFAULT_MAX_ATTEMPTS,
                           limits: RenderLimits | None = None) -> SynthesisResult:
    """Run up to max_attempts generate-render-verify rounds.

    Returns on the first attempt whose verification passes overall; raises
    RepairExhausted carrying the final verification otherwise. Rendering is
    skipped when the label check already failed, since the failure feedback
    is the same and rendering bad code wastes the sandbox budget.
    """
    if max_attempts < 1:
        raise ValueError("max_attempts must be at least 1")
    workdir = Path(workdir)
    workdir.mkdir(parents=True, exist_ok=True)
    language = renderer.language
    feedback: str | None = None
    verification: VerificationResult | None = None

    for attempt in range(1, max_attempts + 1):
        attempt_dir = workdir / f"attempt-{attempt}"
        attempt_dir.mkdir(parents=True, exist_ok=True)
        instruction = build_codegen_prompt(prompt, language, feedback=feedback)
        artifact = CodeArtifact(source=llm.complete(instruction), language=language)
        (attempt_dir / f"code{language.extension}").write_text(
            artifact.source, encoding="utf-8")

        output: RenderOutput | None = None
        structure: StructureGraph | None = None
        execution_error: str | None = None

        labels_present = all(lab in artifact.extracted_labels for lab in prompt.labels)
        if labels_present:
            try:
                output, structure = render(artifact, renderer, attempt_dir, limits=limits)
            except RenderError as exc:
                execution_error = str(exc)

        verification = verify_code(artifact, prompt, render_result=output,
                                   structure=structure, execution_error=execution_error)
        (attempt_dir / "verify.json").write_text(verification.to_json(), encoding="utf-8")
        if output is not None:
            output.image.to_png(attempt_dir / "prog.png")
            (attempt_dir / "regions.json").write_text(
                json.dumps([r.to_dict() for r in output.regions], indent=2),
                encoding="utf-8")

        if verification.overall and output is not None:
            return SynthesisResult(output=output, verification=verification,
                                   structure=structure, attempt_index=attempt,
                                   attempts_total=max_attempts)
        feedback = verification.failure_summary()

    assert verification is not None
    raise RepairExhausted(
        f"prompt {prompt.id}: verification still failing after {max_attempts} "
        f"attempts ({verification.failure_summary()})",
        verification=verification, attempts=max_attempts)
