"""Code-anchored diagram synthesis: generation, rendering, verification, repair."""

from cage.synth.artifacts import CodeArtifact, LlmBackend, RenderLanguage, RenderOutput
from cage.synth.codegen import build_codegen_prompt, parse_codegen_prompt
from cage.synth.extract import extract_labels
from cage.synth.repair import SynthesisResult, synthesize_with_repair
from cage.synth.sandbox import CommandRendererBackend, RendererBackend, RenderLimits, render
from cage.synth.verify import StructureGraph, VerificationResult, check_structure, verify_code

__all__ = [
    "CodeArtifact",
    "CommandRendererBackend",
    "LlmBackend",
    "RenderLanguage",
    "RenderLimits",
    "RenderOutput",
    "RendererBackend",
    "StructureGraph",
    "SynthesisResult",
    "VerificationResult",
    "build_codegen_prompt",
    "check_structure",
    "extract_labels",
    "parse_codegen_prompt",
    "render",
    "synthesize_with_repair",
    "verify_code",
]
