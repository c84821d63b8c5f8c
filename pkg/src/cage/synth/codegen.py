"""Instruction assembly for the code-writing model.

The instruction embeds the required labels verbatim as a JSON array on a
line of its own (``LABELS_JSON: [...]``) so a backend, mock or real, can
recover them without guessing, and so the verifier can hold the generated
code to exactly that list.
"""

from __future__ import annotations

import json

from cage.benchmark import DiagramPrompt
from cage.synth.artifacts import RenderLanguage

LABELS_FIELD = "LABELS_JSON:"
PROMPT_ID_FIELD = "PROMPT_ID:"

_LANGUAGE_DIRECTIVES = {
    RenderLanguage.PYTHON_MATPLOTLIB: (
        "Write a complete Python script using matplotlib that draws the diagram "
        "and saves it as a PNG to the path given in the OUTPUT environment "
        "variable. Render every required label with ax.text() or ax.annotate()."
    ),
    RenderLanguage.LATEX_TIKZ: (
        "Write a standalone LaTeX document using TikZ that draws the diagram. "
        "Render every required label as a \\node."
    ),
    RenderLanguage.SVG: (
        "Write a complete SVG document that draws the diagram. Render every "
        "required label as a <text> element."
    ),
}


def build_codegen_prompt(prompt: DiagramPrompt, language: RenderLanguage | str,
                         feedback: str | None = None) -> str:
    """Assemble the full instruction for one generation or repair attempt."""
    language = RenderLanguage(language)
    lines = [
        f"Create an educational diagram: {prompt.topic}",
        f"Audience: grade band {prompt.grade_band}, subject {prompt.subject}.",
        prompt.prompt_text,
        _LANGUAGE_DIRECTIVES[language],
        "Every label below must appear verbatim, spelled exactly as given:",
        f"{LABELS_FIELD} {json.dumps(list(prompt.labels), ensure_ascii=False)}",
        f"{PROMPT_ID_FIELD} {prompt.id}",
    ]
    if feedback:
        lines.append(
            "The previous attempt failed verification. Fix the following and "
            f"regenerate the full script: {feedback}")
    return "\n".join(lines)


def parse_codegen_prompt(instruction: str) -> tuple[str, list[str], str | None]:
    """Recover (prompt_id, labels, feedback) from an assembled instruction.

    Used by scripted backends; raises ValueError when the structured lines
    are missing or malformed.
    """
    prompt_id: str | None = None
    labels: list[str] | None = None
    feedback: str | None = None
    for line in instruction.splitlines():
        if line.startswith(LABELS_FIELD):
            labels = json.loads(line[len(LABELS_FIELD):].strip())
        elif line.startswith(PROMPT_ID_FIELD):
            prompt_id = line[len(PROMPT_ID_FIELD):].strip()
        elif line.startswith("The previous attempt failed verification."):
            feedback = line
    if prompt_id is None or labels is None:
        raise ValueError("instruction missing structured label or id line")
    return prompt_id, labels, feedback
