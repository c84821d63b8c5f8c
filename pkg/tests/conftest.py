from __future__ import annotations

from pathlib import Path

import pytest

from cage.benchmark import DiagramPrompt

DATA_DIR = Path(__file__).parent / "data"


def make_prompt(pid: str = "bio-001", subject: str = "biology",
                grade_band: str = "6-8", topic: str = "cell structure",
                labels=("Nucleus", "Membrane"),
                text: str = "Draw a labeled animal cell.") -> DiagramPrompt:
    return DiagramPrompt(id=pid, subject=subject, grade_band=grade_band,
                         topic=topic, labels=tuple(labels), prompt_text=text)


@pytest.fixture
def data_dir() -> Path:
    return DATA_DIR


@pytest.fixture
def mock_run(tmp_path):
    """Completed 2-prompt all-mock pipeline run in a scratch directory."""
    from cage.harness.config import default_config
    from cage.harness.run import run_pipeline

    cfg = default_config(runs_dir=str(tmp_path / "runs"))
    prompts = [
        make_prompt(),
        make_prompt(pid="phy-001", subject="physics", grade_band="9-12",
                    topic="simple circuits", labels=("Battery", "Resistor"),
                    text="Draw a simple series circuit."),
    ]
    return run_pipeline(prompts, cfg, run_id="test-run")
