"""Run orchestration: config, pipeline execution, evaluation, reports."""

from cage.harness.config import Backends, PipelineConfig, build_backends, default_config, load_config
from cage.harness.evaluate import evaluate_run
from cage.harness.report import (DEFAULT_COST_SCENARIOS, DEFAULT_EFFECTIVE_NOTE, MetricReport,
                                 ParadigmRow, render_accuracy_table, render_cost_table,
                                 render_report)
from cage.harness.run import PromptOutcome, RunRecord, run_pipeline

__all__ = [
    "Backends",
    "DEFAULT_COST_SCENARIOS",
    "DEFAULT_EFFECTIVE_NOTE",
    "MetricReport",
    "ParadigmRow",
    "PipelineConfig",
    "PromptOutcome",
    "RunRecord",
    "build_backends",
    "default_config",
    "evaluate_run",
    "load_config",
    "render_accuracy_table",
    "render_cost_table",
    "render_report",
    "run_pipeline",
]
