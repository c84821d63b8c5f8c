"""Command-line interface.

Exit codes: 0 success, 1 run-level failure, 2 configuration error.
"""

from __future__ import annotations

import json
import sys
from decimal import Decimal
from pathlib import Path

import click

from cage.errors import CageError, ConfigError


def _load_cfg(ctx) -> "PipelineConfig":
    from cage.harness.config import default_config, load_config

    path = ctx.obj.get("config_path")
    cfg = load_config(path) if path else default_config()
    overrides = {}
    if ctx.obj.get("seed") is not None:
        overrides["seed"] = ctx.obj["seed"]
    if ctx.obj.get("jobs") is not None:
        overrides["jobs"] = ctx.obj["jobs"]
    if overrides:
        from cage.harness.config import config_from_dict

        data = dict(cfg.raw) if cfg.raw else {}
        data.update(overrides)
        cfg = config_from_dict(data)
    return cfg


@click.group()
@click.option("--config", "config_path", type=click.Path(), default=None,
              help="JSON config file; defaults to all-mock backends.")
@click.option("--seed", type=int, default=None, help="Override the config seed.")
@click.option("--jobs", type=int, default=None, help="Worker pool size.")
@click.pass_context
def main(ctx, config_path, seed, jobs):
    """Two-stage diagram pipeline: generation, refinement, evaluation, review."""
    ctx.ensure_object(dict)
    ctx.obj.update(config_path=config_path, seed=seed, jobs=jobs)


def _exit_on_error(fn):
    """Map the exception hierarchy onto the documented exit codes."""
    import functools

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except ConfigError as exc:
            click.echo(f"config error: {exc}", err=True)
            sys.exit(2)
        except CageError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(1)

    return wrapper


@main.group()
def bench():
    """Benchmark manifest utilities."""


@bench.command("validate")
@click.argument("manifest", type=click.Path(exists=True))
@click.option("--strata", default=None,
              help="Expected per-subject counts, e.g. biology=110,chemistry=95.")
@_exit_on_error
def bench_validate(manifest, strata):
    """Validate a JSONL manifest; exit 1 when validation fails."""
    from cage.benchmark import load_manifest, validate_manifest

    expected = None
    if strata:
        expected = {}
        for part in strata.split(","):
            subject, _, count = part.partition("=")
            expected[subject.strip()] = int(count)
    prompts = load_manifest(manifest)
    result = validate_manifest(prompts, expected_strata=expected)
    click.echo(json.dumps(result.to_dict(), indent=2, sort_keys=True))
    if not result.passed:
        sys.exit(1)


@main.group()
def pipeline():
    """Generation and refinement runs."""


@pipeline.command("run")
@click.argument("manifest", type=click.Path(exists=True))
@click.option("--run-id", default=None, help="Run directory name; default timestamped.")
@click.pass_context
@_exit_on_error
def pipeline_run(ctx, manifest, run_id):
    """Run the two-stage pipeline over every prompt in MANIFEST."""
    from cage.harness.run import run_pipeline

    cfg = _load_cfg(ctx)
    record = run_pipeline(manifest, cfg, run_id=run_id)
    ok = len(record.ok_outcomes())
    click.echo(f"run {record.run_id}: {ok}/{len(record.outcomes)} prompts ok "
               f"-> {record.root}")
    for outcome in record.outcomes:
        if outcome.status != "ok":
            click.echo(f"  failed {outcome.prompt_id}: {outcome.error}", err=True)
    if ok == 0:
        sys.exit(1)


@main.command("eval")
@click.argument("run_dir", type=click.Path(exists=True))
@click.option("--reference", "reference_dir", type=click.Path(), default=None,
              help="Reference image directory for the distribution distance.")
@click.pass_context
@_exit_on_error
def eval_cmd(ctx, run_dir, reference_dir):
    """Evaluate a persisted run directory; writes metrics.json into it."""
    from cage.benchmark import load_reference_set
    from cage.harness.config import build_backends
    from cage.harness.evaluate import evaluate_run
    from cage.harness.run import RunRecord

    cfg = _load_cfg(ctx)
    backends = build_backends(cfg)
    if backends.ocr is None:
        raise ConfigError("backends.ocr is required for evaluation")
    run = RunRecord.load(run_dir)
    reference = None
    ref_dir = reference_dir or cfg.reference_dir
    if ref_dir:
        reference = load_reference_set(ref_dir)
    report = evaluate_run(run, reference, backends.ocr, backends.embedder)
    click.echo(json.dumps(report.to_dict(), indent=2, sort_keys=True))


@main.command("fid")
@click.argument("dir_a", type=click.Path(exists=True))
@click.argument("dir_b", type=click.Path(exists=True))
@click.pass_context
@_exit_on_error
def fid_cmd(ctx, dir_a, dir_b):
    """Distribution distance between the PNG sets in two directories."""
    from cage.benchmark import load_reference_set
    from cage.harness.config import build_backends
    from cage.metrics.fid import embed_images, fid

    cfg = _load_cfg(ctx)
    backends = build_backends(cfg)
    if backends.embedder is None:
        raise ConfigError("backends.embedder is required for fid")
    features = []
    for d in (dir_a, dir_b):
        images = load_reference_set(d).load_images()
        features.append(embed_images(images, backends.embedder))
    click.echo(f"{fid(features[0], features[1]):.6f}")


@main.command("cost")
@click.option("--per-image", required=True, help="Price per image in dollars.")
@click.option("--deck-size", default=12, show_default=True)
@click.option("--decks-per-week", default=1, show_default=True)
@click.option("--weeks", default=40, show_default=True)
@click.option("--teachers", default=50, show_default=True)
@click.option("--regen-rate", default="0", show_default=True,
              help="Fraction of images re-generated for label failures.")
@click.option("--retry-model", default="single-retry", show_default=True,
              type=click.Choice(["single-retry", "geometric"]))
@_exit_on_error
def cost_cmd(per_image, deck_size, decks_per_week, weeks, teachers, regen_rate, retry_model):
    """Deployment-scale cost breakdown for one pricing scenario."""
    from cage.metrics.cost import CostScenario, effective_cost

    scenario = CostScenario(per_image=Decimal(per_image), diagrams_per_deck=deck_size,
                            decks_per_week=decks_per_week, weeks_per_year=weeks,
                            teachers=teachers, regen_rate=Decimal(regen_rate),
                            retry_model=retry_model)
    click.echo(json.dumps(effective_cost(scenario).to_dict(), indent=2, sort_keys=True))


@main.group()
def pairs():
    """Programmatic/stylized pair utilities."""


@pairs.command("verify")
@click.option("--prog", "prog_path", required=True, type=click.Path(exists=True),
              help="Programmatic render PNG.")
@click.option("--regions", "regions_path", required=True, type=click.Path(exists=True),
              help="regions.json for the programmatic render.")
@click.option("--styled", "styled_path", required=True, type=click.Path(exists=True),
              help="Stylized candidate PNG.")
@click.option("--iou-threshold", default=0.5, show_default=True)
@click.pass_context
@_exit_on_error
def pairs_verify(ctx, prog_path, regions_path, styled_path, iou_threshold):
    """Run the automated pair criteria and print the verification JSON."""
    from cage.harness.config import build_backends
    from cage.imaging.raster import RasterImage, TextRegion
    from cage.metrics.pairs import verify_pair
    from cage.review.store import _ProgShim

    cfg = _load_cfg(ctx)
    backends = build_backends(cfg)
    if backends.ocr is None:
        raise ConfigError("backends.ocr is required for pair verification")
    prog = RasterImage.from_png(prog_path)
    regions = tuple(TextRegion.from_dict(r)
                    for r in json.loads(Path(regions_path).read_text(encoding="utf-8")))
    styled = RasterImage.from_png(styled_path)
    result = verify_pair(_ProgShim(prog, regions), styled, backends.ocr,
                         iou_threshold=iou_threshold)
    click.echo(json.dumps(result.to_dict(), indent=2, sort_keys=True))
    if not (result.labels_preserved and result.topology_ok):
        sys.exit(1)


@main.command("report")
@click.option("--layout", type=click.Choice(["accuracy-table", "cost-table"]),
              required=True)
@click.option("--input", "inputs", multiple=True, type=click.Path(exists=True),
              help="MetricReport JSON files (accuracy layout).")
@click.option("--output", "-o", "output_path", type=click.Path(), default=None)
@_exit_on_error
def report_cmd(layout, inputs, output_path):
    """Render a Markdown table from stored reports or the cost scenarios."""
    from cage.harness.report import MetricReport, render_report

    reports = [MetricReport.load(p) for p in inputs]
    text = render_report(reports, layout)
    if output_path:
        Path(output_path).write_text(text, encoding="utf-8")
        click.echo(f"wrote {output_path}")
    else:
        click.echo(text, nl=False)


@main.group()
def review():
    """Human review service."""


@review.command("serve")
@click.option("--port", default=None, type=int, help="Override config port.")
@click.option("--store", "store_dir", default=None, type=click.Path(),
              help="Override config review store directory.")
@click.pass_context
@_exit_on_error
def review_serve(ctx, port, store_dir):
    """Serve the review API over HTTP."""
    import uvicorn

    from cage.review.service import create_app
    from cage.review.store import ReviewStore

    cfg = _load_cfg(ctx)
    review_cfg = cfg.review
    directory = store_dir or review_cfg.get("store_dir", "review-store")
    lease = float(review_cfg.get("lease_seconds", 600))
    app = create_app(ReviewStore(directory, lease_seconds=lease))
    uvicorn.run(app, host=review_cfg.get("host", "127.0.0.1"),
                port=port or int(review_cfg.get("port", 8008)))


if __name__ == "__main__":
    main()
