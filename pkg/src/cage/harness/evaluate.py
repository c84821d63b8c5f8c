"""Metric evaluation over a persisted run directory.

Label metrics run OCR on each refined image and pool hits/misses across
the whole run, so the run-level rate weights every label equally rather
than every image. The distributional metric compares the refined set to
the reference set in embedder feature space and is skipped with a warning
when either side has fewer than two images.
"""

from __future__ import annotations

import json
import logging
from pathlib import Path

from cage.benchmark import ReferenceSet
from cage.errors import CageError
from cage.harness.report import MetricReport, ParadigmRow
from cage.harness.run import RunRecord
from cage.imaging.canny import DEFAULT_HIGH, DEFAULT_LOW, DEFAULT_SIGMA, canny, edge_agreement
from cage.imaging.raster import EdgeMap, RasterImage
from cage.metrics.fid import EmbedderBackend, embed_images, fid
from cage.metrics.ocr import OcrBackend
from cage.metrics.text import cer_counts, lem_counts

log = logging.getLogger(__name__)

RUN_METRICS_NAME = "metrics.json"


def _canny_params(config: dict) -> tuple[float, float, float]:
    canny_cfg = config.get("canny", {})
    return (float(canny_cfg.get("sigma", DEFAULT_SIGMA)),
            float(canny_cfg.get("low", DEFAULT_LOW)),
            float(canny_cfg.get("high", DEFAULT_HIGH)))


def evaluate_run(run: RunRecord, reference: ReferenceSet | None,
                 ocr: OcrBackend, embedder: EmbedderBackend | None,
                 paradigm: str = "two-stage") -> MetricReport:
    """Score every successful prompt and aggregate into one report."""
    ok = run.ok_outcomes()
    if not ok:
        raise CageError(f"run {run.run_id} has no successful prompts to evaluate")
    sigma, low, high = _canny_params(run.config)

    lem_found = lem_total = 0
    cer_distance = cer_length = 0
    agreements: list[float] = []
    refined_images: list[RasterImage] = []
    by_subject: dict[str, dict] = {}

    for outcome in ok:
        pdir = run.prompt_dir(outcome.prompt_id)
        prompt = run.load_prompt(outcome.prompt_id)
        refined = RasterImage.from_png(pdir / "refined.png")
        refined_images.append(refined)

        recognized = ocr.recognize(refined)
        hits, total = lem_counts(prompt.labels, recognized)
        distance, length = cer_counts(prompt.labels, recognized)
        lem_found += hits
        lem_total += total
        cer_distance += distance
        cer_length += length

        prog_edges = EdgeMap.from_png(pdir / "edges.png")
        refined_edges = canny(refined, sigma=sigma, low=low, high=high)
        agreement = edge_agreement(prog_edges, refined_edges)
        agreements.append(agreement)

        subject = by_subject.setdefault(outcome.subject, {
            "images": 0, "lem_found": 0, "lem_total": 0,
            "cer_distance": 0, "cer_length": 0,
        })
        subject["images"] += 1
        subject["lem_found"] += hits
        subject["lem_total"] += total
        subject["cer_distance"] += distance
        subject["cer_length"] += length

        per_prompt = {
            "prompt_id": outcome.prompt_id,
            "lem": 100.0 * hits / total,
            "cer": 100.0 * distance / length,
            "lem_found": hits,
            "lem_total": total,
            "cer_distance": distance,
            "cer_length": length,
            "edge_agreement": agreement,
        }
        (pdir / "metrics.json").write_text(
            json.dumps(per_prompt, indent=2, sort_keys=True) + "\n", encoding="utf-8")

    fid_value = _fid_or_none(refined_images, reference, embedder)

    subjects = {
        name: {
            "images": s["images"],
            "lem": 100.0 * s["lem_found"] / s["lem_total"],
            "cer": 100.0 * s["cer_distance"] / s["cer_length"],
        }
        for name, s in sorted(by_subject.items())
    }
    row = ParadigmRow(
        paradigm=paradigm,
        model=run.backend_names.get("llm", "unknown"),
        lem=100.0 * lem_found / lem_total,
        cer=100.0 * cer_distance / cer_length,
        fid=fid_value,
        hva=None,
        dollars_per_image=0.0,
    )
    report = MetricReport(
        rows=(row,),
        subjects=subjects,
        provenance={
            "run_id": run.run_id,
            "images": len(refined_images),
            "ocr": ocr.name,
            "embedder": embedder.name if embedder is not None else None,
            "reference_images": reference.size if reference is not None else 0,
        },
        edge_agreement=sum(agreements) / len(agreements),
    )
    report.save(run.root / RUN_METRICS_NAME)
    return report


def _fid_or_none(refined: list[RasterImage], reference: ReferenceSet | None,
                 embedder: EmbedderBackend | None) -> float | None:
    if embedder is None:
        log.warning("no embedder configured; skipping distribution distance")
        return None
    if reference is None:
        log.warning("no reference set; skipping distribution distance")
        return None
    if len(refined) < 2 or reference.size < 2:
        log.warning("need >= 2 images on both sides for the distribution "
                    "distance, got %d vs %d; skipping", len(refined), reference.size)
        return None
    run_features = embed_images(refined, embedder)
    ref_features = embed_images(reference.load_images(), embedder)
    return fid(run_features, ref_features)
