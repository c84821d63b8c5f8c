"""Label-fidelity, visual-quality, agreement, pair, and cost metrics."""

from cage.metrics.text import (levenshtein, normalize_text, lem, lem_counts,
                               cer, cer_counts)
from cage.metrics.ocr import OcrResult, OcrBackend
from cage.metrics.fid import FeatureSet, EmbedderBackend, matrix_sqrt_psd, fid
from cage.metrics.agreement import RatingMatrix, krippendorff_alpha, hva_composite
from cage.metrics.pairs import PairVerification, bbox_iou, verify_pair
from cage.metrics.cost import CostScenario, CostBreakdown, effective_cost

__all__ = [
    "levenshtein",
    "normalize_text",
    "lem",
    "lem_counts",
    "cer",
    "cer_counts",
    "OcrResult",
    "OcrBackend",
    "FeatureSet",
    "EmbedderBackend",
    "matrix_sqrt_psd",
    "fid",
    "RatingMatrix",
    "krippendorff_alpha",
    "hva_composite",
    "PairVerification",
    "bbox_iou",
    "verify_pair",
    "CostScenario",
    "CostBreakdown",
    "effective_cost",
]
