"""Automated verification of a programmatic/stylized diagram pair.

Two machine-checkable criteria: every rendered label must be readable in
the stylized image (OCR comparison), and each label's OCR box must overlap
its source box above an IoU threshold (topology). The third criterion,
visual quality, is reserved for a human and always starts pending.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from cage.imaging.raster import RasterImage
from cage.metrics.ocr import OcrBackend, OcrResult
from cage.metrics.text import lem, normalize_text

DEFAULT_IOU_THRESHOLD = 0.5

VISUAL_STATES = ("pass", "fail", "pending-human")


def bbox_iou(a: tuple[float, float, float, float],
             b: tuple[float, float, float, float]) -> float:
    """Intersection-over-union of two (x, y, w, h) boxes with positive area."""
    ax, ay, aw, ah = a
    bx, by, bw, bh = b
    if aw <= 0 or ah <= 0 or bw <= 0 or bh <= 0:
        raise ValueError("boxes must have positive area")
    ix = max(0.0, min(ax + aw, bx + bw) - max(ax, bx))
    iy = max(0.0, min(ay + ah, by + bh) - max(ay, by))
    inter = ix * iy
    union = aw * ah + bw * bh - inter
    return inter / union


@dataclass(frozen=True)
class PairVerification:
    """Outcome of the three pair-acceptance criteria."""

    labels_preserved: bool
    missing_labels: tuple[str, ...] = ()
    topology_ok: bool = True
    min_iou: float | None = None
    visual: str = "pending-human"

    def __post_init__(self):
        if self.visual not in VISUAL_STATES:
            raise ValueError(f"visual must be one of {VISUAL_STATES}")
        object.__setattr__(self, "missing_labels", tuple(self.missing_labels))

    @property
    def overall(self) -> str:
        """accepted / rejected / pending; accepted requires all three criteria."""
        if self.labels_preserved and self.topology_ok and self.visual == "pass":
            return "accepted"
        if self.visual == "pending-human":
            return "pending"
        return "rejected"

    def to_dict(self) -> dict:
        return {
            "labels_preserved": self.labels_preserved,
            "missing_labels": list(self.missing_labels),
            "topology_ok": self.topology_ok,
            "min_iou": self.min_iou,
            "visual": self.visual,
            "overall": self.overall,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "PairVerification":
        return cls(labels_preserved=d["labels_preserved"],
                   missing_labels=tuple(d.get("missing_labels", ())),
                   topology_ok=d["topology_ok"],
                   min_iou=d.get("min_iou"),
                   visual=d.get("visual", "pending-human"))


def verify_pair(prog, styled: RasterImage, ocr: OcrBackend,
                iou_threshold: float = DEFAULT_IOU_THRESHOLD) -> PairVerification:
    """Run the two automated criteria for (programmatic, stylized) images.

    ``prog`` is the programmatic RenderOutput whose ``regions`` carry the
    authoritative label texts and boxes. Labels pass only at LEM = 1.0;
    topology requires each source region to have a same-text OCR match at
    IoU >= threshold. Visual quality is left pending for a human.
    """
    regions = list(prog.regions)
    recognized: OcrResult = ocr.recognize(styled)
    if not regions:
        return PairVerification(labels_preserved=True, topology_ok=True)

    labels = [r.text for r in regions]
    text = normalize_text(recognized.concatenated_text)
    missing = tuple(lab for lab in labels if normalize_text(lab) not in text)
    labels_preserved = lem(labels, recognized) == 1.0

    min_iou: float | None = None
    topology_ok = True
    for region in regions:
        same_text = [t for t in recognized.tokens
                     if normalize_text(t.text) == normalize_text(region.text)]
        best = max((bbox_iou(region.bbox, t.bbox) for t in same_text), default=0.0)
        min_iou = best if min_iou is None else min(min_iou, best)
        if best < iou_threshold:
            topology_ok = False

    return PairVerification(labels_preserved=labels_preserved,
                            missing_labels=missing,
                            topology_ok=topology_ok,
                            min_iou=min_iou)
