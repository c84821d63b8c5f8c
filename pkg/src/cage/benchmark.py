"""Benchmark manifests of diagram prompts and the visual reference image set.

A manifest is UTF-8 JSON Lines, one prompt per line with fields ``id``,
``subject``, ``grade_band``, ``topic``, ``labels``, ``prompt_text``.
Loading is read-only and the resulting objects are immutable, so they are
safe to share across pipeline workers.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

from cage.errors import ManifestError, ReferenceSetError
from cage.imaging.raster import RasterImage
from cage.metrics.text import normalize_text

SUBJECTS = ("biology", "chemistry", "physics", "mathematics")
GRADE_BANDS = ("K-5", "6-8", "9-12")

REFERENCE_INDEX_NAME = "reference_index.json"
_IMAGE_SUFFIXES = (".png",)


@dataclass(frozen=True)
class DiagramPrompt:
    """One benchmark item: topic, required labels, subject, grade band."""

    id: str
    subject: str
    grade_band: str
    topic: str
    labels: tuple[str, ...]
    prompt_text: str

    def __post_init__(self):
        if not self.id or not self.id.strip():
            raise ValueError("prompt id must be non-empty")
        if self.subject not in SUBJECTS:
            raise ValueError(f"unknown subject {self.subject!r}, expected one of {SUBJECTS}")
        if self.grade_band not in GRADE_BANDS:
            raise ValueError(f"unknown grade band {self.grade_band!r}, expected one of {GRADE_BANDS}")
        if not self.topic or not self.topic.strip():
            raise ValueError(f"prompt {self.id}: topic must be non-empty")
        labels = tuple(self.labels)
        if not labels:
            raise ValueError(f"prompt {self.id}: labels must be non-empty")
        for lab in labels:
            if not lab or not lab.strip():
                raise ValueError(f"prompt {self.id}: blank label")
        object.__setattr__(self, "labels", labels)

    def duplicate_labels(self) -> list[str]:
        """Labels that collide after case-folding and whitespace normalization."""
        seen: set[str] = set()
        dupes: list[str] = []
        for lab in self.labels:
            key = normalize_text(lab)
            if key in seen:
                dupes.append(lab)
            seen.add(key)
        return dupes

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "subject": self.subject,
            "grade_band": self.grade_band,
            "topic": self.topic,
            "labels": list(self.labels),
            "prompt_text": self.prompt_text,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "DiagramPrompt":
        missing = [k for k in ("id", "subject", "grade_band", "topic", "labels", "prompt_text")
                   if k not in d]
        if missing:
            raise ValueError(f"missing fields: {missing}")
        return cls(id=d["id"], subject=d["subject"], grade_band=d["grade_band"],
                   topic=d["topic"], labels=tuple(d["labels"]), prompt_text=d["prompt_text"])


def load_manifest(path: str | Path) -> list[DiagramPrompt]:
    """Parse a JSONL manifest; malformed lines and duplicate ids raise."""
    path = Path(path)
    if not path.is_file():
        raise ManifestError(f"manifest file not found: {path}")
    prompts: list[DiagramPrompt] = []
    seen_ids: dict[str, int] = {}
    duplicates: list[str] = []
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ManifestError(f"line {lineno}: invalid JSON: {exc}", line=lineno) from exc
        try:
            prompt = DiagramPrompt.from_dict(record)
        except (ValueError, TypeError) as exc:
            raise ManifestError(f"line {lineno}: {exc}", line=lineno) from exc
        if prompt.duplicate_labels():
            raise ManifestError(
                f"line {lineno}: prompt {prompt.id} has duplicate labels after "
                f"normalization: {prompt.duplicate_labels()}", line=lineno)
        if prompt.id in seen_ids:
            duplicates.append(prompt.id)
        seen_ids.setdefault(prompt.id, lineno)
        prompts.append(prompt)
    if duplicates:
        raise ManifestError(f"duplicate prompt ids: {sorted(set(duplicates))}",
                            duplicate_ids=sorted(set(duplicates)))
    return prompts


def dump_manifest(prompts: list[DiagramPrompt], path: str | Path) -> Path:
    """Write prompts back out as JSONL; inverse of load_manifest."""
    path = Path(path)
    with open(path, "w", encoding="utf-8") as fh:
        for p in prompts:
            fh.write(json.dumps(p.to_dict(), ensure_ascii=False) + "\n")
    return path


@dataclass(frozen=True)
class ManifestValidation:
    """Aggregate validation outcome; passes iff every error list is empty."""

    counts: dict
    duplicate_ids: tuple[str, ...] = ()
    label_problems: tuple[str, ...] = ()
    strata_mismatches: tuple[str, ...] = ()
    empty: bool = False

    @property
    def passed(self) -> bool:
        return (not self.empty and not self.duplicate_ids
                and not self.label_problems and not self.strata_mismatches)

    def to_dict(self) -> dict:
        return {
            "counts": dict(self.counts),
            "duplicate_ids": list(self.duplicate_ids),
            "label_problems": list(self.label_problems),
            "strata_mismatches": list(self.strata_mismatches),
            "empty": self.empty,
            "passed": self.passed,
        }


def validate_manifest(prompts: list[DiagramPrompt],
                      expected_strata: dict[str, int] | None = None) -> ManifestValidation:
    """Per-subject counts, duplicate ids, label duplicates, strata mismatches."""
    counts: dict[str, int] = {}
    seen: dict[str, int] = {}
    duplicate_ids: list[str] = []
    label_problems: list[str] = []
    for p in prompts:
        counts[p.subject] = counts.get(p.subject, 0) + 1
        seen[p.id] = seen.get(p.id, 0) + 1
        dupes = p.duplicate_labels()
        if dupes:
            label_problems.append(f"{p.id}: duplicate labels after normalization: {dupes}")
    duplicate_ids = sorted(pid for pid, n in seen.items() if n > 1)
    mismatches: list[str] = []
    if expected_strata:
        for subject, expected in sorted(expected_strata.items()):
            actual = counts.get(subject, 0)
            if actual != expected:
                mismatches.append(f"{subject}: expected {expected}, got {actual}")
    return ManifestValidation(counts=counts,
                              duplicate_ids=tuple(duplicate_ids),
                              label_problems=tuple(label_problems),
                              strata_mismatches=tuple(mismatches),
                              empty=not prompts)


@dataclass(frozen=True)
class ReferenceEntry:
    id: str
    path: Path
    sha256: str


@dataclass(frozen=True)
class ReferenceSet:
    """Indexed directory of reference images used for the distributional metric."""

    root: Path
    entries: tuple[ReferenceEntry, ...]

    @property
    def size(self) -> int:
        return len(self.entries)

    def load_images(self) -> list[RasterImage]:
        return [RasterImage.from_png(e.path) for e in self.entries]


def load_reference_set(directory: str | Path) -> ReferenceSet:
    """Index every decodable PNG under a directory; checksums persisted on first load."""
    root = Path(directory)
    if not root.is_dir():
        raise ReferenceSetError(f"reference directory not found: {root}")
    files = sorted(p for p in root.iterdir()
                   if p.suffix.lower() in _IMAGE_SUFFIXES and p.is_file())
    if not files:
        raise ReferenceSetError(f"zero images in reference directory {root}")
    entries: list[ReferenceEntry] = []
    for f in files:
        data = f.read_bytes()
        try:
            RasterImage.from_png_bytes(data)
        except Exception as exc:
            raise ReferenceSetError(f"corrupt reference image {f}: {exc}") from exc
        entries.append(ReferenceEntry(id=f.stem, path=f,
                                      sha256=hashlib.sha256(data).hexdigest()))
    index_path = root / REFERENCE_INDEX_NAME
    if not index_path.exists():
        index = {e.id: {"file": e.path.name, "sha256": e.sha256} for e in entries}
        index_path.write_text(json.dumps(index, indent=2, sort_keys=True), encoding="utf-8")
    return ReferenceSet(root=root, entries=tuple(entries))
