"""Review queue persistence: candidates, decisions, accepted pairs, regen jobs.

Everything durable is an append-only JSONL log under the store directory;
queue state (pending/accepted/rejected, latest decision per pair) is
derived by replaying the logs, so a restarted service reconstructs exactly
the same state. Leases are in-memory only: a crash simply returns leased
items to the queue.

Decision rules enforced here rather than in the HTTP layer:

* reject requires at least one failed criterion; accept forbids them
* accept is refused while the automated label check fails
* adjusted style strength is only meaningful on reject, and a reject
  enqueues a re-generation job at attempt + 1
* criterion (3), visual quality, is never decided by the machine
"""

from __future__ import annotations

import json
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path

from cage.errors import LeaseError, StoreError
from cage.harness.run import RunRecord
from cage.imaging.raster import RasterImage, TextRegion
from cage.metrics.ocr import OcrBackend
from cage.metrics.pairs import PairVerification, verify_pair
from cage.refine import DiffusionBackend, RefinementRequest, StyleSpec, style_prompt_for
from cage.imaging.canny import canny
from cage.imaging.compose import build_text_mask, composite_regions

DEFAULT_LEASE_SECONDS = 600.0

VERDICTS = ("accept", "reject")
CRITERIA = ("labels", "topology", "visual")

CANDIDATES_LOG = "candidates.jsonl"
DECISIONS_LOG = "decisions.jsonl"
PAIRS_LOG = "pairs.jsonl"
REGEN_LOG = "regen.jsonl"
IMAGES_DIR = "images"


@dataclass(frozen=True)
class CandidateItem:
    """One stylization candidate awaiting review."""

    pair_id: str
    prompt_id: str
    prog_path: str
    candidate_path: str
    verification: PairVerification
    style: StyleSpec
    attempt: int
    seq: int
    regions: tuple[TextRegion, ...] = ()

    def to_dict(self) -> dict:
        return {
            "pair_id": self.pair_id,
            "prompt_id": self.prompt_id,
            "prog_path": self.prog_path,
            "candidate_path": self.candidate_path,
            "verification": self.verification.to_dict(),
            "style": {"prompt": self.style.prompt, "strength": self.style.strength,
                      "seed": self.style.seed},
            "attempt": self.attempt,
            "seq": self.seq,
            "regions": [r.to_dict() for r in self.regions],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "CandidateItem":
        style = d["style"]
        return cls(pair_id=d["pair_id"], prompt_id=d["prompt_id"],
                   prog_path=d["prog_path"], candidate_path=d["candidate_path"],
                   verification=PairVerification.from_dict(d["verification"]),
                   style=StyleSpec(prompt=style["prompt"], strength=style["strength"],
                                   seed=style["seed"]),
                   attempt=d["attempt"], seq=d["seq"],
                   regions=tuple(TextRegion.from_dict(r)
                                 for r in d.get("regions", [])))


@dataclass(frozen=True)
class ReviewDecision:
    """A reviewer's verdict on one candidate."""

    pair_id: str
    verdict: str
    failed_criteria: tuple[str, ...] = ()
    adjusted_strength: float | None = None
    reviewer: str = "anonymous"
    timestamp: float = field(default_factory=time.time)

    def __post_init__(self):
        if self.verdict not in VERDICTS:
            raise ValueError(f"verdict must be one of {VERDICTS}, got {self.verdict!r}")
        criteria = tuple(self.failed_criteria)
        unknown = [c for c in criteria if c not in CRITERIA]
        if unknown:
            raise ValueError(f"unknown criteria {unknown}, expected subset of {CRITERIA}")
        if self.verdict == "reject" and not criteria:
            raise ValueError("reject requires at least one failed criterion")
        if self.verdict == "accept" and criteria:
            raise ValueError("accept cannot carry failed criteria")
        if self.adjusted_strength is not None:
            if self.verdict != "reject":
                raise ValueError("adjusted strength is only valid on reject")
            if not 0 < self.adjusted_strength <= 1:
                raise ValueError(f"adjusted strength must be in (0, 1], "
                                 f"got {self.adjusted_strength}")
        object.__setattr__(self, "failed_criteria", criteria)

    def to_dict(self) -> dict:
        return {"pair_id": self.pair_id, "verdict": self.verdict,
                "failed_criteria": list(self.failed_criteria),
                "adjusted_strength": self.adjusted_strength,
                "reviewer": self.reviewer, "timestamp": self.timestamp}

    @classmethod
    def from_dict(cls, d: dict) -> "ReviewDecision":
        return cls(pair_id=d["pair_id"], verdict=d["verdict"],
                   failed_criteria=tuple(d.get("failed_criteria", ())),
                   adjusted_strength=d.get("adjusted_strength"),
                   reviewer=d.get("reviewer", "anonymous"),
                   timestamp=d.get("timestamp", 0.0))


@dataclass(frozen=True)
class RegenJob:
    """Re-generation request produced by a rejection."""

    pair_id: str
    prompt_id: str
    strength: float
    attempt: int

    def to_dict(self) -> dict:
        return {"pair_id": self.pair_id, "prompt_id": self.prompt_id,
                "strength": self.strength, "attempt": self.attempt}

    @classmethod
    def from_dict(cls, d: dict) -> "RegenJob":
        return cls(pair_id=d["pair_id"], prompt_id=d["prompt_id"],
                   strength=d["strength"], attempt=d["attempt"])


class _ProgShim:
    """Duck-typed stand-in for RenderOutput when replaying persisted runs."""

    def __init__(self, image: RasterImage, regions: tuple[TextRegion, ...]):
        self.image = image
        self.regions = regions


class ReviewStore:
    """Single-writer review queue over append-only logs."""

    def __init__(self, directory: str | Path,
                 lease_seconds: float = DEFAULT_LEASE_SECONDS):
        self.root = Path(directory)
        self.root.mkdir(parents=True, exist_ok=True)
        (self.root / IMAGES_DIR).mkdir(exist_ok=True)
        self.lease_seconds = lease_seconds
        self._lock = threading.RLock()
        self._candidates: dict[str, CandidateItem] = {}
        self._latest_decision: dict[str, ReviewDecision] = {}
        self._leases: dict[str, tuple[str, float]] = {}
        self._seq = 0
        self._replay()

    # -- log plumbing -----------------------------------------------------

    def _append(self, log_name: str, record: dict) -> None:
        with open(self.root / log_name, "a", encoding="utf-8") as fh:
            fh.write(json.dumps(record, sort_keys=True) + "\n")

    def _read_log(self, log_name: str) -> list[dict]:
        path = self.root / log_name
        if not path.exists():
            return []
        return [json.loads(line) for line in path.read_text(encoding="utf-8").splitlines()
                if line.strip()]

    def _replay(self) -> None:
        for record in self._read_log(CANDIDATES_LOG):
            item = CandidateItem.from_dict(record)
            self._candidates[item.pair_id] = item
            self._seq = max(self._seq, item.seq)
        for record in self._read_log(DECISIONS_LOG):
            decision = ReviewDecision.from_dict(record)
            self._latest_decision[decision.pair_id] = decision

    # -- candidate intake -------------------------------------------------

    def add_candidate(self, prompt_id: str, prog_path: str | Path,
                      candidate_path: str | Path, verification: PairVerification,
                      style: StyleSpec, attempt: int = 1,
                      regions: tuple[TextRegion, ...] = ()) -> CandidateItem:
        """Register one reviewable candidate directly."""
        with self._lock:
            self._seq += 1
            item = CandidateItem(
                pair_id=f"{prompt_id}-a{attempt}-s{style.strength:g}-{self._seq}",
                prompt_id=prompt_id, prog_path=str(prog_path),
                candidate_path=str(candidate_path), verification=verification,
                style=style, attempt=attempt, seq=self._seq, regions=regions)
            self._candidates[item.pair_id] = item
            self._append(CANDIDATES_LOG, item.to_dict())
            return item

    def enqueue_candidates(self, run: RunRecord, strengths: list[float],
                           diffusion: DiffusionBackend, ocr: OcrBackend) -> int:
        """One candidate per (successful prompt, strength), verification attached.

        Candidates are produced by re-running the stylization stage of the
        persisted run at each strength, so automated checks always reflect
        real pixels.
        """
        if not strengths:
            raise StoreError("strengths list is empty")
        ok = run.ok_outcomes()
        if not ok:
            raise StoreError(f"run {run.run_id} has no successful prompts")
        canny_cfg = run.config.get("canny", {})
        padding = int(run.config.get("mask_padding", 4))
        seed = int(run.config.get("seed", 0))
        mode = run.config.get("composite_mode", "pixel-copy")
        count = 0
        for outcome in ok:
            pdir = run.prompt_dir(outcome.prompt_id)
            prompt = run.load_prompt(outcome.prompt_id)
            prog = RasterImage.from_png(pdir / "prog.png")
            regions = tuple(TextRegion.from_dict(r) for r in json.loads(
                (pdir / "regions.json").read_text(encoding="utf-8")))
            shim = _ProgShim(prog, regions)
            edge_map = canny(prog, **{k: float(canny_cfg[k]) for k in ("sigma", "low", "high")
                                      if k in canny_cfg})
            mask = build_text_mask(regions, prog.width, prog.height, padding=padding)
            for strength in strengths:
                style = StyleSpec(
                    prompt=style_prompt_for(prompt.grade_band, prompt.subject,
                                            run.config.get("style_prompt")),
                    strength=strength, seed=seed)
                request = RefinementRequest(edge_map=edge_map, preservation_mask=mask,
                                            style=style, width=prog.width,
                                            height=prog.height, source_image=prog)
                styled = composite_regions(diffusion.refine(request), prog, mask,
                                           mode=mode)
                verification = verify_pair(shim, styled, ocr)
                candidate_path = self.root / IMAGES_DIR / (
                    f"{outcome.prompt_id}-s{strength:g}.png")
                styled.to_png(candidate_path)
                self.add_candidate(prompt_id=outcome.prompt_id,
                                   prog_path=pdir / "prog.png",
                                   candidate_path=candidate_path,
                                   verification=verification, style=style,
                                   attempt=1, regions=regions)
                count += 1
        return count

    # -- queue operations ---------------------------------------------------

    def _status(self, pair_id: str) -> str:
        decision = self._latest_decision.get(pair_id)
        if decision is None:
            return "pending"
        return "accepted" if decision.verdict == "accept" else "rejected"

    def next_candidate(self, reviewer: str) -> CandidateItem | None:
        """Oldest pending item without an active lease; leases it."""
        now = time.monotonic()
        with self._lock:
            pending = sorted((i for i in self._candidates.values()
                              if self._status(i.pair_id) == "pending"),
                             key=lambda i: i.seq)
            for item in pending:
                lease = self._leases.get(item.pair_id)
                if lease is not None and lease[1] > now and lease[0] != reviewer:
                    continue
                self._leases[item.pair_id] = (reviewer, now + self.lease_seconds)
                return item
            return None

    def submit_decision(self, decision: ReviewDecision) -> dict:
        """Validate, log, and apply one decision; returns the new stats."""
        with self._lock:
            item = self._candidates.get(decision.pair_id)
            if item is None:
                raise StoreError(f"unknown pair id {decision.pair_id!r}")
            if self._status(decision.pair_id) != "pending":
                raise StoreError(f"pair {decision.pair_id} is already decided")
            lease = self._leases.get(decision.pair_id)
            now = time.monotonic()
            if lease is None or lease[1] <= now:
                raise LeaseError(f"pair {decision.pair_id} is not leased; "
                                 "fetch it via next_candidate first")
            if lease[0] != decision.reviewer:
                raise LeaseError(f"pair {decision.pair_id} is leased by {lease[0]!r}, "
                                 f"not {decision.reviewer!r}")
            if decision.verdict == "accept" and not item.verification.labels_preserved:
                raise StoreError(
                    f"refusing accept for {decision.pair_id}: automated label "
                    "check failed and label preservation is machine-enforced")

            self._append(DECISIONS_LOG, decision.to_dict())
            self._latest_decision[decision.pair_id] = decision
            self._leases.pop(decision.pair_id, None)

            if decision.verdict == "accept":
                self._append(PAIRS_LOG, {
                    "pair_id": item.pair_id,
                    "prompt_id": item.prompt_id,
                    "prog_path": item.prog_path,
                    "candidate_path": item.candidate_path,
                    "verification": item.verification.to_dict(),
                    "reviewer": decision.reviewer,
                })
            else:
                job = RegenJob(pair_id=item.pair_id, prompt_id=item.prompt_id,
                               strength=decision.adjusted_strength
                               if decision.adjusted_strength is not None
                               else item.style.strength,
                               attempt=item.attempt + 1)
                self._append(REGEN_LOG, job.to_dict())
            return self.queue_stats()

    def queue_stats(self) -> dict:
        """Queue counters plus the first-attempt pass rate (None when undecided)."""
        with self._lock:
            pending = accepted = rejected = 0
            first_decided = first_accepted = 0
            for item in self._candidates.values():
                status = self._status(item.pair_id)
                if status == "pending":
                    pending += 1
                    continue
                if status == "accepted":
                    accepted += 1
                else:
                    rejected += 1
                if item.attempt == 1:
                    first_decided += 1
                    if status == "accepted":
                        first_accepted += 1
            return {
                "pending": pending,
                "accepted": accepted,
                "rejected": rejected,
                "first_attempt_pass_rate": (first_accepted / first_decided
                                            if first_decided else None),
                "regen_pending": len(self.regen_jobs()),
            }

    def regen_jobs(self) -> list[RegenJob]:
        return [RegenJob.from_dict(d) for d in self._read_log(REGEN_LOG)]

    def accepted_pairs(self) -> list[dict]:
        return self._read_log(PAIRS_LOG)

    def get_candidate(self, pair_id: str) -> CandidateItem:
        with self._lock:
            item = self._candidates.get(pair_id)
            if item is None:
                raise StoreError(f"unknown pair id {pair_id!r}")
            return item
