"""Structured metric reports and deterministic Markdown table rendering.

The accuracy table carries one row per (paradigm, model); rows sort by a
fixed paradigm order and then model name, so rendering is stable no matter
how reports are concatenated. The cost table turns named cost scenarios
into the canonical deployment-scale breakdown.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from decimal import Decimal
from pathlib import Path

from cage.metrics.cost import CostScenario, effective_cost

REPORT_LAYOUTS = ("accuracy-table", "cost-table")

PARADIGM_ORDER = ("open-source diffusion", "code-based", "closed-source API", "two-stage")

# Canonical deployment scale: 12 diagrams per deck, one deck a week over a
# 40-week school year, 50 teachers per school. Per-image prices are the
# published API rates the cost table is quoted at.
DEFAULT_COST_SCENARIOS = {
    "DALL-E 3": CostScenario(per_image=Decimal("0.040"), diagrams_per_deck=12,
                             decks_per_week=1, weeks_per_year=40, teachers=50),
    "GPT-4o": CostScenario(per_image=Decimal("0.080"), diagrams_per_deck=12,
                           decks_per_week=1, weeks_per_year=40, teachers=50),
    "Gemini": CostScenario(per_image=Decimal("0.040"), diagrams_per_deck=12,
                           decks_per_week=1, weeks_per_year=40, teachers=50),
}
DEFAULT_EFFECTIVE_NOTE = "1.3-1.6x above"


@dataclass(frozen=True)
class ParadigmRow:
    """One accuracy-table row; missing measurements stay None and render as '-'."""

    paradigm: str
    model: str
    lem: float | None = None
    cer: float | None = None
    fid: float | None = None
    hva: float | None = None
    dollars_per_image: float | None = None

    def __post_init__(self):
        for name in ("lem", "cer"):
            value = getattr(self, name)
            if value is not None and not 0 <= value <= 100:
                raise ValueError(f"{name} must lie in [0, 100], got {value}")
        if self.fid is not None and self.fid < 0:
            raise ValueError(f"fid must be >= 0, got {self.fid}")

    def to_dict(self) -> dict:
        return {"paradigm": self.paradigm, "model": self.model, "lem": self.lem,
                "cer": self.cer, "fid": self.fid, "hva": self.hva,
                "dollars_per_image": self.dollars_per_image}

    @classmethod
    def from_dict(cls, d: dict) -> "ParadigmRow":
        return cls(paradigm=d["paradigm"], model=d["model"], lem=d.get("lem"),
                   cer=d.get("cer"), fid=d.get("fid"), hva=d.get("hva"),
                   dollars_per_image=d.get("dollars_per_image"))


@dataclass(frozen=True)
class MetricReport:
    """Evaluation output for a run (or an imported result set)."""

    rows: tuple[ParadigmRow, ...]
    subjects: dict = field(default_factory=dict)
    provenance: dict = field(default_factory=dict)
    edge_agreement: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "rows", tuple(self.rows))

    def to_dict(self) -> dict:
        return {"rows": [r.to_dict() for r in self.rows],
                "subjects": dict(self.subjects),
                "provenance": dict(self.provenance),
                "edge_agreement": self.edge_agreement}

    @classmethod
    def from_dict(cls, d: dict) -> "MetricReport":
        return cls(rows=tuple(ParadigmRow.from_dict(r) for r in d.get("rows", ())),
                   subjects=dict(d.get("subjects", {})),
                   provenance=dict(d.get("provenance", {})),
                   edge_agreement=d.get("edge_agreement"))

    def save(self, path: str | Path) -> Path:
        path = Path(path)
        path.write_text(json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n",
                        encoding="utf-8")
        return path

    @classmethod
    def load(cls, path: str | Path) -> "MetricReport":
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def _fmt1(value: float | None) -> str:
    return "-" if value is None else f"{value:.1f}"


def _fmtg(value: float | None) -> str:
    return "-" if value is None else f"{value:g}"


def _row_key(row: ParadigmRow) -> tuple:
    try:
        rank = PARADIGM_ORDER.index(row.paradigm)
    except ValueError:
        rank = len(PARADIGM_ORDER)
    return (rank, row.paradigm, row.model)


def render_accuracy_table(reports: list[MetricReport]) -> str:
    """Markdown accuracy table; row order independent of input order."""
    lines = [
        "| Paradigm | Model | LEM↑ | CER↓ | FID↓ | HVA↑ | $/img |",
        "| --- | --- | ---: | ---: | ---: | ---: | ---: |",
    ]
    rows = sorted((row for report in reports for row in report.rows), key=_row_key)
    for r in rows:
        lines.append(f"| {r.paradigm} | {r.model} | {_fmt1(r.lem)} | {_fmt1(r.cer)} "
                     f"| {_fmt1(r.fid)} | {_fmt1(r.hva)} | {_fmtg(r.dollars_per_image)} |")
    return "\n".join(lines) + "\n"


def _money(value: Decimal, places: str) -> str:
    return str(value.quantize(Decimal(places)))


def render_cost_table(scenarios: dict[str, CostScenario] | None = None,
                      effective_note: str | None = DEFAULT_EFFECTIVE_NOTE) -> str:
    """Markdown cost table over named scenarios, columns sorted by name."""
    if scenarios is None:
        scenarios = DEFAULT_COST_SCENARIOS
    names = sorted(scenarios)
    breakdowns = [effective_cost(scenarios[n]) for n in names]
    header = "| Scenario | " + " | ".join(names) + " |"
    rule = "| --- |" + " ---: |" * len(names)
    lines = [header, rule]
    lines.append("| Per image ($) | "
                 + " | ".join(_money(b.per_image_eff, "0.001") for b in breakdowns) + " |")
    lines.append("| Per deck ($) | "
                 + " | ".join(_money(b.per_deck, "0.01") for b in breakdowns) + " |")
    lines.append("| Teacher/yr ($) | "
                 + " | ".join(_money(b.per_teacher_year, "0.01") for b in breakdowns) + " |")
    lines.append("| School/yr ($) | "
                 + " | ".join(f"{int(b.per_school_year.quantize(Decimal(1))):,}"
                              for b in breakdowns) + " |")
    if effective_note:
        lines.append("| Eff. cost ($) | " + " | ".join([effective_note] * len(names)) + " |")
    return "\n".join(lines) + "\n"


def render_report(reports: list[MetricReport], layout: str,
                  scenarios: dict[str, CostScenario] | None = None,
                  effective_note: str | None = DEFAULT_EFFECTIVE_NOTE) -> str:
    """Render one of the two table layouts as Markdown text."""
    if layout == "accuracy-table":
        return render_accuracy_table(reports)
    if layout == "cost-table":
        return render_cost_table(scenarios, effective_note)
    raise ValueError(f"layout must be one of {REPORT_LAYOUTS}, got {layout!r}")
