"""Deployment cost model with regeneration markup.

All currency arithmetic runs on ``Decimal`` so the canonical scenario
table reproduces to the exact printed cents. The regeneration multiplier
covers two retry models: a single retry of failed images (1 + r) and
retry-until-success with independent failures (1 / (1 - r)).
"""

from __future__ import annotations

from dataclasses import dataclass
from decimal import Decimal

RETRY_MODELS = ("single-retry", "geometric")


def _as_decimal(value) -> Decimal:
    if isinstance(value, Decimal):
        return value
    return Decimal(str(value))


@dataclass(frozen=True)
class CostScenario:
    """Per-image price plus the usage profile it scales through."""

    per_image: Decimal
    diagrams_per_deck: int
    decks_per_week: int
    weeks_per_year: int
    teachers: int
    regen_rate: Decimal = Decimal(0)
    retry_model: str = "single-retry"

    def __post_init__(self):
        object.__setattr__(self, "per_image", _as_decimal(self.per_image))
        object.__setattr__(self, "regen_rate", _as_decimal(self.regen_rate))
        if not (0 <= self.regen_rate < 1):
            raise ValueError(f"regen_rate must lie in [0, 1), got {self.regen_rate}")
        if self.retry_model not in RETRY_MODELS:
            raise ValueError(f"retry_model must be one of {RETRY_MODELS}")
        for name in ("diagrams_per_deck", "decks_per_week", "weeks_per_year", "teachers"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")


@dataclass(frozen=True)
class CostBreakdown:
    multiplier: Decimal
    per_image_eff: Decimal
    per_deck: Decimal
    per_teacher_year: Decimal
    per_school_year: Decimal

    def to_dict(self) -> dict:
        return {
            "multiplier": str(self.multiplier),
            "per_image_eff": str(self.per_image_eff),
            "per_deck": str(self.per_deck),
            "per_teacher_year": str(self.per_teacher_year),
            "per_school_year": str(self.per_school_year),
        }


def regen_multiplier(rate: Decimal, retry_model: str) -> Decimal:
    """Markup on per-image cost from re-generating failed images."""
    rate = _as_decimal(rate)
    if retry_model == "single-retry":
        return Decimal(1) + rate
    if retry_model == "geometric":
        return Decimal(1) / (Decimal(1) - rate)
    raise ValueError(f"retry_model must be one of {RETRY_MODELS}")


def effective_cost(scenario: CostScenario) -> CostBreakdown:
    """Scale per-image cost through deck, teacher-year, and school-year totals."""
    multiplier = regen_multiplier(scenario.regen_rate, scenario.retry_model)
    per_image_eff = scenario.per_image * multiplier
    per_deck = per_image_eff * scenario.diagrams_per_deck
    per_teacher_year = per_deck * scenario.decks_per_week * scenario.weeks_per_year
    per_school_year = per_teacher_year * scenario.teachers
    return CostBreakdown(multiplier=multiplier,
                         per_image_eff=per_image_eff,
                         per_deck=per_deck,
                         per_teacher_year=per_teacher_year,
                         per_school_year=per_school_year)
