"""Inter-annotator agreement (Krippendorff's alpha) and composite appeal scores.

Alpha uses the coincidence-matrix formulation: within each item, every
ordered pair of ratings contributes 1/(m_u - 1) to the coincidence count
o_ck; observed disagreement D_o weights o_ck by a squared difference
function, expected disagreement D_e weights the marginal products, and
alpha = 1 - D_o/D_e. The ordinal difference (default, conventional for
Likert data) is based on cumulative marginals; interval uses (c - k)^2.

Missing ratings are allowed; items with fewer than two ratings do not
contribute coincidences.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

ALPHA_METRICS = ("ordinal", "interval")
HVA_DIMENSIONS = ("color", "professional", "engagement", "hierarchy")
LIKERT_MIN, LIKERT_MAX = 1, 5


@dataclass(frozen=True)
class RatingMatrix:
    """Items x annotators Likert grid; NaN marks a missing rating.

    ``dimensions`` optionally carries the four per-dimension sub-scores as
    an (items, annotators, 4) array for the composite appeal metric.
    """

    ratings: np.ndarray
    dimensions: np.ndarray | None = None

    def __post_init__(self):
        r = np.asarray(self.ratings, dtype=np.float64)
        if r.ndim != 2:
            raise ValueError(f"expected (items, annotators) grid, got shape {r.shape}")
        if r.shape[1] < 2:
            raise ValueError("need >= 2 annotators")
        present = r[~np.isnan(r)]
        if present.size and (present.min() < LIKERT_MIN or present.max() > LIKERT_MAX):
            raise ValueError(f"ratings must lie in [{LIKERT_MIN}, {LIKERT_MAX}]")
        object.__setattr__(self, "ratings", r)
        if self.dimensions is not None:
            d = np.asarray(self.dimensions, dtype=np.float64)
            if d.shape != (r.shape[0], r.shape[1], len(HVA_DIMENSIONS)):
                raise ValueError(
                    f"dimensions must be (items, annotators, {len(HVA_DIMENSIONS)}), got {d.shape}")
            object.__setattr__(self, "dimensions", d)

    @property
    def n_items(self) -> int:
        return self.ratings.shape[0]

    @property
    def n_annotators(self) -> int:
        return self.ratings.shape[1]

    @classmethod
    def from_csv(cls, path: str | Path) -> "RatingMatrix":
        """Load a long-format grid: item, annotator, rating[, 4 dimension columns]."""
        rows = list(csv.DictReader(open(path, newline="", encoding="utf-8")))
        if not rows:
            raise ValueError(f"ratings file {path} is empty")
        items = sorted({r["item"] for r in rows})
        annotators = sorted({r["annotator"] for r in rows})
        item_ix = {v: i for i, v in enumerate(items)}
        ann_ix = {v: i for i, v in enumerate(annotators)}
        ratings = np.full((len(items), len(annotators)), np.nan)
        has_dims = all(d in rows[0] for d in HVA_DIMENSIONS)
        dims = np.full((len(items), len(annotators), len(HVA_DIMENSIONS)), np.nan) if has_dims else None
        for r in rows:
            i, j = item_ix[r["item"]], ann_ix[r["annotator"]]
            ratings[i, j] = float(r["rating"])
            if has_dims:
                for k, name in enumerate(HVA_DIMENSIONS):
                    dims[i, j, k] = float(r[name])
        return cls(ratings=ratings, dimensions=dims)


def _coincidence_matrix(ratings: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Values actually used, and the coincidence matrix over them."""
    present_values = np.unique(ratings[~np.isnan(ratings)])
    index = {v: i for i, v in enumerate(present_values)}
    k = len(present_values)
    o = np.zeros((k, k))
    for row in ratings:
        vals = row[~np.isnan(row)]
        m = len(vals)
        if m < 2:
            continue
        for i in range(m):
            for j in range(m):
                if i != j:
                    o[index[vals[i]], index[vals[j]]] += 1.0 / (m - 1)
    return present_values, o


def _difference_matrix(values: np.ndarray, marginals: np.ndarray, metric: str) -> np.ndarray:
    k = len(values)
    delta = np.zeros((k, k))
    for c in range(k):
        for d in range(c + 1, k):
            if metric == "interval":
                diff = values[d] - values[c]
            else:  # ordinal: cumulative marginal span minus the endpoints' halves
                diff = marginals[c:d + 1].sum() - (marginals[c] + marginals[d]) / 2.0
            delta[c, d] = delta[d, c] = diff * diff
    return delta


def krippendorff_alpha(matrix: RatingMatrix, metric: str = "ordinal") -> float:
    """Chance-corrected agreement, 1 - D_o/D_e; exactly 1.0 under perfect agreement."""
    if metric not in ALPHA_METRICS:
        raise ValueError(f"metric must be one of {ALPHA_METRICS}, got {metric!r}")
    ratings = matrix.ratings
    usable = (~np.isnan(ratings)).sum(axis=1) >= 2
    if usable.sum() < 2:
        raise ValueError("insufficient units: need >= 2 items with >= 2 ratings each")
    values, o = _coincidence_matrix(ratings[usable])
    marginals = o.sum(axis=1)
    n = marginals.sum()
    delta = _difference_matrix(values, marginals, metric)
    d_observed = float((o * delta).sum()) / n
    d_expected = float((np.outer(marginals, marginals) * delta).sum()) / (n * (n - 1))
    if d_expected == 0.0:
        raise ValueError("insufficient overlap: expected disagreement is zero")
    if d_observed == 0.0:
        return 1.0
    return 1.0 - d_observed / d_expected


def hva_composite(matrix: RatingMatrix) -> float:
    """Mean composite appeal: per-item mean over the 4 dimensions and annotators, then over items."""
    if matrix.dimensions is None:
        raise ValueError("matrix carries no per-dimension sub-scores")
    per_item = np.nanmean(matrix.dimensions.reshape(matrix.n_items, -1), axis=1)
    if np.isnan(per_item).any():
        raise ValueError("some items have no dimension ratings at all")
    return float(per_item.mean())
