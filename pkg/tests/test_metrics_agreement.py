"""Chance-corrected inter-annotator agreement and the composite appeal score."""

from __future__ import annotations

import numpy as np
import pytest

from cage.metrics.agreement import RatingMatrix, hva_composite, krippendorff_alpha

from oracles import (
    INTERVAL_ALPHA_EXPECTED,
    INTERVAL_ALPHA_FIXTURE,
    krippendorff_reference,
)


def matrix(rows) -> RatingMatrix:
    return RatingMatrix(np.array(rows, dtype=np.float64))


class TestAlpha:
    def test_perfect_agreement_is_exactly_one(self):
        m = matrix([(1, 1), (3, 3), (5, 5), (2, 2)])
        assert krippendorff_alpha(m, metric="interval") == 1.0
        assert krippendorff_alpha(m, metric="ordinal") == 1.0

    def test_interval_fixture_matches_hand_derivation(self):
        m = matrix(INTERVAL_ALPHA_FIXTURE)
        got = krippendorff_alpha(m, metric="interval")
        assert got == pytest.approx(INTERVAL_ALPHA_EXPECTED, abs=1e-9)
        assert got == pytest.approx(104 / 111, abs=1e-12)

    def test_interval_fixture_matches_reference_implementation(self):
        got = krippendorff_alpha(matrix(INTERVAL_ALPHA_FIXTURE), metric="interval")
        want = krippendorff_reference([list(r) for r in INTERVAL_ALPHA_FIXTURE],
                                      metric="interval")
        assert got == pytest.approx(want, abs=1e-9)

    def test_random_matrices_match_reference(self):
        rng = np.random.default_rng(31)
        for metric in ("interval", "ordinal"):
            for _ in range(20):
                rows = rng.integers(1, 6, size=(6, 4)).astype(np.float64)
                # Punch some holes; keep at least two ratings per item.
                for i in range(rows.shape[0]):
                    if rng.random() < 0.5:
                        rows[i, int(rng.integers(0, 4))] = np.nan
                got = krippendorff_alpha(RatingMatrix(rows), metric=metric)
                want = krippendorff_reference(
                    [[None if np.isnan(v) else float(v) for v in row] for row in rows],
                    metric=metric)
                assert got == pytest.approx(want, abs=1e-9), metric

    def test_invariant_under_annotator_permutation(self):
        rng = np.random.default_rng(57)
        rows = rng.integers(1, 6, size=(8, 5)).astype(np.float64)
        base = krippendorff_alpha(RatingMatrix(rows), metric="ordinal")
        for _ in range(5):
            perm = rng.permutation(5)
            shuffled = krippendorff_alpha(RatingMatrix(rows[:, perm]), metric="ordinal")
            assert shuffled == pytest.approx(base, abs=1e-12)

    def test_items_with_single_rating_are_ignored(self):
        full = matrix([(1, 2), (4, 5), (2, 2)])
        padded = matrix([(1, 2), (4, 5), (2, 2), (3, np.nan)])
        a = krippendorff_alpha(full, metric="interval")
        b = krippendorff_alpha(padded, metric="interval")
        assert a == pytest.approx(b, abs=1e-12)

    def test_unknown_metric_rejected(self):
        with pytest.raises(ValueError):
            krippendorff_alpha(matrix([(1, 2), (3, 4)]), metric="nominal")

    def test_degenerate_single_value_rejected(self):
        with pytest.raises(ValueError):
            krippendorff_alpha(matrix([(3, 3), (3, 3)]))

    def test_too_few_usable_items_rejected(self):
        with pytest.raises(ValueError):
            krippendorff_alpha(matrix([(1, 2), (np.nan, 4)]))


class TestRatingMatrix:
    def test_out_of_scale_rejected(self):
        with pytest.raises(ValueError):
            matrix([(0, 2), (3, 4)])
        with pytest.raises(ValueError):
            matrix([(1, 6), (3, 4)])

    def test_needs_two_annotators(self):
        with pytest.raises(ValueError):
            RatingMatrix(np.array([[1.0], [2.0]]))

    def test_from_csv_long_format(self, tmp_path):
        path = tmp_path / "ratings.csv"
        path.write_text(
            "item,annotator,rating\n"
            "img1,a,4\nimg1,b,5\nimg2,a,2\nimg2,b,2\n",
            encoding="utf-8")
        m = RatingMatrix.from_csv(path)
        assert m.n_items == 2 and m.n_annotators == 2
        assert m.ratings[0].tolist() == [4.0, 5.0]


class TestHvaComposite:
    def test_mean_over_dimensions_and_annotators(self):
        ratings = np.array([[4.0, 4.0]])
        dims = np.array([[[4.0, 4.0, 4.0, 4.0], [2.0, 2.0, 2.0, 2.0]]])
        m = RatingMatrix(ratings, dimensions=dims)
        assert hva_composite(m) == pytest.approx(3.0)

    def test_requires_dimension_scores(self):
        with pytest.raises(ValueError):
            hva_composite(matrix([(1, 2), (3, 4)]))
