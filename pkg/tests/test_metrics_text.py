"""Edit distance, label exact-match, and character error rate."""

from __future__ import annotations

import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from cage.imaging.raster import TextRegion
from cage.metrics.ocr import OcrResult
from cage.metrics.text import (
    candidate_strings,
    cer,
    cer_counts,
    lem,
    lem_counts,
    levenshtein,
    normalize_text,
)

from oracles import (
    AORTA_AROTA_CER,
    DIGESTIVE_LEM,
    KITTEN_SITTING_DISTANCE,
    MITOCHONDRIA_DISTANCE,
    dp_levenshtein,
)

DIGESTIVE_LABELS = ["Mouth", "Esophagus", "Stomach", "Liver", "Pancreas",
                    "Small intestine", "Large intestine", "Rectum", "Anus"]


def ocr_of(*texts: str) -> OcrResult:
    return OcrResult(tokens=tuple(
        TextRegion(text=t, bbox=(8, 8 + 14 * i, 30, 10)) for i, t in enumerate(texts)))


class TestLevenshtein:
    def test_classic_fixture(self):
        assert levenshtein("kitten", "sitting") == KITTEN_SITTING_DISTANCE
        assert dp_levenshtein("kitten", "sitting") == KITTEN_SITTING_DISTANCE

    def test_scrambled_organ_name(self):
        assert levenshtein("mitochondria", "mitochndira") == MITOCHONDRIA_DISTANCE
        assert dp_levenshtein("mitochondria", "mitochndira") == MITOCHONDRIA_DISTANCE

    def test_empty_and_identical(self):
        assert levenshtein("", "") == 0
        assert levenshtein("abc", "") == 3
        assert levenshtein("", "abc") == 3
        assert levenshtein("same", "same") == 0

    def test_agrees_with_dp_oracle_on_random_pairs(self):
        rng = random.Random(0xC0FFEE)
        alphabet = "abcde"
        for _ in range(1000):
            a = "".join(rng.choices(alphabet, k=rng.randint(0, 12)))
            b = "".join(rng.choices(alphabet, k=rng.randint(0, 12)))
            assert levenshtein(a, b) == dp_levenshtein(a, b), (a, b)

    @given(st.text(max_size=24), st.text(max_size=24))
    def test_symmetry(self, a, b):
        assert levenshtein(a, b) == levenshtein(b, a)

    @given(st.text(max_size=16), st.text(max_size=16), st.text(max_size=16))
    def test_triangle_inequality(self, a, b, c):
        assert levenshtein(a, c) <= levenshtein(a, b) + levenshtein(b, c)

    @given(st.text(max_size=24), st.text(max_size=24))
    def test_bounds(self, a, b):
        d = levenshtein(a, b)
        assert abs(len(a) - len(b)) <= d <= max(len(a), len(b))


class TestNormalize:
    def test_case_and_whitespace(self):
        assert normalize_text("  Small \n Intestine ") == "small intestine"
        assert normalize_text("AORTA") == "aorta"

    def test_line_break_inside_label(self):
        assert normalize_text("large\nintestine") == normalize_text("Large intestine")


class TestLem:
    def test_all_labels_found(self):
        assert lem(["Aorta", "Vein"], "the aorta and the vein") == 1.0

    def test_digestive_fixture_missing_rectum(self):
        text = " ".join(l for l in DIGESTIVE_LABELS if l != "Rectum")
        assert lem(DIGESTIVE_LABELS, text) == pytest.approx(DIGESTIVE_LEM)
        assert lem_counts(DIGESTIVE_LABELS, text) == (8, 9)

    def test_substring_match_is_whitespace_tolerant(self):
        assert lem(["Small intestine"], "small\nintestine here") == 1.0

    def test_accepts_ocr_result(self):
        assert lem(["Aorta"], ocr_of("Aorta", "Vein")) == 1.0
        assert lem(["Valve"], ocr_of("Aorta", "Vein")) == 0.0

    def test_counts_pool_across_images(self):
        # Four images of eight labels each, one image loses one label.
        labels = [f"part {i}" for i in range(8)]
        full = " ".join(labels)
        partial = " ".join(labels[:-1])
        found = total = 0
        for text in (full, full, full, partial):
            f, t = lem_counts(labels, text)
            found += f
            total += t
        assert (found, total) == (31, 32)
        assert 100.0 * found / total == 96.875

    def test_empty_labels_rejected(self):
        with pytest.raises(ValueError):
            lem([], "anything")


class TestCandidateStrings:
    def test_ngrams_up_to_three(self):
        cands = candidate_strings(["a", "b", "c", "d"])
        assert "a" in cands and "a b" in cands and "b c d" in cands
        assert "a b c d" not in cands

    def test_deduplication(self):
        assert candidate_strings(["x", "x"]).count("x") == 1


class TestCer:
    def test_exact_match_is_zero(self):
        assert cer(["Aorta"], ocr_of("Aorta")) == 0.0

    def test_single_swap_fixture(self):
        assert cer(["aorta"], ocr_of("arota")) == pytest.approx(AORTA_AROTA_CER)

    def test_missing_label_costs_its_length(self):
        assert cer(["Vein"], ocr_of("unrelated-text-far-away")) == 1.0

    def test_no_ocr_output_costs_everything(self):
        assert cer(["Aorta", "Vein"], []) == 1.0
        assert cer_counts(["Aorta", "Vein"], []) == (9, 9)

    def test_multiword_label_matches_ngram(self):
        assert cer(["Small intestine"], ocr_of("Small", "intestine")) == 0.0

    def test_counts_pool_across_images(self):
        d1, n1 = cer_counts(["aorta"], ocr_of("arota"))
        d2, n2 = cer_counts(["vein"], ocr_of("vein"))
        assert (d1 + d2) / (n1 + n2) == pytest.approx(2 / 9)

    def test_assignment_mode_forbids_candidate_reuse(self):
        # Two identical labels, one matching token: reuse makes the
        # independent mode cheaper than one-to-one assignment.
        labels = ["node", "node"]
        result = ocr_of("node")
        assert cer(labels, result) == 0.0
        assert cer(labels, result, assignment=True) == pytest.approx(0.5)

    def test_assignment_never_cheaper(self):
        rng = random.Random(99)
        for _ in range(25):
            labels = ["".join(rng.choices("abc", k=rng.randint(1, 5)))
                      for _ in range(rng.randint(1, 4))]
            tokens = ["".join(rng.choices("abc", k=rng.randint(1, 5)))
                      for _ in range(rng.randint(0, 5))]
            free = cer(labels, tokens)
            matched = cer(labels, tokens, assignment=True)
            assert matched >= free - 1e-12

    @given(st.lists(st.text(alphabet="abcdef", min_size=1, max_size=8),
                    min_size=1, max_size=5),
           st.lists(st.text(alphabet="abcdef", min_size=1, max_size=8),
                    max_size=6))
    def test_cer_bounded(self, labels, tokens):
        value = cer(labels, tokens)
        assert 0.0 <= value <= 1.0
