"""Automated pair criteria: label readability and region topology."""

from __future__ import annotations

import numpy as np
import pytest

from cage.imaging.raster import RasterImage, TextRegion
from cage.metrics.pairs import PairVerification, bbox_iou, verify_pair
from cage.mocks import StripOcrBackend, encode_strip, strip_length

from oracles import TRANSLATED_IOU, iou_reference


class Prog:
    """Minimal programmatic-render stand-in carrying labeled regions."""

    def __init__(self, image: RasterImage, regions):
        self.image = image
        self.regions = tuple(regions)


def labeled_canvas(entries, width=320, height=240):
    """Canvas with one encoded strip per (text, bbox) entry."""
    px = np.full((height, width, 3), 255, dtype=np.uint8)
    regions = []
    for text, bbox in entries:
        encode_strip(px, text, bbox)
        regions.append(TextRegion(text=text, bbox=bbox))
    return RasterImage(px), regions


class TestBboxIou:
    def test_identical_boxes(self):
        assert bbox_iou((0, 0, 10, 10), (0, 0, 10, 10)) == 1.0

    def test_disjoint_boxes(self):
        assert bbox_iou((0, 0, 5, 5), (10, 10, 5, 5)) == 0.0

    def test_forty_percent_translation(self):
        a = (40, 8, 40, 10)
        b = (56, 8, 40, 10)  # shifted by 16 = 0.4 * 40
        assert bbox_iou(a, b) == pytest.approx(TRANSLATED_IOU, abs=1e-12)
        assert iou_reference(a, b) == pytest.approx(TRANSLATED_IOU, abs=1e-12)

    def test_agrees_with_reference_on_random_boxes(self):
        rng = np.random.default_rng(13)
        for _ in range(200):
            a = tuple(int(v) for v in (rng.integers(0, 50), rng.integers(0, 50),
                                       rng.integers(1, 30), rng.integers(1, 30)))
            b = tuple(int(v) for v in (rng.integers(0, 50), rng.integers(0, 50),
                                       rng.integers(1, 30), rng.integers(1, 30)))
            assert bbox_iou(a, b) == pytest.approx(iou_reference(a, b), abs=1e-12)

    def test_zero_area_rejected(self):
        with pytest.raises(ValueError):
            bbox_iou((0, 0, 0, 5), (0, 0, 5, 5))


class TestVerifyPair:
    def test_identity_pair_passes_automated_criteria(self):
        image, regions = labeled_canvas([("Aorta", (40, 8, 40, 10)),
                                         ("Vein", (40, 24, 40, 10))])
        result = verify_pair(Prog(image, regions), image, StripOcrBackend())
        assert result.labels_preserved
        assert result.topology_ok
        assert result.min_iou == 1.0
        assert result.missing_labels == ()
        assert result.overall == "pending"  # visual check stays human-owned

    def test_erased_label_fails_readability(self):
        image, regions = labeled_canvas([("Aorta", (40, 8, 40, 10)),
                                         ("Vein", (40, 24, 40, 10))])
        styled = image.pixels.copy()
        styled[8, :] = 255  # wipe the strip row carrying "Aorta"
        result = verify_pair(Prog(image, regions),
                             RasterImage(styled), StripOcrBackend())
        assert not result.labels_preserved
        assert result.missing_labels == ("Aorta",)
        assert result.overall == "pending"

    def test_translated_label_fails_topology_with_derived_iou(self):
        bbox = (40, 8, 40, 10)
        image, regions = labeled_canvas([("Aorta", bbox)])
        moved = np.full_like(image.pixels, 255)
        encode_strip(moved, "Aorta", (56, 8, 40, 10))
        result = verify_pair(Prog(image, regions),
                             RasterImage(moved), StripOcrBackend())
        assert result.labels_preserved        # text still readable
        assert not result.topology_ok         # but in the wrong place
        assert result.min_iou == pytest.approx(TRANSLATED_IOU, abs=1e-12)

    def test_no_regions_passes_vacuously(self):
        image = RasterImage.blank(64, 48)
        result = verify_pair(Prog(image, ()), image, StripOcrBackend())
        assert result.labels_preserved and result.topology_ok

    def test_threshold_is_adjustable(self):
        bbox = (40, 8, 40, 10)
        image, regions = labeled_canvas([("Aorta", bbox)])
        moved = np.full_like(image.pixels, 255)
        encode_strip(moved, "Aorta", (56, 8, 40, 10))
        relaxed = verify_pair(Prog(image, regions), RasterImage(moved),
                              StripOcrBackend(), iou_threshold=0.4)
        assert relaxed.topology_ok


class TestPairVerification:
    def test_overall_accepted_requires_visual_pass(self):
        ok = PairVerification(labels_preserved=True, topology_ok=True, visual="pass")
        assert ok.overall == "accepted"

    def test_overall_rejected_on_failed_visual(self):
        bad = PairVerification(labels_preserved=True, topology_ok=True, visual="fail")
        assert bad.overall == "rejected"

    def test_round_trip(self):
        v = PairVerification(labels_preserved=False, missing_labels=("x",),
                             topology_ok=False, min_iou=0.25)
        again = PairVerification.from_dict(v.to_dict())
        assert again == v

    def test_unknown_visual_state_rejected(self):
        with pytest.raises(ValueError):
            PairVerification(labels_preserved=True, visual="maybe")


class TestStripCodec:
    def test_round_trip(self):
        px = np.full((40, 160, 3), 255, dtype=np.uint8)
        encode_strip(px, "Small intestine", (10, 5, 60, 12))
        from cage.mocks import decode_strips
        regions = decode_strips(RasterImage(px))
        assert [r.text for r in regions] == ["Small intestine"]
        assert regions[0].bbox == (10, 5, 60, 12)

    def test_strip_length_bounds_encoding(self):
        text = "Esophagus"
        need = strip_length(text)
        px = np.full((10, need + 5, 3), 255, dtype=np.uint8)
        encode_strip(px, text, (0, 0, need, 8))
        with pytest.raises(ValueError):
            encode_strip(px, text, (0, 0, need - 1, 8))

    def test_non_ascii_text(self):
        px = np.full((10, 100, 3), 255, dtype=np.uint8)
        encode_strip(px, "Ångström", (0, 0, 40, 8))
        from cage.mocks import decode_strips
        assert decode_strips(RasterImage(px))[0].text == "Ångström"
