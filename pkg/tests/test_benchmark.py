"""Benchmark manifest loading, validation, and the reference image index."""

from __future__ import annotations

import hashlib
import json

import pytest

from cage.benchmark import (DiagramPrompt, ManifestValidation, ReferenceSet,
                            dump_manifest, load_manifest, load_reference_set,
                            validate_manifest)
from cage.errors import ManifestError, ReferenceSetError
from cage.imaging.raster import RasterImage

from conftest import make_prompt


class TestDiagramPrompt:
    def test_dict_round_trip(self):
        prompt = make_prompt()
        assert DiagramPrompt.from_dict(prompt.to_dict()) == prompt

    def test_missing_field_rejected(self):
        d = make_prompt().to_dict()
        del d["labels"]
        with pytest.raises(ValueError, match="missing fields"):
            DiagramPrompt.from_dict(d)

    @pytest.mark.parametrize("field,value", [
        ("id", "  "),
        ("subject", "astrology"),
        ("grade_band", "13-16"),
        ("topic", ""),
        ("labels", ()),
        ("labels", ("Nucleus", "  ")),
    ])
    def test_field_validation(self, field, value):
        d = make_prompt().to_dict()
        d[field] = list(value) if field == "labels" else value
        with pytest.raises(ValueError):
            DiagramPrompt.from_dict(d)

    def test_duplicate_labels_detected_after_normalization(self):
        prompt = make_prompt(labels=("Nucleus", "  nucleus ", "Membrane"))
        assert prompt.duplicate_labels() == ["  nucleus "]
        assert make_prompt().duplicate_labels() == []


class TestLoadManifest:
    def test_fixture_manifest_loads(self, data_dir):
        prompts = load_manifest(data_dir / "manifest_10.jsonl")
        assert len(prompts) == 10
        assert len({p.id for p in prompts}) == 10

    def test_round_trip(self, data_dir, tmp_path):
        prompts = load_manifest(data_dir / "manifest_10.jsonl")
        out = dump_manifest(prompts, tmp_path / "copy.jsonl")
        assert load_manifest(out) == prompts

    def test_blank_lines_skipped(self, tmp_path):
        path = tmp_path / "m.jsonl"
        line = json.dumps(make_prompt().to_dict())
        path.write_text(f"\n{line}\n\n", encoding="utf-8")
        assert len(load_manifest(path)) == 1

    def test_missing_file(self, tmp_path):
        with pytest.raises(ManifestError, match="not found"):
            load_manifest(tmp_path / "nope.jsonl")

    def test_invalid_json_reports_line(self, tmp_path):
        path = tmp_path / "m.jsonl"
        line = json.dumps(make_prompt().to_dict())
        path.write_text(f"{line}\n{{broken\n", encoding="utf-8")
        with pytest.raises(ManifestError, match="line 2") as exc:
            load_manifest(path)
        assert exc.value.line == 2

    def test_bad_record_reports_line(self, tmp_path):
        path = tmp_path / "m.jsonl"
        good = make_prompt().to_dict()
        bad = make_prompt(pid="x-1").to_dict()
        bad["subject"] = "alchemy"
        path.write_text(json.dumps(good) + "\n" + json.dumps(bad) + "\n",
                        encoding="utf-8")
        with pytest.raises(ManifestError, match="line 2"):
            load_manifest(path)

    def test_duplicate_ids_rejected(self, tmp_path):
        path = tmp_path / "m.jsonl"
        line = json.dumps(make_prompt().to_dict())
        path.write_text(line + "\n" + line + "\n", encoding="utf-8")
        with pytest.raises(ManifestError) as exc:
            load_manifest(path)
        assert exc.value.duplicate_ids == ["bio-001"]

    def test_duplicate_labels_rejected(self, tmp_path):
        path = tmp_path / "m.jsonl"
        d = make_prompt().to_dict()
        d["labels"] = ["Nucleus", "NUCLEUS"]
        path.write_text(json.dumps(d) + "\n", encoding="utf-8")
        with pytest.raises(ManifestError, match="duplicate labels"):
            load_manifest(path)


class TestValidateManifest:
    def test_fixture_counts(self, data_dir):
        prompts = load_manifest(data_dir / "manifest_10.jsonl")
        result = validate_manifest(prompts)
        assert result.passed
        assert result.counts == {"biology": 3, "chemistry": 3,
                                 "mathematics": 2, "physics": 2}

    def test_strata_mismatch_reported(self, data_dir):
        prompts = load_manifest(data_dir / "manifest_10.jsonl")
        result = validate_manifest(prompts, expected_strata={"biology": 5,
                                                             "geology": 1})
        assert not result.passed
        assert result.strata_mismatches == ("biology: expected 5, got 3",
                                            "geology: expected 1, got 0")

    def test_strata_match_passes(self, data_dir):
        prompts = load_manifest(data_dir / "manifest_10.jsonl")
        result = validate_manifest(prompts, expected_strata={"biology": 3})
        assert result.passed

    def test_empty_manifest_fails(self):
        result = validate_manifest([])
        assert result.empty and not result.passed

    def test_duplicates_surface_without_raising(self):
        # validate_manifest reports; only load_manifest raises.
        prompts = [make_prompt(), make_prompt()]
        result = validate_manifest(prompts)
        assert result.duplicate_ids == ("bio-001",)
        assert not result.passed

    def test_to_dict_keys(self):
        d = validate_manifest([make_prompt()]).to_dict()
        assert set(d) == {"counts", "duplicate_ids", "label_problems",
                          "strata_mismatches", "empty", "passed"}
        assert d["passed"] is True

    def test_passed_is_derived(self):
        v = ManifestValidation(counts={}, duplicate_ids=("a",))
        assert not v.passed


class TestReferenceSet:
    def _write_images(self, root, names=("b", "a", "c")):
        root.mkdir(parents=True, exist_ok=True)
        for i, name in enumerate(names):
            RasterImage.blank(8, 8, color=(i, i, i)).to_png(root / f"{name}.png")

    def test_entries_sorted_by_filename(self, tmp_path):
        self._write_images(tmp_path / "refs")
        refs = load_reference_set(tmp_path / "refs")
        assert isinstance(refs, ReferenceSet)
        assert [e.id for e in refs.entries] == ["a", "b", "c"]
        assert refs.size == 3
        assert len(refs.load_images()) == 3

    def test_checksums_recorded(self, tmp_path):
        self._write_images(tmp_path / "refs", names=("a",))
        refs = load_reference_set(tmp_path / "refs")
        expected = hashlib.sha256((tmp_path / "refs" / "a.png").read_bytes()).hexdigest()
        assert refs.entries[0].sha256 == expected

    def test_index_written_once(self, tmp_path):
        self._write_images(tmp_path / "refs")
        load_reference_set(tmp_path / "refs")
        index_path = tmp_path / "refs" / "reference_index.json"
        index = json.loads(index_path.read_text(encoding="utf-8"))
        assert set(index) == {"a", "b", "c"}
        assert index["a"]["file"] == "a.png"
        # A second load keeps the existing index file byte for byte.
        before = index_path.read_bytes()
        load_reference_set(tmp_path / "refs")
        assert index_path.read_bytes() == before

    def test_non_png_files_ignored(self, tmp_path):
        self._write_images(tmp_path / "refs", names=("a",))
        (tmp_path / "refs" / "notes.txt").write_text("not an image")
        refs = load_reference_set(tmp_path / "refs")
        assert [e.id for e in refs.entries] == ["a"]

    def test_missing_directory(self, tmp_path):
        with pytest.raises(ReferenceSetError, match="not found"):
            load_reference_set(tmp_path / "nope")

    def test_empty_directory(self, tmp_path):
        (tmp_path / "refs").mkdir()
        with pytest.raises(ReferenceSetError, match="zero images"):
            load_reference_set(tmp_path / "refs")

    def test_corrupt_image(self, tmp_path):
        (tmp_path / "refs").mkdir()
        (tmp_path / "refs" / "bad.png").write_bytes(b"not a png at all")
        with pytest.raises(ReferenceSetError, match="corrupt"):
            load_reference_set(tmp_path / "refs")
