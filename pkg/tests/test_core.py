"""Data model and JSON I/O."""
import random

import pytest

from hoirobust.core import (
    BoundingBox,
    DatasetIndex,
    DomainManifest,
    HoiCategoryTable,
    ImageRecord,
    InvariantError,
    ManifestEntry,
    ParseError,
    SchemaError,
    dataset_from_dict,
    dataset_to_dict,
    detections_from_dict,
    detections_to_dict,
    load_json,
    manifest_from_dict,
    manifest_to_dict,
    validate_manifest,
    write_json,
)
from conftest import perfect_pair


class TestBoundingBox:
    def test_accessors(self):
        b = BoundingBox(1.0, 2.0, 4.0, 7.0)
        assert (b.width, b.height, b.area) == (3.0, 5.0, 15.0)
        assert b.as_list() == [1.0, 2.0, 4.0, 7.0]

    def test_scaled(self):
        assert BoundingBox(1, 2, 3, 4).scaled(2.0, 0.5) == BoundingBox(2, 1, 6, 2)

    @pytest.mark.parametrize("coords", [(0, 0, 0, 5), (0, 0, 5, 0), (3, 1, 2, 4)])
    def test_non_positive_area_rejected(self, coords):
        with pytest.raises(InvariantError):
            BoundingBox(*coords)

    def test_non_finite_rejected(self):
        with pytest.raises(InvariantError):
            BoundingBox(0.0, 0.0, float("nan"), 1.0)


class TestCategoryTable:
    def test_lookups(self):
        t = HoiCategoryTable(("a", "b"), ("x", "y"), ((0, 0), (1, 0), (0, 1)),
                             (True, False, False))
        assert t.num_categories == 3
        assert t.interaction_of(1) == 1 and t.object_of(1) == 0
        assert t.rare_ids() == [0] and t.nonrare_ids() == [1, 2]
        assert t.categories_with_object(0) == [0, 1]

    def test_duplicate_pair_rejected(self):
        with pytest.raises(InvariantError):
            HoiCategoryTable(("a",), ("x",), ((0, 0), (0, 0)), (False, False))

    def test_id_out_of_range_rejected(self):
        with pytest.raises(InvariantError):
            HoiCategoryTable(("a",), ("x",), ((0, 1),), (False,))

    def test_rare_length_mismatch_rejected(self):
        with pytest.raises(InvariantError):
            HoiCategoryTable(("a",), ("x",), ((0, 0),), (False, True))


def test_image_record_rejects_out_of_bounds_boxes():
    from hoirobust.core import GroundTruthInstance
    gt = GroundTruthInstance(hbox=BoundingBox(0, 0, 20, 5),
                             obox=BoundingBox(0, 0, 5, 5), hoi_category=0)
    with pytest.raises(InvariantError):
        ImageRecord(image_id="im", width=16, height=16, gts=(gt,))


def test_dataset_round_trip():
    dataset, dets = perfect_pair()
    assert dataset_to_dict(dataset_from_dict(dataset_to_dict(dataset))) \
        == dataset_to_dict(dataset)
    assert detections_to_dict(detections_from_dict(detections_to_dict(dets))) \
        == detections_to_dict(dets)


def test_dataset_rejects_unknown_category():
    raw = dataset_to_dict(perfect_pair()[0])
    raw["images"][0]["gts"][0]["hoi"] = 99
    with pytest.raises(InvariantError):
        dataset_from_dict(raw)


def test_detection_validation_against_dataset():
    dataset, dets = perfect_pair()
    raw = detections_to_dict(dets)
    raw["detections"][0]["image_id"] = "ghost"
    with pytest.raises(InvariantError):
        detections_from_dict(raw, dataset)
    raw = detections_to_dict(dets)
    raw["detections"][0]["hoi"] = 40
    with pytest.raises(InvariantError):
        detections_from_dict(raw, dataset)
    # without a dataset the same structure is accepted
    detections_from_dict(raw)


def test_detection_schema_errors():
    with pytest.raises(SchemaError):
        detections_from_dict({"method": "m", "domain": "d",
                              "detections": [{"image_id": "a"}]})
    with pytest.raises(SchemaError):
        detections_from_dict([])


def test_load_json_errors(tmp_path):
    with pytest.raises(ParseError):
        load_json(tmp_path / "missing.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json", encoding="utf-8")
    with pytest.raises(ParseError):
        load_json(bad)


def test_write_json_is_canonical(tmp_path):
    p1, p2 = tmp_path / "a.json", tmp_path / "b.json"
    write_json(p1, {"b": 1, "a": [2, 3]})
    write_json(p2, {"a": [2, 3], "b": 1})
    assert p1.read_bytes() == p2.read_bytes()
    assert p1.read_text().endswith("\n")


class TestManifest:
    def _manifest(self, copies):
        return DomainManifest(domains=("fog", "rain"),
                              copies=tuple(ManifestEntry(*c) for c in copies))

    def _dataset(self):
        return perfect_pair()[0]  # images im0, im1

    def test_complete_manifest_passes(self):
        m = self._manifest([("im0", "fog", "p0"), ("im0", "rain", "p1"),
                            ("im1", "fog", "p2"), ("im1", "rain", "p3")])
        report = validate_manifest(m, self._dataset())
        assert report.passed
        assert report.per_domain_counts == {"fog": 2, "rain": 2}
        assert report.missing == [] and report.duplicates == []

    def test_missing_and_duplicate_copies_fail(self):
        m = self._manifest([("im0", "fog", "p0"), ("im0", "fog", "p1"),
                            ("im0", "rain", "p2"), ("im1", "rain", "p3")])
        report = validate_manifest(m, self._dataset())
        assert not report.passed
        assert report.missing == [("im1", "fog")]
        assert report.duplicates == [("im0", "fog")]

    def test_unknown_base_is_informational(self):
        m = self._manifest([("im0", "fog", "p"), ("im0", "rain", "p"),
                            ("im1", "fog", "p"), ("im1", "rain", "p"),
                            ("imX", "fog", "p")])
        report = validate_manifest(m, self._dataset())
        assert report.passed and report.unknown_bases == ["imX"]

    def test_order_independence(self):
        copies = [("im0", "fog", "p0"), ("im0", "rain", "p1"),
                  ("im1", "fog", "p2"), ("im1", "rain", "p3"),
                  ("imX", "rain", "p4"), ("im1", "rain", "p5")]
        rng = random.Random(7)
        reports = []
        for _ in range(5):
            rng.shuffle(copies)
            reports.append(validate_manifest(self._manifest(copies),
                                             self._dataset()))
        first = reports[0]
        for rep in reports[1:]:
            assert rep == first

    def test_unlisted_domain_rejected(self):
        with pytest.raises(InvariantError):
            self._manifest([("im0", "snow", "p")])

    def test_round_trip(self):
        m = self._manifest([("im0", "fog", "p0")])
        assert manifest_to_dict(manifest_from_dict(manifest_to_dict(m))) \
            == manifest_to_dict(m)
