"""Data model and JSON I/O for HOI detection benchmarks under distribution shift.

A dataset is a category table (interaction names, object names, and the
interaction-object pairs that form the triplet categories) plus a set of
annotated images.  Detections are produced per method and per domain, and a
domain manifest maps every base image to its shifted copy in each domain.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Iterator, Mapping, Sequence


class DataError(ValueError):
    """Base class for problems in benchmark input files."""


class ParseError(DataError):
    """File is missing, unreadable, or not valid JSON."""


class SchemaError(DataError):
    """JSON structure does not match the documented schema."""


class InvariantError(DataError):
    """Structurally valid data that violates a semantic invariant."""


class ConfigError(ValueError):
    """Invalid configuration value or flag combination."""


def _require(condition: bool, message: str, exc: type = SchemaError) -> None:
    if not condition:
        raise exc(message)


@dataclass(frozen=True)
class BoundingBox:
    """Axis-aligned box in xyxy corner format."""

    x1: float
    y1: float
    x2: float
    y2: float

    def __post_init__(self) -> None:
        for v in (self.x1, self.y1, self.x2, self.y2):
            _require(isinstance(v, (int, float)) and math.isfinite(v),
                     f"box coordinate {v!r} is not finite", InvariantError)
        _require(self.x2 > self.x1 and self.y2 > self.y1,
                 f"box {self.as_list()} has non-positive area", InvariantError)

    @property
    def width(self) -> float:
        return self.x2 - self.x1

    @property
    def height(self) -> float:
        return self.y2 - self.y1

    @property
    def area(self) -> float:
        return self.width * self.height

    def scaled(self, sx: float, sy: float) -> "BoundingBox":
        """Box under an axis-aligned scaling of the image plane."""
        return BoundingBox(self.x1 * sx, self.y1 * sy, self.x2 * sx, self.y2 * sy)

    def as_list(self) -> list[float]:
        return [self.x1, self.y1, self.x2, self.y2]


@dataclass(frozen=True)
class HoiCategoryTable:
    """Triplet category table: category id -> (interaction id, object id)."""

    interactions: tuple[str, ...]
    objects: tuple[str, ...]
    hoi: tuple[tuple[int, int], ...]
    rare: tuple[bool, ...]

    def __post_init__(self) -> None:
        _require(len(self.interactions) > 0, "empty interaction list", InvariantError)
        _require(len(self.objects) > 0, "empty object list", InvariantError)
        _require(len(self.hoi) > 0, "empty hoi category list", InvariantError)
        _require(len(self.rare) == len(self.hoi),
                 f"rare flag count {len(self.rare)} != category count {len(self.hoi)}",
                 InvariantError)
        seen: set[tuple[int, int]] = set()
        for c, (inter, obj) in enumerate(self.hoi):
            _require(0 <= inter < len(self.interactions),
                     f"category {c}: interaction id {inter} out of range", InvariantError)
            _require(0 <= obj < len(self.objects),
                     f"category {c}: object id {obj} out of range", InvariantError)
            _require((inter, obj) not in seen,
                     f"category {c}: duplicate pair {(inter, obj)}", InvariantError)
            seen.add((inter, obj))

    @property
    def num_categories(self) -> int:
        return len(self.hoi)

    def interaction_of(self, category: int) -> int:
        return self.hoi[category][0]

    def object_of(self, category: int) -> int:
        return self.hoi[category][1]

    def rare_ids(self) -> list[int]:
        return [c for c, flag in enumerate(self.rare) if flag]

    def nonrare_ids(self) -> list[int]:
        return [c for c, flag in enumerate(self.rare) if not flag]

    def categories_with_object(self, object_id: int) -> list[int]:
        return [c for c, (_, obj) in enumerate(self.hoi) if obj == object_id]


@dataclass(frozen=True)
class GroundTruthInstance:
    """One annotated human-object interaction: a box pair and its category."""

    hbox: BoundingBox
    obox: BoundingBox
    hoi_category: int

    def __post_init__(self) -> None:
        _require(self.hoi_category >= 0,
                 f"negative hoi category {self.hoi_category}", InvariantError)


@dataclass(frozen=True)
class DetectionInstance:
    """One predicted triplet with a confidence score."""

    image_id: str
    hbox: BoundingBox
    obox: BoundingBox
    hoi_category: int
    score: float

    def __post_init__(self) -> None:
        _require(self.hoi_category >= 0,
                 f"negative hoi category {self.hoi_category}", InvariantError)
        _require(math.isfinite(self.score),
                 f"detection score {self.score!r} is not finite", InvariantError)


@dataclass(frozen=True)
class ImageRecord:
    """An image with its ground-truth interaction instances."""

    image_id: str
    width: int
    height: int
    gts: tuple[GroundTruthInstance, ...]

    def __post_init__(self) -> None:
        _require(self.width > 0 and self.height > 0,
                 f"image {self.image_id}: non-positive dimensions", InvariantError)
        for gt in self.gts:
            for box in (gt.hbox, gt.obox):
                inside = (0 <= box.x1 and box.x2 <= self.width
                          and 0 <= box.y1 and box.y2 <= self.height)
                _require(inside,
                         f"image {self.image_id}: box {box.as_list()} outside "
                         f"{self.width}x{self.height} bounds", InvariantError)


@dataclass(frozen=True)
class DatasetIndex:
    """Category table plus images, keyed by image id in file order."""

    categories: HoiCategoryTable
    images: dict[str, ImageRecord]

    def __post_init__(self) -> None:
        n = self.categories.num_categories
        for rec in self.images.values():
            _require(rec.image_id in self.images, "image id key mismatch", InvariantError)
            for gt in rec.gts:
                _require(gt.hoi_category < n,
                         f"image {rec.image_id}: hoi category {gt.hoi_category} out of "
                         f"range for a {n}-category table (valid ids 0..{n - 1})",
                         InvariantError)

    @property
    def num_images(self) -> int:
        return len(self.images)

    def gt_count(self, category: int) -> int:
        return sum(1 for rec in self.images.values()
                   for gt in rec.gts if gt.hoi_category == category)

    def images_with_object(self, object_id: int) -> list[str]:
        """Ids of images whose annotations involve the given object class."""
        table = self.categories
        return [rec.image_id for rec in self.images.values()
                if any(table.object_of(gt.hoi_category) == object_id for gt in rec.gts)]


@dataclass(frozen=True)
class DetectionSet:
    """All detections of one method on one domain, grouped per image."""

    method: str
    domain: str
    by_image: dict[str, list[DetectionInstance]]

    def all_detections(self) -> Iterator[DetectionInstance]:
        for dets in self.by_image.values():
            yield from dets

    @property
    def num_detections(self) -> int:
        return sum(len(d) for d in self.by_image.values())


@dataclass(frozen=True)
class ManifestEntry:
    base: str
    domain: str
    path: str


@dataclass(frozen=True)
class DomainManifest:
    """Maps every base image to its shifted copy in each listed domain."""

    domains: tuple[str, ...]
    copies: tuple[ManifestEntry, ...]

    def __post_init__(self) -> None:
        _require(len(self.domains) > 0, "manifest lists no domains", InvariantError)
        _require(len(set(self.domains)) == len(self.domains),
                 "duplicate domain names in manifest", InvariantError)
        known = set(self.domains)
        for entry in self.copies:
            _require(entry.domain in known,
                     f"copy ({entry.base!r}, {entry.domain!r}) references an unlisted domain",
                     InvariantError)

    def index(self) -> dict[tuple[str, str], list[str]]:
        """(base, domain) -> paths; a valid manifest has exactly one path per key."""
        out: dict[tuple[str, str], list[str]] = {}
        for entry in self.copies:
            out.setdefault((entry.base, entry.domain), []).append(entry.path)
        return out


@dataclass(frozen=True)
class ManifestReport:
    """Completeness report for a domain manifest against a dataset."""

    per_domain_counts: dict[str, int]
    missing: list[tuple[str, str]]
    duplicates: list[tuple[str, str]]
    unknown_bases: list[str]
    passed: bool


def validate_manifest(manifest: DomainManifest, dataset: DatasetIndex) -> ManifestReport:
    """Check that every base image has exactly one copy in every domain.

    The report is order independent: entry order in the manifest file does
    not change any field.  Unknown base ids are listed for information but
    do not affect the verdict; missing or duplicated (base, domain) pairs do.
    """
    index = manifest.index()
    base_ids = list(dataset.images)
    known = set(base_ids)
    counts = {d: 0 for d in manifest.domains}
    unknown = sorted({base for (base, _d) in index if base not in known})
    duplicates = sorted((base, d) for (base, d), paths in index.items()
                        if base in known and len(paths) > 1)
    missing = sorted((base, d) for base in base_ids for d in manifest.domains
                     if (base, d) not in index)
    for (base, d), paths in index.items():
        if base in known:
            counts[d] += len(paths)
    return ManifestReport(
        per_domain_counts=counts,
        missing=missing,
        duplicates=duplicates,
        unknown_bases=unknown,
        passed=not missing and not duplicates,
    )


# ---------------------------------------------------------------------------
# JSON parsing

def load_json(path: str | Path) -> Any:
    """Read a JSON file, raising ParseError on I/O or syntax problems."""
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read {p}: {exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{p} is not valid JSON: {exc}") from exc


def _as_box(raw: Any, where: str) -> BoundingBox:
    _require(isinstance(raw, list) and len(raw) == 4
             and all(isinstance(v, (int, float)) for v in raw),
             f"{where}: expected [x1, y1, x2, y2], got {raw!r}")
    return BoundingBox(float(raw[0]), float(raw[1]), float(raw[2]), float(raw[3]))


def _category_table(raw: Any) -> HoiCategoryTable:
    _require(isinstance(raw, dict), "categories: expected an object")
    for key in ("interactions", "objects", "hoi", "rare"):
        _require(key in raw, f"categories: missing key {key!r}")
    _require(all(isinstance(s, str) for s in raw["interactions"]),
             "categories.interactions: expected strings")
    _require(all(isinstance(s, str) for s in raw["objects"]),
             "categories.objects: expected strings")
    pairs: list[tuple[int, int]] = []
    for k, pair in enumerate(raw["hoi"]):
        _require(isinstance(pair, list) and len(pair) == 2
                 and all(isinstance(v, int) and not isinstance(v, bool) for v in pair),
                 f"categories.hoi[{k}]: expected [interaction_id, object_id]")
        pairs.append((pair[0], pair[1]))
    _require(all(isinstance(f, bool) for f in raw["rare"]),
             "categories.rare: expected booleans")
    return HoiCategoryTable(
        interactions=tuple(raw["interactions"]),
        objects=tuple(raw["objects"]),
        hoi=tuple(pairs),
        rare=tuple(raw["rare"]),
    )


def dataset_from_dict(raw: Any) -> DatasetIndex:
    """Build a DatasetIndex from parsed annotation JSON."""
    _require(isinstance(raw, dict), "annotation file: expected a JSON object")
    _require("categories" in raw and "images" in raw,
             "annotation file: missing 'categories' or 'images'")
    table = _category_table(raw["categories"])
    images: dict[str, ImageRecord] = {}
    _require(isinstance(raw["images"], list), "images: expected a list")
    for k, rec in enumerate(raw["images"]):
        _require(isinstance(rec, dict), f"images[{k}]: expected an object")
        for key in ("id", "width", "height", "gts"):
            _require(key in rec, f"images[{k}]: missing key {key!r}")
        image_id = rec["id"]
        _require(isinstance(image_id, str), f"images[{k}]: id must be a string")
        _require(image_id not in images, f"duplicate image id {image_id!r}",
                 InvariantError)
        gts = []
        for j, g in enumerate(rec["gts"]):
            where = f"images[{k}].gts[{j}]"
            _require(isinstance(g, dict) and {"hbox", "obox", "hoi"} <= g.keys(),
                     f"{where}: expected hbox/obox/hoi")
            _require(isinstance(g["hoi"], int) and not isinstance(g["hoi"], bool),
                     f"{where}: hoi must be an integer")
            gts.append(GroundTruthInstance(
                hbox=_as_box(g["hbox"], where + ".hbox"),
                obox=_as_box(g["obox"], where + ".obox"),
                hoi_category=g["hoi"],
            ))
        images[image_id] = ImageRecord(
            image_id=image_id, width=rec["width"], height=rec["height"],
            gts=tuple(gts),
        )
    return DatasetIndex(categories=table, images=images)


def load_dataset(path: str | Path) -> DatasetIndex:
    """Load and validate an annotation file."""
    return dataset_from_dict(load_json(path))


def dataset_to_dict(dataset: DatasetIndex) -> dict:
    """Inverse of dataset_from_dict; round-trips to a structurally equal index."""
    table = dataset.categories
    return {
        "categories": {
            "interactions": list(table.interactions),
            "objects": list(table.objects),
            "hoi": [list(pair) for pair in table.hoi],
            "rare": list(table.rare),
        },
        "images": [
            {
                "id": rec.image_id,
                "width": rec.width,
                "height": rec.height,
                "gts": [
                    {"hbox": gt.hbox.as_list(), "obox": gt.obox.as_list(),
                     "hoi": gt.hoi_category}
                    for gt in rec.gts
                ],
            }
            for rec in dataset.images.values()
        ],
    }


def detections_from_dict(raw: Any, dataset: DatasetIndex | None = None) -> DetectionSet:
    _require(isinstance(raw, dict), "detection file: expected a JSON object")
    for key in ("method", "domain", "detections"):
        _require(key in raw, f"detection file: missing key {key!r}")
    _require(isinstance(raw["method"], str) and isinstance(raw["domain"], str),
             "detection file: method and domain must be strings")
    by_image: dict[str, list[DetectionInstance]] = {}
    for k, d in enumerate(raw["detections"]):
        where = f"detections[{k}]"
        _require(isinstance(d, dict) and
                 {"image_id", "hbox", "obox", "hoi", "score"} <= d.keys(),
                 f"{where}: expected image_id/hbox/obox/hoi/score")
        _require(isinstance(d["hoi"], int) and not isinstance(d["hoi"], bool),
                 f"{where}: hoi must be an integer")
        _require(isinstance(d["score"], (int, float)),
                 f"{where}: score must be numeric")
        det = DetectionInstance(
            image_id=d["image_id"],
            hbox=_as_box(d["hbox"], where + ".hbox"),
            obox=_as_box(d["obox"], where + ".obox"),
            hoi_category=d["hoi"],
            score=float(d["score"]),
        )
        if dataset is not None:
            _require(det.image_id in dataset.images,
                     f"{where}: unknown image id {det.image_id!r}", InvariantError)
            _require(det.hoi_category < dataset.categories.num_categories,
                     f"{where}: hoi category {det.hoi_category} out of range",
                     InvariantError)
        by_image.setdefault(det.image_id, []).append(det)
    return DetectionSet(method=raw["method"], domain=raw["domain"], by_image=by_image)


def load_detections(path: str | Path,
                    dataset: DatasetIndex | None = None) -> DetectionSet:
    """Load a detection file, validating against a dataset when given."""
    return detections_from_dict(load_json(path), dataset)


def detections_to_dict(dets: DetectionSet) -> dict:
    return {
        "method": dets.method,
        "domain": dets.domain,
        "detections": [
            {"image_id": d.image_id, "hbox": d.hbox.as_list(),
             "obox": d.obox.as_list(), "hoi": d.hoi_category, "score": d.score}
            for d in dets.all_detections()
        ],
    }


def manifest_from_dict(raw: Any) -> DomainManifest:
    _require(isinstance(raw, dict), "manifest: expected a JSON object")
    _require("domains" in raw and "copies" in raw,
             "manifest: missing 'domains' or 'copies'")
    _require(isinstance(raw["domains"], list)
             and all(isinstance(d, str) for d in raw["domains"]),
             "manifest.domains: expected a list of strings")
    copies = []
    for k, c in enumerate(raw["copies"]):
        _require(isinstance(c, dict) and {"base", "domain", "path"} <= c.keys(),
                 f"manifest.copies[{k}]: expected base/domain/path")
        copies.append(ManifestEntry(base=c["base"], domain=c["domain"], path=c["path"]))
    return DomainManifest(domains=tuple(raw["domains"]), copies=tuple(copies))


def load_manifest(path: str | Path) -> DomainManifest:
    return manifest_from_dict(load_json(path))


def manifest_to_dict(manifest: DomainManifest) -> dict:
    return {
        "domains": list(manifest.domains),
        "copies": [{"base": e.base, "domain": e.domain, "path": e.path}
                   for e in manifest.copies],
    }


def write_json(path: str | Path, obj: Any) -> None:
    """Canonical JSON writer: sorted keys, fixed layout, trailing newline.

    Identical objects always serialize to identical bytes.
    """
    text = json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False)
    Path(path).write_text(text + "\n", encoding="utf-8")
