"""Sample-filtering decisions for multi-domain benchmark construction.

Four stages decide which base samples survive: a vision-language relevance
threshold over every domain copy, object-detection consistency between each
copy and the original, a small-object size gate on the annotations, and a
manual exclusion list.  Discarding a base sample removes it from every
domain; each discard records the first stage that failed it.  All scores and
detections arrive as files, so no model runs inside this package.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import math

from .core import (
    BoundingBox,
    ConfigError,
    DatasetIndex,
    DomainManifest,
    ImageRecord,
    InvariantError,
    SchemaError,
    load_json,
)
from .evaluation import iou

ORIGINAL_DOMAIN = "original"

STAGE_VL = "vl"
STAGE_CONSISTENCY = "consistency"
STAGE_SMALL_OBJECT = "small_object"
STAGE_MANUAL = "manual"


@dataclass(frozen=True)
class FilterThresholds:
    tau_vl: float = 0.25
    tau_f1: float = 0.5
    min_area_ratio: float = 0.005
    iou_threshold: float = 0.5

    def __post_init__(self) -> None:
        if not 0.0 <= self.tau_vl <= 1.0:
            raise ConfigError(f"tau_vl must be in [0,1], got {self.tau_vl}")
        if not 0.0 <= self.tau_f1 <= 1.0:
            raise ConfigError(f"tau_f1 must be in [0,1], got {self.tau_f1}")
        if not 0.0 <= self.min_area_ratio <= 1.0:
            raise ConfigError(f"min_area_ratio must be in [0,1], "
                              f"got {self.min_area_ratio}")
        if not 0.0 < self.iou_threshold < 1.0:
            raise ConfigError(f"iou_threshold must be in (0,1), "
                              f"got {self.iou_threshold}")

    def to_dict(self) -> dict:
        return {"tau_vl": self.tau_vl, "tau_f1": self.tau_f1,
                "min_area_ratio": self.min_area_ratio,
                "iou_threshold": self.iou_threshold}


@dataclass(frozen=True)
class ObjectDetection:
    """A plain object detection used by the consistency stage."""

    cls: str
    box: BoundingBox
    score: float


@dataclass(frozen=True)
class FilterScores:
    """Externally supplied evidence: VL scores and per-domain detections.

    Both maps are keyed by (base id, domain); the unshifted pass uses the
    reserved domain name "original".
    """

    vl_scores: dict[tuple[str, str], float]
    detections: dict[tuple[str, str], tuple[ObjectDetection, ...]]

    def __post_init__(self) -> None:
        for key, score in self.vl_scores.items():
            if not math.isfinite(score):
                raise InvariantError(f"vl score for {key} is not finite")


@dataclass(frozen=True)
class FilterDecision:
    kept: frozenset[str]
    discarded: dict[str, str]

    def __post_init__(self) -> None:
        overlap = self.kept & self.discarded.keys()
        if overlap:
            raise InvariantError(f"ids both kept and discarded: {sorted(overlap)}")

    def to_dict(self) -> dict:
        return {"kept": sorted(self.kept), "discarded": dict(sorted(
            self.discarded.items()))}


def vl_alignment_filter(scores: FilterScores, tau_vl: float,
                        base_ids: Sequence[str] | None = None,
                        domains: Sequence[str] | None = None,
                        ) -> dict[str, bool]:
    """Per-base verdict: True = keep.  A base fails if any copy scores low.

    When `base_ids` and `domains` are given, every (base, domain) pair must
    be scored; a missing pair is an error naming it.  Otherwise the verdict
    covers the bases present in the score map.
    """
    grouped: dict[str, list[float]] = {}
    if base_ids is not None and domains is not None:
        for base in base_ids:
            for domain in domains:
                if (base, domain) not in scores.vl_scores:
                    raise InvariantError(f"missing vl score for "
                                         f"({base!r}, {domain!r})")
                grouped.setdefault(base, []).append(scores.vl_scores[base, domain])
    else:
        for (base, _domain), score in scores.vl_scores.items():
            grouped.setdefault(base, []).append(score)
    return {base: all(s >= tau_vl for s in vals) for base, vals in grouped.items()}


def match_f1(base_dets: Sequence[ObjectDetection],
             domain_dets: Sequence[ObjectDetection],
             iou_threshold: float = 0.5) -> float:
    """F1 of greedy class-aware box matching between two detection lists.

    Candidate pairs share a class and overlap above the IoU threshold;
    greedy selection takes pairs by descending IoU, consuming both sides.
    Two empty lists are perfectly consistent (F1 = 1).
    """
    if not base_dets and not domain_dets:
        return 1.0
    candidates = []
    for i, a in enumerate(base_dets):
        for j, b in enumerate(domain_dets):
            if a.cls != b.cls:
                continue
            overlap = iou(a.box, b.box)
            if overlap > iou_threshold:
                candidates.append((overlap, i, j))
    candidates.sort(key=lambda t: (-t[0], t[1], t[2]))
    used_a: set[int] = set()
    used_b: set[int] = set()
    matches = 0
    for _overlap, i, j in candidates:
        if i in used_a or j in used_b:
            continue
        used_a.add(i)
        used_b.add(j)
        matches += 1
    return 2.0 * matches / (len(base_dets) + len(domain_dets))


def object_consistency_filter(base_dets: Sequence[ObjectDetection],
                              domain_dets: Sequence[ObjectDetection],
                              iou_threshold: float = 0.5,
                              tau_f1: float = 0.5) -> bool:
    """True = the copy's detections are consistent with the original's."""
    return match_f1(base_dets, domain_dets, iou_threshold) >= tau_f1


def small_object_filter(record: ImageRecord, min_area_ratio: float) -> bool:
    """True = keep.  Fails when any GT box is below the area ratio."""
    image_area = record.width * record.height
    for gt in record.gts:
        for box in (gt.hbox, gt.obox):
            if box.area / image_area < min_area_ratio:
                return False
    return True


def apply_filters(manifest: DomainManifest, dataset: DatasetIndex,
                  scores: FilterScores, thresholds: FilterThresholds,
                  manual_exclusions: Iterable[str] = ()) -> FilterDecision:
    """Run all stages in order vl -> consistency -> small_object -> manual.

    Reasons record the first failing stage; later stages never overwrite an
    earlier discard.  The decision applies to every base id in the dataset.
    """
    base_ids = list(dataset.images)
    discarded: dict[str, str] = {}

    vl_verdicts = vl_alignment_filter(scores, thresholds.tau_vl,
                                      base_ids=base_ids,
                                      domains=list(manifest.domains))
    for base in base_ids:
        if not vl_verdicts[base]:
            discarded[base] = STAGE_VL

    for base in base_ids:
        if base in discarded:
            continue
        if (base, ORIGINAL_DOMAIN) not in scores.detections:
            raise InvariantError(f"missing detections for "
                                 f"({base!r}, {ORIGINAL_DOMAIN!r})")
        original = scores.detections[base, ORIGINAL_DOMAIN]
        for domain in manifest.domains:
            if (base, domain) not in scores.detections:
                raise InvariantError(f"missing detections for "
                                     f"({base!r}, {domain!r})")
            if not object_consistency_filter(original,
                                             scores.detections[base, domain],
                                             thresholds.iou_threshold,
                                             thresholds.tau_f1):
                discarded[base] = STAGE_CONSISTENCY
                break

    for base in base_ids:
        if base not in discarded and not small_object_filter(
                dataset.images[base], thresholds.min_area_ratio):
            discarded[base] = STAGE_SMALL_OBJECT

    manual = set(manual_exclusions)
    for base in base_ids:
        if base in manual and base not in discarded:
            discarded[base] = STAGE_MANUAL

    kept = frozenset(b for b in base_ids if b not in discarded)
    return FilterDecision(kept=kept, discarded=discarded)


def filtered_manifest(manifest: DomainManifest,
                      decision: FilterDecision) -> DomainManifest:
    """Manifest with every copy of every discarded base removed."""
    copies = tuple(e for e in manifest.copies if e.base not in decision.discarded)
    return DomainManifest(domains=manifest.domains, copies=copies)


# ---------------------------------------------------------------------------
# file formats (documented in the README; the manifest and dataset formats
# live in core)

def load_vl_scores(path: str | Path) -> dict[tuple[str, str], float]:
    """{"scores": [{"base": str, "domain": str, "score": float}, ...]}"""
    raw = load_json(path)
    if not isinstance(raw, dict) or "scores" not in raw:
        raise SchemaError(f"{path}: expected an object with 'scores'")
    out: dict[tuple[str, str], float] = {}
    for k, item in enumerate(raw["scores"]):
        if not isinstance(item, dict) or \
                not {"base", "domain", "score"} <= item.keys():
            raise SchemaError(f"{path}: scores[{k}] needs base/domain/score")
        out[item["base"], item["domain"]] = float(item["score"])
    return out


def load_object_detections(path: str | Path,
                           ) -> tuple[str, dict[str, tuple[ObjectDetection, ...]]]:
    """{"domain": str, "detections": [{"base": str, "objects": [...]}, ...]}

    Each object is {"cls": str, "box": [x1,y1,x2,y2], "score": float}.
    Returns (domain, base id -> detections).
    """
    raw = load_json(path)
    if not isinstance(raw, dict) or "domain" not in raw or "detections" not in raw:
        raise SchemaError(f"{path}: expected an object with 'domain' and "
                          f"'detections'")
    per_base: dict[str, tuple[ObjectDetection, ...]] = {}
    for k, item in enumerate(raw["detections"]):
        if not isinstance(item, dict) or not {"base", "objects"} <= item.keys():
            raise SchemaError(f"{path}: detections[{k}] needs base/objects")
        objs = []
        for j, o in enumerate(item["objects"]):
            if not isinstance(o, dict) or not {"cls", "box", "score"} <= o.keys():
                raise SchemaError(f"{path}: detections[{k}].objects[{j}] "
                                  f"needs cls/box/score")
            b = o["box"]
            objs.append(ObjectDetection(
                cls=str(o["cls"]),
                box=BoundingBox(float(b[0]), float(b[1]), float(b[2]), float(b[3])),
                score=float(o["score"])))
        per_base[item["base"]] = tuple(objs)
    return raw["domain"], per_base


def load_exclusion_list(path: str | Path) -> list[str]:
    """Plain text, one base id per line; blank lines and # comments ignored."""
    ids: list[str] = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        stripped = line.strip()
        if stripped and not stripped.startswith("#"):
            ids.append(stripped)
    return ids
