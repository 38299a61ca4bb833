"""Triplet average-precision evaluation for HOI detection.

A predicted triplet counts as a true positive only when its human box and its
object box both overlap an unmatched ground-truth pair of the same category
with IoU strictly above the threshold; each ground-truth pair can satisfy at
most one detection.  Per-category AP uses the continuous precision envelope.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .core import (
    BoundingBox,
    ConfigError,
    DatasetIndex,
    DetectionInstance,
    DetectionSet,
    GroundTruthInstance,
    HoiCategoryTable,
)

SETTINGS = ("default", "known_object")


def iou(a: BoundingBox, b: BoundingBox) -> float:
    """Intersection over union of two boxes; 0.0 when disjoint."""
    iw = min(a.x2, b.x2) - max(a.x1, b.x1)
    ih = min(a.y2, b.y2) - max(a.y1, b.y1)
    if iw <= 0 or ih <= 0:
        return 0.0
    inter = iw * ih
    return inter / (a.area + b.area - inter)


@dataclass(frozen=True)
class MatchResult:
    """Outcome of matching one image's detections of one category.

    All three tuples are aligned: ``order[k]`` is the index of the k-th
    processed detection in the input list (descending score, ties in input
    order), ``true_positive[k]`` its verdict, ``matched_gt[k]`` the index of
    the ground-truth pair it consumed (None for false positives).
    """

    order: tuple[int, ...]
    true_positive: tuple[bool, ...]
    matched_gt: tuple[int | None, ...]

    def num_tp(self) -> int:
        return sum(self.true_positive)


def match_image(dets: Sequence[DetectionInstance],
                gts: Sequence[GroundTruthInstance],
                category: int | None = None,
                iou_threshold: float = 0.5) -> MatchResult:
    """Greedy per-image matching of detections against ground truth.

    Detections are processed in descending score order.  A detection is a
    true positive iff some still-unmatched GT of its category has
    min(iou(h, h'), iou(o, o')) > iou_threshold; among eligible GTs the one
    maximizing the min-pair IoU is consumed.  Inputs are expected to be
    pre-filtered to a single category; when `category` is given this is
    checked.
    """
    if not 0 < iou_threshold < 1:
        raise ConfigError(f"iou_threshold must be in (0,1), got {iou_threshold}")
    if category is not None:
        for d in dets:
            if d.hoi_category != category:
                raise ConfigError(f"detection category {d.hoi_category} != {category}")
        for g in gts:
            if g.hoi_category != category:
                raise ConfigError(f"gt category {g.hoi_category} != {category}")

    order = sorted(range(len(dets)), key=lambda i: -dets[i].score)
    consumed = [False] * len(gts)
    flags: list[bool] = []
    matched: list[int | None] = []
    for i in order:
        det = dets[i]
        best_gt: int | None = None
        best_overlap = iou_threshold
        for j, gt in enumerate(gts):
            if consumed[j] or gt.hoi_category != det.hoi_category:
                continue
            overlap = min(iou(det.hbox, gt.hbox), iou(det.obox, gt.obox))
            if overlap > best_overlap:
                best_overlap = overlap
                best_gt = j
        if best_gt is not None:
            consumed[best_gt] = True
            flags.append(True)
            matched.append(best_gt)
        else:
            flags.append(False)
            matched.append(None)
    return MatchResult(order=tuple(order), true_positive=tuple(flags),
                       matched_gt=tuple(matched))


def average_precision(flags: Sequence[bool], num_gt: int) -> float:
    """AP from an ordered TP/FP list: area under the precision envelope.

    `flags` must already be sorted by descending score.  Precision at each
    recall point is replaced by the maximum precision at that recall or
    higher before integrating.  Returns 0.0 when num_gt is 0 by convention
    (such categories are excluded from means upstream).
    """
    if num_gt < 0:
        raise ConfigError(f"num_gt must be >= 0, got {num_gt}")
    if num_gt == 0 or len(flags) == 0:
        return 0.0
    tp = np.cumsum(np.asarray(flags, dtype=np.float64))
    ranks = np.arange(1, len(flags) + 1, dtype=np.float64)
    recall = tp / num_gt
    precision = tp / ranks
    envelope = np.maximum.accumulate(precision[::-1])[::-1]
    # recall only increases at TP positions; integrate the envelope there
    prev = np.concatenate(([0.0], recall[:-1]))
    return float(np.sum((recall - prev) * envelope))


@dataclass(frozen=True)
class EvalReport:
    """Per-category APs and their Full/Rare/Non-Rare means for one setting."""

    setting: str
    iou_threshold: float
    per_category_ap: dict[int, float]
    map_full: float
    map_rare: float
    map_nonrare: float
    zero_gt_categories: tuple[int, ...]

    def to_dict(self) -> dict:
        return {
            "setting": self.setting,
            "iou_threshold": self.iou_threshold,
            "per_category_ap": {str(c): ap for c, ap in self.per_category_ap.items()},
            "map_full": self.map_full,
            "map_rare": self.map_rare,
            "map_nonrare": self.map_nonrare,
            "zero_gt_categories": list(self.zero_gt_categories),
        }


def _mean(values: Iterable[float]) -> float:
    vals = list(values)
    return float(sum(vals) / len(vals)) if vals else 0.0


def evaluate(dataset: DatasetIndex, dets: DetectionSet,
             setting: str = "default", iou_threshold: float = 0.5) -> EvalReport:
    """Per-category triplet AP over the image set the setting dictates.

    Default: every category is evaluated on all images.  Known-object: each
    category is evaluated only on images whose annotations contain its
    target object class.  Categories with zero ground truth in their image
    set are excluded from all means and listed in the report.
    """
    if setting not in SETTINGS:
        raise ConfigError(f"setting must be one of {SETTINGS}, got {setting!r}")
    table = dataset.categories
    all_ids = list(dataset.images)

    # group ground truths and detections by category up front
    gts_by_cat: dict[int, dict[str, list[GroundTruthInstance]]] = {}
    for rec in dataset.images.values():
        for gt in rec.gts:
            gts_by_cat.setdefault(gt.hoi_category, {}).setdefault(
                rec.image_id, []).append(gt)
    dets_by_cat: dict[int, dict[str, list[DetectionInstance]]] = {}
    for image_id, image_dets in dets.by_image.items():
        for det in image_dets:
            dets_by_cat.setdefault(det.hoi_category, {}).setdefault(
                image_id, []).append(det)

    images_with_obj: dict[int, set[str]] = {}
    if setting == "known_object":
        for obj in range(len(table.objects)):
            images_with_obj[obj] = set(dataset.images_with_object(obj))

    per_category_ap: dict[int, float] = {}
    zero_gt: list[int] = []
    for c in range(table.num_categories):
        if setting == "default":
            image_set = set(all_ids)
        else:
            image_set = images_with_obj[table.object_of(c)]
        cat_gts = gts_by_cat.get(c, {})
        num_gt = sum(len(g) for img, g in cat_gts.items() if img in image_set)
        if num_gt == 0:
            zero_gt.append(c)
            continue
        # per-image matching, then pool flags across images by score
        pooled: list[tuple[float, int, bool]] = []
        seq = 0
        cat_dets = dets_by_cat.get(c, {})
        for image_id in all_ids:
            if image_id not in image_set:
                continue
            image_dets = cat_dets.get(image_id, [])
            if not image_dets:
                continue
            result = match_image(image_dets, cat_gts.get(image_id, []),
                                 category=c, iou_threshold=iou_threshold)
            for k, det_idx in enumerate(result.order):
                pooled.append((image_dets[det_idx].score, seq + det_idx,
                               result.true_positive[k]))
            seq += len(image_dets)
        pooled.sort(key=lambda t: (-t[0], t[1]))
        per_category_ap[c] = average_precision([tp for _s, _q, tp in pooled], num_gt)

    rare = set(table.rare_ids())
    evaluated = per_category_ap.keys()
    return EvalReport(
        setting=setting,
        iou_threshold=iou_threshold,
        per_category_ap=per_category_ap,
        map_full=_mean(per_category_ap.values()),
        map_rare=_mean(per_category_ap[c] for c in evaluated if c in rare),
        map_nonrare=_mean(per_category_ap[c] for c in evaluated if c not in rare),
        zero_gt_categories=tuple(zero_gt),
    )
