"""False-positive attribution by sub-task error type.

Every false positive is assigned to exactly one of eight types by the first
matching rule in a fixed priority order; unmatched ground truths are counted
separately as misses.  The taxonomy is this artifact's own definition (built
around the interaction-classification / object-classification / localization
sub-tasks), emitted alongside results so downstream charts are reproducible.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Sequence

from .core import (
    ConfigError,
    DatasetIndex,
    DetectionInstance,
    DetectionSet,
    GroundTruthInstance,
    HoiCategoryTable,
)
from .evaluation import SETTINGS, iou, match_image


class ErrorType(str, Enum):
    DUPLICATE = "duplicate"
    INTERACTION_CLS = "interaction_cls"
    OBJECT_CLS = "object_cls"
    BOTH_CLS = "both_cls"
    HUMAN_LOC = "human_loc"
    OBJECT_LOC = "object_loc"
    ASSOCIATION = "association"
    BACKGROUND = "background"


# Display and priority order of the attribution rules.
ERROR_TYPES: tuple[ErrorType, ...] = (
    ErrorType.DUPLICATE,
    ErrorType.INTERACTION_CLS,
    ErrorType.OBJECT_CLS,
    ErrorType.BOTH_CLS,
    ErrorType.HUMAN_LOC,
    ErrorType.OBJECT_LOC,
    ErrorType.ASSOCIATION,
    ErrorType.BACKGROUND,
)

TAXONOMY_NOTE = ("artifact-defined taxonomy: duplicate > interaction_cls > "
                 "object_cls > both_cls > human_loc > object_loc > "
                 "association > background")


def _min_pair_iou(fp: DetectionInstance, gt: GroundTruthInstance) -> float:
    return min(iou(fp.hbox, gt.hbox), iou(fp.obox, gt.obox))


def attribute_error(fp: DetectionInstance,
                    gts: Sequence[GroundTruthInstance],
                    table: HoiCategoryTable,
                    iou_threshold: float = 0.5,
                    consumed: Sequence[bool] | None = None) -> ErrorType:
    """Assign one error type to a detection the evaluator judged FP.

    `gts` is the full ground-truth list of the image (all categories);
    `consumed` marks, aligned with `gts`, which pairs the evaluator's
    matching already consumed (needed by the duplicate rule).  Rules, first
    match wins:

    1. duplicate: a same-category GT passes the min-pair IoU test but is
       already consumed.
    2. interaction_cls: boxes pass min-pair IoU against a GT with the same
       object class but a different interaction.
    3. object_cls: boxes pass, interaction matches, object class differs.
    4. both_cls: boxes pass, both components differ.
    5. human_loc / 6. object_loc: against the best same-category GT pair,
       exactly one of the two boxes fails its IoU test.
    7. association: the human box matches one GT pair and the object box a
       different GT pair.
    8. background: anything else.
    """
    if consumed is None:
        consumed = [False] * len(gts)
    if len(consumed) != len(gts):
        raise ConfigError("consumed flags not aligned with gts")

    fp_inter = table.interaction_of(fp.hoi_category)
    fp_obj = table.object_of(fp.hoi_category)

    inter_cls = obj_cls = both_cls = False
    for j, gt in enumerate(gts):
        passes = _min_pair_iou(fp, gt) > iou_threshold
        if not passes:
            continue
        if gt.hoi_category == fp.hoi_category:
            if consumed[j]:
                return ErrorType.DUPLICATE
            continue
        same_inter = table.interaction_of(gt.hoi_category) == fp_inter
        same_obj = table.object_of(gt.hoi_category) == fp_obj
        if same_obj and not same_inter:
            inter_cls = True
        elif same_inter and not same_obj:
            obj_cls = True
        elif not same_inter and not same_obj:
            both_cls = True
    if inter_cls:
        return ErrorType.INTERACTION_CLS
    if obj_cls:
        return ErrorType.OBJECT_CLS
    if both_cls:
        return ErrorType.BOTH_CLS

    same_cat = [gt for gt in gts if gt.hoi_category == fp.hoi_category]
    if same_cat:
        best = max(same_cat, key=lambda gt: _min_pair_iou(fp, gt))
        h_ok = iou(fp.hbox, best.hbox) > iou_threshold
        o_ok = iou(fp.obox, best.obox) > iou_threshold
        if h_ok != o_ok:
            return ErrorType.OBJECT_LOC if h_ok else ErrorType.HUMAN_LOC

    h_hit = any(iou(fp.hbox, gt.hbox) > iou_threshold for gt in gts)
    o_hit = any(iou(fp.obox, gt.obox) > iou_threshold for gt in gts)
    if h_hit and o_hit:
        return ErrorType.ASSOCIATION
    return ErrorType.BACKGROUND


@dataclass(frozen=True)
class ErrorBreakdown:
    """Counts per error type plus the missed ground-truth total."""

    counts: dict[ErrorType, int]
    total_fp: int
    missed_gt: int

    def percentages(self) -> dict[ErrorType, float]:
        """Share of each type among false positives; zeros when there are none."""
        if self.total_fp == 0:
            return {t: 0.0 for t in ERROR_TYPES}
        return {t: 100.0 * self.counts.get(t, 0) / self.total_fp
                for t in ERROR_TYPES}

    def to_dict(self) -> dict:
        return {
            "taxonomy": TAXONOMY_NOTE,
            "counts": {t.value: self.counts.get(t, 0) for t in ERROR_TYPES},
            "percentages": {t.value: p for t, p in self.percentages().items()},
            "total_fp": self.total_fp,
            "missed_gt": self.missed_gt,
        }


def breakdown_from_dict(raw: dict) -> ErrorBreakdown:
    counts = {ErrorType(name): int(n) for name, n in raw["counts"].items()}
    return ErrorBreakdown(counts=counts, total_fp=int(raw["total_fp"]),
                          missed_gt=int(raw["missed_gt"]))


def breakdown(dataset: DatasetIndex, dets: DetectionSet,
              table: HoiCategoryTable | None = None,
              setting: str = "default",
              iou_threshold: float = 0.5) -> ErrorBreakdown:
    """Run evaluator matching over the dataset and attribute every FP."""
    if setting not in SETTINGS:
        raise ConfigError(f"setting must be one of {SETTINGS}, got {setting!r}")
    if table is None:
        table = dataset.categories
    counts: dict[ErrorType, int] = {t: 0 for t in ERROR_TYPES}
    total_fp = 0
    missed = 0
    for image_id, rec in dataset.images.items():
        image_dets = dets.by_image.get(image_id, [])
        cats = sorted({d.hoi_category for d in image_dets}
                      | {g.hoi_category for g in rec.gts})
        gts = list(rec.gts)
        for c in cats:
            if setting == "known_object":
                obj = table.object_of(c)
                if all(table.object_of(g.hoi_category) != obj for g in gts):
                    continue  # image outside this category's evaluated set
            cat_dets = [d for d in image_dets if d.hoi_category == c]
            cat_gts = [(j, g) for j, g in enumerate(gts) if g.hoi_category == c]
            result = match_image(cat_dets, [g for _j, g in cat_gts],
                                 category=c, iou_threshold=iou_threshold)
            consumed = [False] * len(gts)
            for local in result.matched_gt:
                if local is not None:
                    consumed[cat_gts[local][0]] = True
            missed += len(cat_gts) - result.num_tp()
            for k, det_idx in enumerate(result.order):
                if result.true_positive[k]:
                    continue
                total_fp += 1
                counts[attribute_error(cat_dets[det_idx], gts, table,
                                       iou_threshold, consumed)] += 1
    return ErrorBreakdown(counts=counts, total_fp=total_fp, missed_gt=missed)


def compare_domains(base: ErrorBreakdown,
                    shifted: ErrorBreakdown) -> dict[ErrorType, float | None]:
    """Percentage-point delta (shifted - base) per type.

    Deltas are undefined (None) when either side has no false positives at
    all, since its percentages carry no information.
    """
    if base.total_fp == 0 or shifted.total_fp == 0:
        return {t: None for t in ERROR_TYPES}
    bp = base.percentages()
    sp = shifted.percentages()
    return {t: sp[t] - bp[t] for t in ERROR_TYPES}
