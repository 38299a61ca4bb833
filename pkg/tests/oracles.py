"""Independent reference implementations used to cross-check the evaluator.

Everything here is deliberately written on a different substrate than the
package: box geometry goes through shapely polygon clipping instead of
interval arithmetic, and average precision is computed on exact rationals
with the per-recall-step maximum formulation instead of a float precision
envelope.  With integer box coordinates both routes describe the same
rational numbers, so agreement is checked exactly on the decision structure
and to 1e-12 on the final float means.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from shapely.geometry import box as _shapely_box

Box = tuple[int, int, int, int]
# (hbox, obox, category)
OracleGt = tuple[Box, Box, int]
# (hbox, obox, category, score)
OracleDet = tuple[Box, Box, int, float]


def oracle_iou(a: Box, b: Box) -> Fraction:
    """IoU via polygon clipping; exact because integer-corner areas are."""
    pa = _shapely_box(a[0], a[1], a[2], a[3])
    pb = _shapely_box(b[0], b[1], b[2], b[3])
    inter = pa.intersection(pb).area
    union = pa.union(pb).area
    return Fraction(inter) / Fraction(union)


def oracle_pair_overlap(det: OracleDet, gt: OracleGt) -> Fraction:
    return min(oracle_iou(det[0], gt[0]), oracle_iou(det[1], gt[1]))


def oracle_match_flags(dets: Sequence[OracleDet],
                       gts: Sequence[OracleGt],
                       threshold: Fraction = Fraction(1, 2)) -> list[bool]:
    """TP/FP flags in descending-score order (ties keep input order).

    A detection is a true positive iff an unmatched ground truth of the same
    category exceeds the threshold on min-pair IoU; the eligible ground truth
    with the largest overlap (first one on ties) is consumed.
    """
    order = sorted(range(len(dets)), key=lambda i: (-dets[i][3], i))
    taken: set[int] = set()
    flags: list[bool] = []
    for i in order:
        best: Fraction = threshold
        best_j: int | None = None
        for j, gt in enumerate(gts):
            if j in taken or gt[2] != dets[i][2]:
                continue
            overlap = oracle_pair_overlap(dets[i], gt)
            if overlap > best:
                best = overlap
                best_j = j
        if best_j is None:
            flags.append(False)
        else:
            taken.add(best_j)
            flags.append(True)
    return flags


def oracle_ap(flags: Sequence[bool], num_gt: int) -> Fraction:
    """AP = mean over the num_gt recall steps of the best precision at or
    beyond that step.  Exhaustive: every step scans every prefix."""
    if num_gt == 0 or not flags:
        return Fraction(0)
    prefix: list[tuple[int, Fraction]] = []
    tp = 0
    for rank, flag in enumerate(flags, start=1):
        tp += bool(flag)
        prefix.append((tp, Fraction(tp, rank)))
    total = Fraction(0)
    for step in range(1, num_gt + 1):
        reachable = [prec for tp, prec in prefix if tp >= step]
        if reachable:
            total += max(reachable)
    return total / num_gt


class OracleInstance:
    """A toy benchmark: images with GT lists, detections, category table."""

    def __init__(self, num_categories: int, category_objects: Sequence[int],
                 rare: Sequence[bool],
                 images: dict[str, list[OracleGt]],
                 dets: dict[str, list[OracleDet]]) -> None:
        self.num_categories = num_categories
        self.category_objects = list(category_objects)
        self.rare = list(rare)
        self.images = images
        self.dets = dets

    def image_set(self, category: int, setting: str) -> list[str]:
        if setting == "default":
            return list(self.images)
        obj = self.category_objects[category]
        return [img for img, gts in self.images.items()
                if any(self.category_objects[g[2]] == obj for g in gts)]


def oracle_evaluate(inst: OracleInstance, setting: str,
                    ) -> tuple[dict[int, Fraction], Fraction, Fraction, Fraction]:
    """Per-category AP plus Full/Rare/Non-Rare means, all exact rationals."""
    per_cat: dict[int, Fraction] = {}
    for c in range(inst.num_categories):
        eligible = inst.image_set(c, setting)
        num_gt = sum(sum(1 for g in inst.images[img] if g[2] == c)
                     for img in eligible)
        if num_gt == 0:
            continue
        pooled: list[tuple[float, int, bool]] = []
        seq = 0
        for img in inst.images:
            if img not in eligible:
                continue
            cat_dets = [d for d in inst.dets.get(img, []) if d[2] == c]
            if not cat_dets:
                continue
            cat_gts = [g for g in inst.images[img] if g[2] == c]
            flags = oracle_match_flags(cat_dets, cat_gts)
            order = sorted(range(len(cat_dets)),
                           key=lambda i: (-cat_dets[i][3], i))
            for k, i in enumerate(order):
                pooled.append((cat_dets[i][3], seq + i, flags[k]))
            seq += len(cat_dets)
        pooled.sort(key=lambda t: (-t[0], t[1]))
        per_cat[c] = oracle_ap([f for _s, _q, f in pooled], num_gt)

    def mean(ids: list[int]) -> Fraction:
        if not ids:
            return Fraction(0)
        return sum((per_cat[c] for c in ids), Fraction(0)) / len(ids)

    evaluated = sorted(per_cat)
    rare_ids = [c for c in evaluated if inst.rare[c]]
    nonrare_ids = [c for c in evaluated if not inst.rare[c]]
    return per_cat, mean(evaluated), mean(rare_ids), mean(nonrare_ids)
