"""Shared builders: toy benchmarks in both package and oracle form."""
from __future__ import annotations

import random
from typing import Sequence

from hoirobust.core import (
    BoundingBox,
    DatasetIndex,
    DetectionInstance,
    DetectionSet,
    GroundTruthInstance,
    HoiCategoryTable,
    ImageRecord,
)
from oracles import OracleDet, OracleGt, OracleInstance

BOUND = 16  # toy image side; integer box corners keep rational IoUs exact


def make_table(category_objects: Sequence[int],
               rare: Sequence[bool]) -> HoiCategoryTable:
    """One interaction per category, so (interaction, object) pairs stay unique."""
    n_obj = max(category_objects) + 1
    return HoiCategoryTable(
        interactions=tuple(f"act_{c}" for c in range(len(category_objects))),
        objects=tuple(f"obj_{o}" for o in range(n_obj)),
        hoi=tuple((c, category_objects[c])
                  for c in range(len(category_objects))),
        rare=tuple(rare),
    )


def _rand_box(rng: random.Random) -> tuple[int, int, int, int]:
    x1 = rng.randrange(0, BOUND - 1)
    y1 = rng.randrange(0, BOUND - 1)
    x2 = rng.randrange(x1 + 1, BOUND + 1)
    y2 = rng.randrange(y1 + 1, BOUND + 1)
    return x1, y1, x2, y2


def _near_box(rng: random.Random,
              box: tuple[int, int, int, int]) -> tuple[int, int, int, int]:
    x1, y1, x2, y2 = box
    for _ in range(8):
        jittered = (x1 + rng.randint(-2, 2), y1 + rng.randint(-2, 2),
                    x2 + rng.randint(-2, 2), y2 + rng.randint(-2, 2))
        if 0 <= jittered[0] < jittered[2] <= BOUND \
                and 0 <= jittered[1] < jittered[3] <= BOUND:
            return jittered
    return box


def to_package(inst: OracleInstance) -> tuple[DatasetIndex, DetectionSet]:
    """Package-side twin of an oracle instance, preserving input order."""
    table = make_table(inst.category_objects, inst.rare)
    records: dict[str, ImageRecord] = {}
    for img, gts in inst.images.items():
        records[img] = ImageRecord(
            image_id=img, width=BOUND, height=BOUND,
            gts=tuple(GroundTruthInstance(
                hbox=BoundingBox(*map(float, g[0])),
                obox=BoundingBox(*map(float, g[1])),
                hoi_category=g[2]) for g in gts))
    by_image: dict[str, list[DetectionInstance]] = {}
    for img, dets in inst.dets.items():
        if dets:
            by_image[img] = [DetectionInstance(
                image_id=img,
                hbox=BoundingBox(*map(float, d[0])),
                obox=BoundingBox(*map(float, d[1])),
                hoi_category=d[2], score=d[3]) for d in dets]
    return (DatasetIndex(categories=table, images=records),
            DetectionSet(method="toy", domain="original", by_image=by_image))


def random_instance(rng: random.Random,
                    ) -> tuple[OracleInstance, DatasetIndex, DetectionSet]:
    """A small random benchmark: <=5 images, <=6 detections, <=3 categories.

    Scores come from a coarse grid so ties are common, and most detections
    are jittered copies of ground-truth boxes so matches actually occur.
    """
    num_cat = rng.randint(1, 3)
    category_objects = [rng.randrange(0, 2) for _ in range(num_cat)]
    rare = [rng.random() < 0.5 for _ in range(num_cat)]
    images: dict[str, list[OracleGt]] = {}
    for k in range(rng.randint(1, 5)):
        images[f"im{k}"] = [
            (_rand_box(rng), _rand_box(rng), rng.randrange(num_cat))
            for _ in range(rng.randint(0, 3))]
    score_grid = [round(0.1 * s, 1) for s in range(1, 10)]
    dets: dict[str, list[OracleDet]] = {img: [] for img in images}
    for _ in range(rng.randint(0, 6)):
        img = rng.choice(list(images))
        gts = images[img]
        if gts and rng.random() < 0.7:
            src = rng.choice(gts)
            hbox = src[0] if rng.random() < 0.5 else _near_box(rng, src[0])
            obox = src[1] if rng.random() < 0.5 else _near_box(rng, src[1])
            cat = src[2] if rng.random() < 0.8 else rng.randrange(num_cat)
        else:
            hbox, obox, cat = _rand_box(rng), _rand_box(rng), rng.randrange(num_cat)
        dets[img].append((hbox, obox, cat, rng.choice(score_grid)))
    inst = OracleInstance(num_cat, category_objects, rare, images, dets)
    dataset, detset = to_package(inst)
    return inst, dataset, detset


def error_fixture() -> tuple[DatasetIndex, DetectionSet]:
    """One image, two GT pairs, seven detections: one true positive plus one
    false positive per attribution outcome exercised (duplicate, interaction,
    object, both, object localization, background), with one missed GT."""
    table = HoiCategoryTable(
        interactions=("hold", "ride", "wash"),
        objects=("bicycle", "motorcycle"),
        hoi=((1, 0), (2, 0), (1, 1), (0, 1)),
        rare=(False, False, False, False),
    )
    h0, o0 = (10, 10, 30, 30), (40, 10, 60, 30)
    h1, o1 = (10, 60, 30, 80), (40, 60, 60, 80)
    record = ImageRecord(
        image_id="im", width=100, height=100,
        gts=(GroundTruthInstance(BoundingBox(*map(float, h0)),
                                 BoundingBox(*map(float, o0)), 0),
             GroundTruthInstance(BoundingBox(*map(float, h1)),
                                 BoundingBox(*map(float, o1)), 2)))
    rows = [
        (h0, o0, 0, 0.99),                        # matches the first GT
        (h0, o0, 0, 0.90),                        # duplicate of it
        (h0, o0, 1, 0.85),                        # wrong interaction
        (h0, o0, 2, 0.80),                        # wrong object
        (h0, o0, 3, 0.75),                        # both components wrong
        (h0, (70, 70, 90, 90), 0, 0.70),          # object box drifted away
        ((70, 10, 90, 30), (70, 40, 90, 55), 0, 0.65),  # hits nothing
    ]
    dets = [DetectionInstance("im", BoundingBox(*map(float, h)),
                              BoundingBox(*map(float, o)), c, s)
            for h, o, c, s in rows]
    return (DatasetIndex(categories=table, images={"im": record}),
            DetectionSet(method="toy", domain="original",
                         by_image={"im": dets}))


def filter_fixture():
    """Five base samples, one discard per stage plus one survivor.

    Returns (manifest, dataset, scores): base0 passes everything, base1 fails
    the vision-language gate on fog, base2's fog detections disagree with the
    original, base3 carries a tiny box, base4 is for the manual list.
    """
    from hoirobust.benchfilter import FilterScores, ObjectDetection
    from hoirobust.core import DomainManifest, ManifestEntry

    domains = ("fog", "rain")
    big = BoundingBox(10.0, 10.0, 40.0, 40.0)
    big2 = BoundingBox(50.0, 50.0, 80.0, 80.0)
    tiny = BoundingBox(10.0, 10.0, 15.0, 15.0)  # 25 px of 10000: below 0.005
    table = make_table([0], [False])
    images = {}
    for k in range(5):
        obox = tiny if k == 3 else big2
        images[f"base{k}"] = ImageRecord(
            image_id=f"base{k}", width=100, height=100,
            gts=(GroundTruthInstance(hbox=big, obox=obox, hoi_category=0),))
    dataset = DatasetIndex(categories=table, images=images)

    manifest = DomainManifest(
        domains=domains,
        copies=tuple(ManifestEntry(base=f"base{k}", domain=d,
                                   path=f"{d}/base{k}.png")
                     for k in range(5) for d in domains))

    vl_scores = {(f"base{k}", d): 0.9 for k in range(5) for d in domains}
    vl_scores["base1", "fog"] = 0.2

    person = ObjectDetection(cls="person", box=big, score=0.9)
    drifted = ObjectDetection(cls="person",
                              box=BoundingBox(60.0, 60.0, 90.0, 90.0),
                              score=0.9)
    detections = {}
    for k in range(5):
        for domain in ("original",) + domains:
            detections[f"base{k}", domain] = (person,)
    detections["base2", "fog"] = (drifted,)
    scores = FilterScores(vl_scores=vl_scores, detections=detections)
    return manifest, dataset, scores


def perfect_pair() -> tuple[DatasetIndex, DetectionSet]:
    """Every GT echoed as a detection (exact boxes, distinct scores), plus one
    category with no ground truth at all."""
    table = make_table([0, 1, 0, 1], [False, True, False, True])
    gts = {
        "im0": [((1, 1, 5, 6), (4, 2, 9, 8), 0),
                ((2, 3, 7, 9), (8, 1, 12, 6), 1),
                ((1, 1, 5, 6), (4, 2, 9, 8), 0)],
        "im1": [((0, 0, 6, 6), (6, 6, 12, 12), 2),
                ((3, 2, 8, 10), (9, 4, 14, 11), 1)],
    }
    records = {}
    by_image: dict[str, list[DetectionInstance]] = {}
    score = 0.95
    for img, triples in gts.items():
        records[img] = ImageRecord(
            image_id=img, width=BOUND, height=BOUND,
            gts=tuple(GroundTruthInstance(
                hbox=BoundingBox(*map(float, h)),
                obox=BoundingBox(*map(float, o)),
                hoi_category=c) for h, o, c in triples))
        by_image[img] = [DetectionInstance(
            image_id=img, hbox=BoundingBox(*map(float, h)),
            obox=BoundingBox(*map(float, o)), hoi_category=c,
            score=round(score - 0.07 * k, 4))
            for k, (h, o, c) in enumerate(triples)]
        score -= 0.02
    return (DatasetIndex(categories=table, images=records),
            DetectionSet(method="perfect", domain="original",
                         by_image=by_image))
