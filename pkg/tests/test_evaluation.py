"""Triplet matching and average precision, cross-checked against an
independent rational-arithmetic reference."""
import random

import pytest
from hypothesis import given, assume, settings, strategies as st

from hoirobust.core import (
    BoundingBox,
    ConfigError,
    DetectionInstance,
    DetectionSet,
    GroundTruthInstance,
)
from hoirobust.evaluation import (
    average_precision,
    evaluate,
    iou,
    match_image,
)
from conftest import make_table, perfect_pair, random_instance, to_package
from oracles import oracle_evaluate


def B(*coords):
    return BoundingBox(*map(float, coords))


def det(hbox, obox, cat, score, image_id="im"):
    return DetectionInstance(image_id=image_id, hbox=B(*hbox), obox=B(*obox),
                             hoi_category=cat, score=score)


def gt(hbox, obox, cat):
    return GroundTruthInstance(hbox=B(*hbox), obox=B(*obox), hoi_category=cat)


class TestIou:
    def test_hand_values(self):
        assert iou(B(0, 0, 2, 2), B(1, 0, 3, 2)) == pytest.approx(1 / 3)
        assert iou(B(0, 0, 4, 4), B(0, 0, 4, 4)) == 1.0
        assert iou(B(0, 0, 2, 2), B(2, 2, 4, 4)) == 0.0
        assert iou(B(0, 0, 1, 1), B(0, 0, 2, 1)) == 0.5
        # no edge-inclusive +1 correction: 1x1 inside 3x3 gives exactly 1/9
        assert iou(B(0, 0, 1, 1), B(0, 0, 3, 3)) == pytest.approx(1 / 9)

    def test_symmetry(self):
        rng = random.Random(3)

        def rand_box():
            xs = sorted(rng.sample(range(10), 2))
            ys = sorted(rng.sample(range(10), 2))
            return B(xs[0], ys[0], xs[1], ys[1])

        for _ in range(50):
            a, b = rand_box(), rand_box()
            assert iou(a, b) == iou(b, a)


class TestMatchImage:
    def test_min_pair_rule(self):
        # human box overlaps well (0.9) but object box poorly (0.4): FP
        g = [gt((0, 0, 10, 10), (0, 0, 10, 10), 0)]
        d = [det((0, 0, 9, 10), (0, 0, 4, 10), 0, 0.9)]
        res = match_image(d, g, category=0)
        assert res.true_positive == (False,)
        # both boxes above threshold: TP
        d2 = [det((0, 0, 9, 10), (0, 0, 10, 9), 0, 0.9)]
        assert match_image(d2, g, category=0).true_positive == (True,)

    def test_threshold_is_strict(self):
        g = [gt((0, 0, 2, 1), (0, 0, 4, 4), 0)]
        d = [det((0, 0, 1, 1), (0, 0, 4, 4), 0, 0.9)]  # human IoU exactly 0.5
        assert match_image(d, g).true_positive == (False,)

    def test_eligibility_pool_is_unmatched_gts(self):
        # det2's best-overlap GT overall is A, but A is consumed by det1;
        # the argmax must run over the unmatched pool, where B qualifies.
        obox = (0, 0, 10, 10)
        gts = [gt((0, 0, 10, 10), obox, 0),   # A
               gt((0, 0, 10, 16), obox, 0)]   # B
        dets = [det((0, 0, 10, 9), obox, 0, 0.9),    # A: 0.9, B: 0.5625
                det((0, 0, 10, 12), obox, 0, 0.8)]   # A: 0.8333, B: 0.75
        res = match_image(dets, gts, category=0)
        assert res.order == (0, 1)
        assert res.true_positive == (True, True)
        assert res.matched_gt == (0, 1)
        assert res.num_tp() == 2

    def test_each_gt_matches_at_most_once(self):
        g = [gt((0, 0, 8, 8), (0, 0, 8, 8), 0)]
        d = [det((0, 0, 8, 8), (0, 0, 8, 8), 0, 0.9),
             det((0, 0, 8, 8), (0, 0, 8, 8), 0, 0.8)]
        res = match_image(d, g)
        assert res.true_positive == (True, False)
        assert res.matched_gt == (0, None)

    def test_ties_processed_in_input_order(self):
        g = [gt((0, 0, 8, 8), (0, 0, 8, 8), 0)]
        d = [det((0, 0, 8, 8), (0, 0, 8, 8), 0, 0.5),
             det((0, 0, 8, 7), (0, 0, 8, 8), 0, 0.5)]
        res = match_image(d, g)
        assert res.order == (0, 1)
        assert res.true_positive == (True, False)

    def test_category_mismatch_rejected(self):
        with pytest.raises(ConfigError):
            match_image([det((0, 0, 2, 2), (0, 0, 2, 2), 1, 0.5)], [], category=0)
        with pytest.raises(ConfigError):
            match_image([], [gt((0, 0, 2, 2), (0, 0, 2, 2), 1)], category=0)

    @pytest.mark.parametrize("threshold", [0.0, 1.0, -0.2, 1.5])
    def test_threshold_range_rejected(self, threshold):
        with pytest.raises(ConfigError):
            match_image([], [], iou_threshold=threshold)


class TestAveragePrecision:
    def test_hand_values(self):
        assert average_precision([], 1) == 0.0
        assert average_precision([True, True], 2) == 1.0
        assert average_precision([False, True], 1) == pytest.approx(0.5)
        assert average_precision([True, False, True], 2) == pytest.approx(5 / 6)
        assert average_precision([True], 0) == 0.0

    def test_negative_gt_count_rejected(self):
        with pytest.raises(ConfigError):
            average_precision([True], -1)


class TestEvaluate:
    def test_perfect_detections_reach_full_score(self):
        dataset, dets = perfect_pair()
        for setting in ("default", "known_object"):
            report = evaluate(dataset, dets, setting=setting)
            assert report.setting == setting
            assert set(report.per_category_ap) == {0, 1, 2}
            for ap in report.per_category_ap.values():
                assert ap == pytest.approx(1.0)
            assert report.map_full == pytest.approx(1.0)
            assert report.map_rare == pytest.approx(1.0)
            assert report.map_nonrare == pytest.approx(1.0)
            assert report.zero_gt_categories == (3,)

    def test_known_object_restricts_image_set(self):
        # category 0 targets object 0, annotated only in im0.  The higher
        # scored FP lives in im1, which the known-object setting excludes.
        table = make_table([0, 1], [False, False])
        from hoirobust.core import DatasetIndex, ImageRecord
        dataset = DatasetIndex(categories=table, images={
            "im0": ImageRecord("im0", 16, 16,
                               (gt((0, 0, 8, 8), (8, 8, 16, 16), 0),)),
            "im1": ImageRecord("im1", 16, 16,
                               (gt((0, 0, 8, 8), (8, 8, 16, 16), 1),)),
        })
        dets = DetectionSet(method="m", domain="original", by_image={
            "im0": [det((0, 0, 8, 8), (8, 8, 16, 16), 0, 0.9, "im0")],
            "im1": [det((0, 0, 8, 8), (8, 8, 16, 16), 0, 1.0, "im1")],
        })
        default = evaluate(dataset, dets, setting="default")
        ko = evaluate(dataset, dets, setting="known_object")
        assert default.per_category_ap[0] == pytest.approx(0.5)
        assert ko.per_category_ap[0] == pytest.approx(1.0)

    def test_unknown_setting_rejected(self):
        dataset, dets = perfect_pair()
        with pytest.raises(ConfigError):
            evaluate(dataset, dets, setting="ko")

    def test_zero_gt_categories_excluded_from_means(self):
        dataset, dets = perfect_pair()
        report = evaluate(dataset, dets)
        n_eval = len(report.per_category_ap)
        assert 3 not in report.per_category_ap
        total = sum(report.per_category_ap.values())
        assert report.map_full == pytest.approx(total / n_eval)


# property block: the same random instance drives both the package and the
# rational-arithmetic reference

def _instance(seed):
    return random_instance(random.Random(seed))


@settings(max_examples=120, deadline=None)
@given(st.integers(min_value=0, max_value=10**9))
def test_matches_rational_reference(seed):
    inst, dataset, dets = _instance(seed)
    for setting in ("default", "known_object"):
        report = evaluate(dataset, dets, setting=setting)
        per_cat, full, rare, nonrare = oracle_evaluate(inst, setting)
        assert set(report.per_category_ap) == set(per_cat)
        for c, frac in per_cat.items():
            assert abs(report.per_category_ap[c] - float(frac)) <= 1e-9
        assert abs(report.map_full - float(full)) <= 1e-9
        assert abs(report.map_rare - float(rare)) <= 1e-9
        assert abs(report.map_nonrare - float(nonrare)) <= 1e-9


@settings(max_examples=80, deadline=None)
@given(st.integers(min_value=0, max_value=10**9),
       st.sampled_from([0.5, 2.0, 4.0, 1.5]))
def test_score_scaling_leaves_report_unchanged(seed, factor):
    _inst, dataset, dets = _instance(seed)
    scaled = DetectionSet(
        method=dets.method, domain=dets.domain,
        by_image={img: [DetectionInstance(d.image_id, d.hbox, d.obox,
                                          d.hoi_category, d.score * factor)
                        for d in image_dets]
                  for img, image_dets in dets.by_image.items()})
    for setting in ("default", "known_object"):
        base = evaluate(dataset, dets, setting=setting)
        other = evaluate(dataset, scaled, setting=setting)
        assert base.per_category_ap == other.per_category_ap
        assert base.map_full == other.map_full
        assert base.zero_gt_categories == other.zero_gt_categories


@settings(max_examples=80, deadline=None)
@given(st.integers(min_value=0, max_value=10**9),
       st.integers(min_value=0, max_value=10**9))
def test_permutation_invariant_when_scores_distinct(seed, shuffle_seed):
    inst, dataset, dets = _instance(seed)
    # reassign globally distinct scores, keeping boxes and categories
    rng = random.Random(seed ^ 0x5EED)
    n = sum(len(v) for v in inst.dets.values())
    assume(n > 0)
    scores = rng.sample(range(1, 10 * n + 1), n)
    it = iter(scores)
    distinct = {img: [(d[0], d[1], d[2], next(it) / (10 * n + 1))
                      for d in image_dets]
                for img, image_dets in inst.dets.items()}
    inst.dets = distinct
    _dataset, dets = to_package(inst)
    base = evaluate(dataset, dets)

    shuffler = random.Random(shuffle_seed)
    permuted = {}
    for img, image_dets in dets.by_image.items():
        permuted[img] = list(image_dets)
        shuffler.shuffle(permuted[img])
    report = evaluate(dataset, DetectionSet(dets.method, dets.domain, permuted))
    assert report.per_category_ap == base.per_category_ap
    assert report.map_full == base.map_full


@settings(max_examples=80, deadline=None)
@given(st.integers(min_value=0, max_value=10**9))
def test_appending_lowest_score_fp_never_raises_ap(seed):
    inst, dataset, dets = _instance(seed)
    assume(dets.num_detections > 0)
    rng = random.Random(seed)
    img = rng.choice(list(dataset.images))
    cat = rng.randrange(dataset.categories.num_categories)
    extra = det((0, 0, 1, 1), (0, 0, 1, 1), cat, 0.01, img)
    # only meaningful when the appended detection really is a false positive
    existing = [d for d in dets.by_image.get(img, []) if d.hoi_category == cat]
    cat_gts = [g for g in dataset.images[img].gts if g.hoi_category == cat]
    flags = match_image(existing + [extra], cat_gts, category=cat)
    assume(not flags.true_positive[-1])

    before = evaluate(dataset, dets)
    by_image = {k: list(v) for k, v in dets.by_image.items()}
    by_image.setdefault(img, []).append(extra)
    after = evaluate(dataset, DetectionSet(dets.method, dets.domain, by_image))
    for c, ap in before.per_category_ap.items():
        assert after.per_category_ap[c] <= ap + 1e-12


@settings(max_examples=60, deadline=None)
@given(st.integers(min_value=0, max_value=10**9))
def test_mean_partition_relation(seed):
    _inst, dataset, dets = _instance(seed)
    report = evaluate(dataset, dets)
    rare = set(dataset.categories.rare_ids())
    evaluated = list(report.per_category_ap)
    r = [c for c in evaluated if c in rare]
    nr = [c for c in evaluated if c not in rare]
    lhs = report.map_full * len(evaluated)
    rhs = report.map_rare * len(r) + report.map_nonrare * len(nr)
    assert lhs == pytest.approx(rhs, abs=1e-12)
