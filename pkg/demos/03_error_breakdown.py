"""
Attributing false positives to error types
==========================================

Runs the eight-type error attribution on a small hand-built scene where
each kind of mistake appears once, then diffs the breakdown against a
cleaner variant of the same detections, as one would diff two domains.
"""
from pathlib import Path

from hoirobust.core import (
    BoundingBox,
    DatasetIndex,
    DetectionInstance,
    DetectionSet,
    GroundTruthInstance,
    HoiCategoryTable,
    ImageRecord,
)
from hoirobust.errors import ERROR_TYPES, breakdown, compare_domains
from hoirobust.plots import bar_chart_svg

OUT = Path(__file__).resolve().parent / "output"
OUT.mkdir(exist_ok=True)


def box(x1, y1, x2, y2):
    return BoundingBox(float(x1), float(y1), float(x2), float(y2))


table = HoiCategoryTable(
    interactions=("hold", "ride", "wash"),
    objects=("bicycle", "motorcycle"),
    hoi=((0, 0), (1, 0), (2, 0), (0, 1)),
    rare=(False, False, False, False),
)

H0, O0 = box(10, 10, 30, 30), box(40, 10, 60, 30)
H1, O1 = box(10, 60, 30, 80), box(40, 60, 60, 80)
scene = ImageRecord(image_id="scene", width=100, height=100, gts=(
    GroundTruthInstance(H0, O0, 0),   # hold bicycle
    GroundTruthInstance(H1, O1, 2),   # wash bicycle
))
dataset = DatasetIndex(categories=table, images={"scene": scene})


def det(hbox, obox, category, score):
    return DetectionInstance("scene", hbox, obox, category, score)


# one true positive, then one false positive per failure mode
noisy = DetectionSet(method="noisy", domain="shifted", by_image={"scene": [
    det(H0, O0, 0, 0.99),                      # the hit
    det(H0, O0, 0, 0.90),                      # duplicate of the hit
    det(H0, O0, 1, 0.85),                      # wrong interaction
    det(H0, O0, 3, 0.80),                      # wrong object class
    det(H0, box(70, 70, 90, 90), 0, 0.70),     # object box off target
    det(box(70, 10, 90, 30), box(70, 40, 90, 55), 0, 0.65),  # background
]})

report = breakdown(dataset, noisy)
print(f"{'type':<16} {'count':>5} {'share':>8}")
for t in ERROR_TYPES:
    print(f"{t.value:<16} {report.counts.get(t, 0):>5} "
          f"{report.percentages()[t]:>7.1f}%")
print(f"false positives: {report.total_fp}, missed GTs: {report.missed_gt}")

# a cleaner method on the same scene: the duplicate and background FPs gone
cleaner = DetectionSet(method="clean", domain="original", by_image={"scene": [
    det(H0, O0, 0, 0.99),
    det(H0, O0, 1, 0.85),
    det(H0, O0, 3, 0.80),
    det(H0, box(70, 70, 90, 90), 0, 0.70),
]})
base = breakdown(dataset, cleaner)

delta = compare_domains(base, report)
print("\nshare shift vs the cleaner run (percentage points):")
for t in ERROR_TYPES:
    print(f"  {t.value:<16} {delta[t]:+.1f}")

svg_path = OUT / "error_breakdown.svg"
bar_chart_svg([t.value for t in ERROR_TYPES],
              {"clean": [base.percentages()[t] for t in ERROR_TYPES],
               "noisy": [report.percentages()[t] for t in ERROR_TYPES]},
              svg_path, ylabel="share of false positives (%)",
              title="Error types across two runs")
print(f"\nwrote {svg_path}")
