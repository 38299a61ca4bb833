"""
Filtering a shifted benchmark down to trustworthy samples
=========================================================

Builds a five-sample manifest where four samples each trip a different
filter stage, runs the pipeline, and emits the cleaned manifest.
"""
from hoirobust.benchfilter import (
    ORIGINAL_DOMAIN,
    FilterScores,
    FilterThresholds,
    ObjectDetection,
    apply_filters,
    filtered_manifest,
    match_f1,
)
from hoirobust.core import (
    BoundingBox,
    DatasetIndex,
    DomainManifest,
    GroundTruthInstance,
    HoiCategoryTable,
    ImageRecord,
    ManifestEntry,
)


def box(x1, y1, x2, y2):
    return BoundingBox(float(x1), float(y1), float(x2), float(y2))


def person(b):
    return ObjectDetection(cls="person", box=b, score=0.9)


domains = ("fog", "rain")
big, big2, tiny = box(10, 10, 40, 40), box(50, 50, 80, 80), box(10, 10, 15, 15)

table = HoiCategoryTable(interactions=("hold",), objects=("cup",),
                         hoi=((0, 0),), rare=(False,))
images = {}
for k in range(5):
    obox = tiny if k == 3 else big2  # base3 carries a sub-threshold object
    images[f"base{k}"] = ImageRecord(
        image_id=f"base{k}", width=100, height=100,
        gts=(GroundTruthInstance(big, obox, 0),))
dataset = DatasetIndex(categories=table, images=images)

manifest = DomainManifest(domains=domains, copies=tuple(
    ManifestEntry(base=f"base{k}", domain=d, path=f"{d}/base{k}.png")
    for k in range(5) for d in domains))

# base1's fog copy no longer matches its caption; base2's fog detections
# drifted away from the original pass
vl_scores = {(f"base{k}", d): 0.9 for k in range(5) for d in domains}
vl_scores["base1", "fog"] = 0.2

detections = {}
for k in range(5):
    for domain in (ORIGINAL_DOMAIN,) + domains:
        detections[f"base{k}", domain] = (person(big),)
detections["base2", "fog"] = (person(box(60, 60, 90, 90)),)

print("fog-vs-original detection agreement per base:")
for k in range(5):
    f1 = match_f1(detections[f"base{k}", ORIGINAL_DOMAIN],
                  detections[f"base{k}", "fog"])
    print(f"  base{k}: F1 = {f1:.2f}")

decision = apply_filters(
    manifest, dataset,
    FilterScores(vl_scores=vl_scores, detections=detections),
    FilterThresholds(),            # tau_vl 0.25, tau_f1 0.5, area 0.005
    manual_exclusions=("base4",))  # a curator vetoed base4 by hand

print(f"\nkept: {sorted(decision.kept)}")
for base, reason in sorted(decision.discarded.items()):
    print(f"  discarded {base}: {reason}")

clean = filtered_manifest(manifest, decision)
print(f"\nfiltered manifest: {len(clean.copies)} of {len(manifest.copies)} "
      f"copies remain")
for entry in clean.copies:
    print(f"  {entry.domain}/{entry.base} -> {entry.path}")
