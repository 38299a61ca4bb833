"""Emission of augmented datasets: corrupted copies and mixed samples.

Every output sample owns an RNG stream derived from (global seed, output
index), so serial and parallel builds produce byte-identical images,
annotations, and provenance records.  Per-file I/O failures are collected
and reported in the summary; the run continues past them.
"""
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import partial
from pathlib import Path

import numpy as np
from PIL import Image

from ..core import (
    ConfigError,
    DatasetIndex,
    ImageRecord,
    dataset_to_dict,
    write_json,
)
from .corruptions import CorruptionSpec, corrupt
from .mixing import AugmentedSample, MixupConfig, Provenance, sample_mix

PAIRING_POLICIES = ("original-synthesized", "cross-synthetic")
ORIGINAL_DOMAIN = "original"


@dataclass(frozen=True)
class BuildSummary:
    emitted: tuple[str, ...]
    failures: tuple[dict, ...]
    image_dir: str
    annotation_path: str
    provenance_path: str

    def to_dict(self) -> dict:
        return {
            "emitted": list(self.emitted),
            "failures": [dict(f) for f in self.failures],
            "image_dir": self.image_dir,
            "annotation_path": self.annotation_path,
            "provenance_path": self.provenance_path,
        }


def _source_path(image_root: Path, image_id: str) -> Path:
    p = image_root / image_id
    return p if p.suffix else p.with_suffix(".png")


def _read_rgb(path: Path) -> np.ndarray:
    with Image.open(path) as img:
        return np.asarray(img.convert("RGB"))


def _child_seed(seed: int, index: int) -> int:
    return int(np.random.SeedSequence([seed, index]).generate_state(1)[0])


def _as_sample(dataset: DatasetIndex, image_root: Path, image_id: str,
               spec: CorruptionSpec | None, corruption_seed: int) -> AugmentedSample:
    rec = dataset.images[image_id]
    image = _read_rgb(_source_path(image_root, image_id))
    if image.shape[:2] != (rec.height, rec.width):
        raise ConfigError(
            f"image {image_id}: file is {image.shape[1]}x{image.shape[0]} but the "
            f"annotation says {rec.width}x{rec.height}")
    if spec is None:
        domain = ORIGINAL_DOMAIN
    else:
        image = corrupt(image, spec, corruption_seed)
        domain = spec.name
    return AugmentedSample(image=image, gts=rec.gts,
                           provenance=Provenance(sources=(image_id,),
                                                 domains=(domain,)))


def _emit_one(task: tuple, dataset: DatasetIndex, image_root: str,
              specs: tuple[CorruptionSpec, ...], cfg: MixupConfig,
              pairing: str, image_dir: str) -> tuple[int, dict | None,
                                                     dict | None, dict | None]:
    """Produce one output sample; failures come back as records, not raises."""
    index, mode, payload = task
    root = Path(image_root)
    try:
        if mode == "synth":
            image_id, spec_index = payload
            spec = specs[spec_index]
            output_id = f"{image_id}__{spec.name}"
            sample = _as_sample(dataset, root, image_id, spec,
                                _child_seed(cfg.seed, index))
        else:
            rng = np.random.default_rng(np.random.SeedSequence([cfg.seed, index]))
            ids = list(dataset.images)
            i = int(rng.integers(len(ids)))
            if len(ids) > 1:
                j = int(rng.integers(len(ids) - 1))
                if j >= i:
                    j += 1
            else:
                j = i
            if pairing == "original-synthesized":
                spec_i = specs[int(rng.integers(len(specs)))]
                spec_j = None
                if int(rng.integers(2)):
                    spec_i, spec_j = spec_j, spec_i
            else:
                ka = int(rng.integers(len(specs)))
                others = [t for t in range(len(specs))
                          if specs[t].kind != specs[ka].kind]
                kb = others[int(rng.integers(len(others)))] if others \
                    else int(rng.integers(len(specs)))
                spec_i, spec_j = specs[ka], specs[kb]
            seed_i = int(rng.integers(2 ** 63))
            seed_j = int(rng.integers(2 ** 63))
            first = _as_sample(dataset, root, ids[i], spec_i, seed_i)
            second = _as_sample(dataset, root, ids[j], spec_j, seed_j)
            if int(rng.integers(2)):
                first, second = second, first
            output_id = f"mix_{index:06d}"
            sample = sample_mix(first, second, cfg, rng=rng)

        out_path = Path(image_dir) / f"{output_id}.png"
        Image.fromarray(sample.image).save(out_path, format="PNG")
        h, w = sample.image.shape[:2]
        record = ImageRecord(image_id=output_id, width=w, height=h,
                             gts=sample.gts)
        image_entry = {
            "id": output_id, "width": w, "height": h,
            "gts": [{"hbox": gt.hbox.as_list(), "obox": gt.obox.as_list(),
                     "hoi": gt.hoi_category} for gt in record.gts],
        }
        prov_entry = {"output_id": output_id,
                      **sample.provenance.to_dict()}
        return index, image_entry, prov_entry, None
    except OSError as exc:
        return index, None, None, {"output_index": index, "error": str(exc)}


def build_augmented_dataset(dataset: DatasetIndex, image_root: str | Path,
                            specs: list[CorruptionSpec], cfg: MixupConfig,
                            pairing: str = "original-synthesized",
                            out_dir: str | Path = "augmented",
                            count: int | None = None,
                            mix: bool = True,
                            workers: int = 1) -> BuildSummary:
    """Emit an augmented dataset under out_dir (images/, annotations, provenance).

    With mixing disabled each source image yields one corrupted copy per
    spec, annotations unchanged.  With mixing enabled, `count` samples
    (default: one per source image) are drawn under the pairing policy:
    "original-synthesized" mixes a raw image with a corrupted one,
    "cross-synthetic" mixes two differently corrupted images.
    """
    if pairing not in PAIRING_POLICIES:
        raise ConfigError(f"pairing must be one of {PAIRING_POLICIES}, "
                          f"got {pairing!r}")
    if not specs:
        raise ConfigError("at least one corruption spec is required")
    if not dataset.images:
        raise ConfigError("dataset has no images")
    if workers < 1:
        raise ConfigError(f"workers must be >= 1, got {workers}")

    out = Path(out_dir)
    image_dir = out / "images"
    image_dir.mkdir(parents=True, exist_ok=True)

    tasks: list[tuple] = []
    if mix:
        n = count if count is not None else dataset.num_images
        if n < 1:
            raise ConfigError(f"count must be >= 1, got {n}")
        tasks = [(idx, "mix", None) for idx in range(n)]
    else:
        idx = 0
        for image_id in dataset.images:
            for spec_index in range(len(specs)):
                tasks.append((idx, "synth", (image_id, spec_index)))
                idx += 1

    emit = partial(_emit_one, dataset=dataset, image_root=str(image_root),
                   specs=tuple(specs), cfg=cfg, pairing=pairing,
                   image_dir=str(image_dir))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(emit, tasks,
                                    chunksize=max(1, len(tasks) // (workers * 4))))
    else:
        results = [emit(t) for t in tasks]
    results.sort(key=lambda r: r[0])

    image_entries = [r[1] for r in results if r[1] is not None]
    prov_entries = [r[2] for r in results if r[2] is not None]
    failures = tuple(r[3] for r in results if r[3] is not None)

    annotation_path = out / "annotations.json"
    write_json(annotation_path, {
        "categories": dataset_to_dict(dataset)["categories"],
        "images": image_entries,
    })
    provenance_path = out / "provenance.json"
    write_json(provenance_path, {
        "config": {
            "alpha": cfg.alpha, "pi_c": cfg.pi_c, "patch_size": cfg.patch_size,
            "seed": cfg.seed, "pairing": pairing, "mix": mix,
            "specs": [{"kind": s.kind, "severity": s.severity} for s in specs],
        },
        "samples": prov_entries,
    })
    return BuildSummary(
        emitted=tuple(e["id"] for e in image_entries),
        failures=failures,
        image_dir=str(image_dir),
        annotation_path=str(annotation_path),
        provenance_path=str(provenance_path),
    )
