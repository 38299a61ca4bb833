"""HOI-aware patch dropout and cross-domain sample mixing.

A mixed sample blends an anchor image A with a partner image B using a single
weight mu drawn from Beta(alpha, alpha), after zeroing background patches of
A (patches that do not touch any annotated box) with probability pi_c.  The
partner is resized to the anchor's dimensions and annotations are merged
unweighted: the output ground truth is exactly Y_A followed by Y_B with B's
boxes rescaled.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from PIL import Image

from ..core import BoundingBox, ConfigError, GroundTruthInstance
from .corruptions import _as_rgb


def as_generator(seed: int | np.random.Generator) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    if not isinstance(seed, int) or seed < 0:
        raise ConfigError(f"seed must be a non-negative integer, got {seed!r}")
    return np.random.default_rng(seed)


@dataclass(frozen=True)
class MixupConfig:
    alpha: float = 1.5
    pi_c: float = 0.3
    patch_size: int = 32
    seed: int = 0

    def __post_init__(self) -> None:
        if not self.alpha > 0:
            raise ConfigError(f"alpha must be > 0, got {self.alpha}")
        if not 0.0 <= self.pi_c <= 1.0:
            raise ConfigError(f"pi_c must be in [0,1], got {self.pi_c}")
        if not (isinstance(self.patch_size, int) and self.patch_size >= 1):
            raise ConfigError(f"patch_size must be an integer >= 1, "
                              f"got {self.patch_size}")
        if not (isinstance(self.seed, int) and self.seed >= 0):
            raise ConfigError(f"seed must be a non-negative integer, got {self.seed}")


@dataclass(frozen=True)
class Provenance:
    """Where a sample came from: source ids, domain kinds, mixing weight."""

    sources: tuple[str, ...]
    domains: tuple[str, ...]
    mu: float | None = None

    def to_dict(self) -> dict:
        return {"sources": list(self.sources), "domains": list(self.domains),
                "mu": self.mu}


@dataclass(frozen=True)
class AugmentedSample:
    image: np.ndarray
    gts: tuple[GroundTruthInstance, ...]
    provenance: Provenance


def eligible_patches(height: int, width: int, boxes: Sequence[BoundingBox],
                     patch_size: int) -> np.ndarray:
    """Boolean grid [rows, cols]: True where a patch touches no box.

    A patch is ineligible as soon as its overlap area with any box is
    positive; boxes that merely share an edge with a patch do not cover it.
    """
    rows = -(-height // patch_size)
    cols = -(-width // patch_size)
    eligible = np.ones((rows, cols), dtype=bool)
    y0 = np.arange(rows) * patch_size
    y1 = np.minimum(y0 + patch_size, height)
    x0 = np.arange(cols) * patch_size
    x1 = np.minimum(x0 + patch_size, width)
    for box in boxes:
        row_hit = (np.minimum(box.y2, y1) - np.maximum(box.y1, y0)) > 0
        col_hit = (np.minimum(box.x2, x1) - np.maximum(box.x1, x0)) > 0
        eligible &= ~np.outer(row_hit, col_hit)
    return eligible


def patch_dropout(image: np.ndarray, boxes: Sequence[BoundingBox],
                  pi_c: float, patch_size: int,
                  seed: int | np.random.Generator) -> np.ndarray:
    """Zero background patches with probability pi_c each.

    The image is partitioned into a patch grid; patches intersecting any box
    are never touched, so pixels inside ground-truth boxes always survive.
    """
    arr = _as_rgb(image)
    if not 0.0 <= pi_c <= 1.0:
        raise ConfigError(f"pi_c must be in [0,1], got {pi_c}")
    if patch_size < 1:
        raise ConfigError(f"patch_size must be >= 1, got {patch_size}")
    rng = as_generator(seed)
    h, w = arr.shape[:2]
    eligible = eligible_patches(h, w, boxes, patch_size)
    drop = (rng.random(eligible.shape) < pi_c) & eligible
    out = arr.copy()
    for i, j in zip(*np.nonzero(drop)):
        out[i * patch_size:(i + 1) * patch_size,
            j * patch_size:(j + 1) * patch_size] = 0
    return out


def _gt_boxes(gts: Sequence[GroundTruthInstance]) -> list[BoundingBox]:
    boxes: list[BoundingBox] = []
    for gt in gts:
        boxes.append(gt.hbox)
        boxes.append(gt.obox)
    return boxes


def _resize_to(sample: AugmentedSample, height: int, width: int) -> AugmentedSample:
    h, w = sample.image.shape[:2]
    if (h, w) == (height, width):
        return sample
    resized = Image.fromarray(sample.image).resize((width, height), Image.BILINEAR)
    sx = width / w
    sy = height / h
    gts = tuple(GroundTruthInstance(hbox=gt.hbox.scaled(sx, sy),
                                    obox=gt.obox.scaled(sx, sy),
                                    hoi_category=gt.hoi_category)
                for gt in sample.gts)
    return AugmentedSample(image=np.asarray(resized), gts=gts,
                           provenance=sample.provenance)


def sample_mix(a: AugmentedSample, b: AugmentedSample, cfg: MixupConfig,
               rng: np.random.Generator | None = None,
               mu: float | None = None) -> AugmentedSample:
    """Blend two samples: mu * I_A + (1 - mu) * I_B, annotations merged.

    Patch dropout is applied to A (the first argument) only.  mu is drawn
    once per call from Beta(alpha, alpha) unless forced.  Every output pixel
    is the blend rounded to the nearest integer per channel (ties to even).
    """
    img_a = _as_rgb(a.image)
    _as_rgb(b.image)
    generator = rng if rng is not None else as_generator(cfg.seed)
    if mu is None:
        mu = float(generator.beta(cfg.alpha, cfg.alpha))
    if not 0.0 <= mu <= 1.0:
        raise ConfigError(f"mu must be in [0,1], got {mu}")

    h, w = img_a.shape[:2]
    b = _resize_to(b, h, w)
    dropped = patch_dropout(img_a, _gt_boxes(a.gts), cfg.pi_c, cfg.patch_size,
                            generator)
    blend = mu * dropped.astype(np.float64) + (1.0 - mu) * b.image.astype(np.float64)
    gts = a.gts + b.gts
    if len(gts) != len(a.gts) + len(b.gts):
        raise AssertionError("annotation union lost instances")
    return AugmentedSample(
        image=np.rint(blend).astype(np.uint8),
        gts=gts,
        provenance=Provenance(
            sources=a.provenance.sources + b.provenance.sources,
            domains=a.provenance.domains + b.provenance.domains,
            mu=mu,
        ),
    )
