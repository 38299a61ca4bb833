"""Parameter-free image corruption synthesis over a 12-domain registry.

Each kind maps an 8-bit RGB image to a same-sized 8-bit RGB image,
deterministically for a fixed (spec, seed).  Severity runs 1 (mild) to 5
(strong); severity 0 is an identity extension.  All randomness flows through
an explicit numpy Generator, never global state.  The frost texture is
synthesized from seeded filtered noise, so no external assets are needed.
"""
from __future__ import annotations

import io
from dataclasses import dataclass
from typing import Callable

import numpy as np
from PIL import Image
from scipy import ndimage

from ..core import ConfigError


def _as_rgb(image: np.ndarray) -> np.ndarray:
    arr = np.asarray(image)
    if arr.ndim != 3 or arr.shape[2] != 3 or arr.dtype != np.uint8:
        raise ConfigError(
            f"expected an 8-bit RGB array [H, W, 3], got shape "
            f"{arr.shape} dtype {arr.dtype}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ConfigError("degenerate image with a zero dimension")
    return arr


def _to_uint8(x: np.ndarray) -> np.ndarray:
    return np.clip(np.rint(x), 0, 255).astype(np.uint8)


def _sev(table: list, severity: int):
    return table[severity - 1]


def gaussian_noise(img: np.ndarray, severity: int, rng: np.random.Generator) -> np.ndarray:
    sigma = _sev([0.08, 0.12, 0.18, 0.26, 0.38], severity)
    x = img.astype(np.float64) / 255.0
    return _to_uint8((x + rng.normal(0.0, sigma, img.shape)) * 255.0)


def shot_noise(img: np.ndarray, severity: int, rng: np.random.Generator) -> np.ndarray:
    lam = _sev([60.0, 25.0, 12.0, 5.0, 3.0], severity)
    x = img.astype(np.float64) / 255.0
    return _to_uint8(rng.poisson(x * lam) / lam * 255.0)


def impulse_noise(img: np.ndarray, severity: int, rng: np.random.Generator) -> np.ndarray:
    amount = _sev([0.03, 0.06, 0.09, 0.17, 0.27], severity)
    out = img.copy()
    draws = rng.random(img.shape[:2])
    out[draws < amount / 2] = 0
    out[draws > 1 - amount / 2] = 255
    return out


def _disk_kernel(radius: int, alias_blur: float) -> np.ndarray:
    extent = max(8, radius)
    axis = np.arange(-extent, extent + 1, dtype=np.float64)
    xs, ys = np.meshgrid(axis, axis)
    kernel = ((xs ** 2 + ys ** 2) <= radius ** 2).astype(np.float64)
    kernel = ndimage.gaussian_filter(kernel, sigma=alias_blur)
    return kernel / kernel.sum()


def defocus_blur(img: np.ndarray, severity: int, rng: np.random.Generator) -> np.ndarray:
    radius, alias = _sev([(3, 0.1), (4, 0.5), (6, 0.5), (8, 0.5), (10, 0.5)], severity)
    kernel = _disk_kernel(radius, alias)
    x = img.astype(np.float64)
    out = np.stack([ndimage.convolve(x[..., c], kernel, mode="reflect")
                    for c in range(3)], axis=-1)
    return _to_uint8(out)


def glass_blur(img: np.ndarray, severity: int, rng: np.random.Generator) -> np.ndarray:
    """Gaussian blur followed by random local pixel displacement."""
    sigma, delta, iters = _sev(
        [(0.7, 1, 2), (0.9, 2, 1), (1.0, 2, 3), (1.1, 3, 2), (1.5, 4, 2)], severity)
    h, w = img.shape[:2]
    x = np.stack([ndimage.gaussian_filter(img[..., c].astype(np.float64), sigma)
                  for c in range(3)], axis=-1)
    rows = np.arange(h)[:, None]
    cols = np.arange(w)[None, :]
    for _ in range(iters):
        dy = rng.integers(-delta, delta + 1, size=(h, w))
        dx = rng.integers(-delta, delta + 1, size=(h, w))
        src_r = np.clip(rows + dy, 0, h - 1)
        src_c = np.clip(cols + dx, 0, w - 1)
        x = x[src_r, src_c]
    out = np.stack([ndimage.gaussian_filter(x[..., c], sigma) for c in range(3)],
                   axis=-1)
    return _to_uint8(out)


def zoom_blur(img: np.ndarray, severity: int, rng: np.random.Generator) -> np.ndarray:
    max_zoom = _sev([1.11, 1.16, 1.21, 1.26, 1.31], severity)
    h, w = img.shape[:2]
    x = img.astype(np.float64)
    acc = x.copy()
    factors = np.arange(1.01, max_zoom, 0.01)
    for z in factors:
        zoomed = ndimage.zoom(x, (z, z, 1), order=1)
        top = (zoomed.shape[0] - h) // 2
        left = (zoomed.shape[1] - w) // 2
        acc += zoomed[top:top + h, left:left + w]
    return _to_uint8(acc / (len(factors) + 1))


def _frost_field(h: int, w: int, rng: np.random.Generator) -> np.ndarray:
    """Icy overlay in [0,1]: two octaves of seeded smoothed noise."""
    coarse = ndimage.gaussian_filter(rng.normal(size=(h, w)),
                                     sigma=max(1.0, min(h, w) / 16))
    fine = ndimage.gaussian_filter(rng.normal(size=(h, w)),
                                   sigma=max(1.0, min(h, w) / 48))
    field = 0.65 * np.abs(coarse) + 0.35 * np.abs(fine)
    lo, hi = field.min(), field.max()
    if hi > lo:
        field = (field - lo) / (hi - lo)
    else:
        field = np.zeros_like(field)
    return field ** 0.7


def frost(img: np.ndarray, severity: int, rng: np.random.Generator) -> np.ndarray:
    keep, overlay = _sev(
        [(1.0, 0.4), (0.8, 0.6), (0.7, 0.7), (0.65, 0.7), (0.6, 0.75)], severity)
    field = _frost_field(img.shape[0], img.shape[1], rng)
    out = keep * img.astype(np.float64) + overlay * field[..., None] * 255.0
    return _to_uint8(out)


def brightness(img: np.ndarray, severity: int, rng: np.random.Generator) -> np.ndarray:
    shift = _sev([0.1, 0.2, 0.3, 0.4, 0.5], severity)
    return _to_uint8(img.astype(np.float64) + shift * 255.0)


def contrast(img: np.ndarray, severity: int, rng: np.random.Generator) -> np.ndarray:
    # scaling about the per-channel mean keeps a constant field constant
    scale = _sev([0.4, 0.3, 0.2, 0.1, 0.05], severity)
    x = img.astype(np.float64)
    means = x.mean(axis=(0, 1), keepdims=True)
    return _to_uint8((x - means) * scale + means)


def elastic_transform(img: np.ndarray, severity: int, rng: np.random.Generator) -> np.ndarray:
    alpha_f, sigma_f = _sev(
        [(0.05, 0.07), (0.09, 0.06), (0.13, 0.05), (0.17, 0.04), (0.21, 0.035)],
        severity)
    h, w = img.shape[:2]
    scale = min(h, w)
    sigma = max(1.0, sigma_f * scale)
    dy = ndimage.gaussian_filter(rng.uniform(-1, 1, (h, w)), sigma) * alpha_f * scale
    dx = ndimage.gaussian_filter(rng.uniform(-1, 1, (h, w)), sigma) * alpha_f * scale
    rows, cols = np.meshgrid(np.arange(h), np.arange(w), indexing="ij")
    coords = [rows + dy, cols + dx]
    out = np.stack([ndimage.map_coordinates(img[..., c].astype(np.float64),
                                            coords, order=1, mode="reflect")
                    for c in range(3)], axis=-1)
    return _to_uint8(out)


def pixelate(img: np.ndarray, severity: int, rng: np.random.Generator) -> np.ndarray:
    factor = _sev([0.6, 0.5, 0.4, 0.3, 0.25], severity)
    h, w = img.shape[:2]
    small = Image.fromarray(img).resize(
        (max(1, int(w * factor)), max(1, int(h * factor))), Image.BOX)
    return np.asarray(small.resize((w, h), Image.NEAREST))


def jpeg_compression(img: np.ndarray, severity: int, rng: np.random.Generator) -> np.ndarray:
    quality = _sev([25, 18, 15, 10, 7], severity)
    buf = io.BytesIO()
    Image.fromarray(img).save(buf, format="JPEG", quality=quality)
    buf.seek(0)
    return np.asarray(Image.open(buf).convert("RGB"))


_REGISTRY: dict[str, Callable[[np.ndarray, int, np.random.Generator], np.ndarray]] = {
    "gaussian-noise": gaussian_noise,
    "shot-noise": shot_noise,
    "impulse-noise": impulse_noise,
    "defocus-blur": defocus_blur,
    "glass-blur": glass_blur,
    "zoom-blur": zoom_blur,
    "frost": frost,
    "brightness": brightness,
    "contrast": contrast,
    "elastic-transform": elastic_transform,
    "pixelate": pixelate,
    "jpeg-compression": jpeg_compression,
}

CORRUPTION_KINDS: tuple[str, ...] = tuple(_REGISTRY)


@dataclass(frozen=True)
class CorruptionSpec:
    """A corruption domain: registry kind plus severity 1-5 (0 = identity)."""

    kind: str
    severity: int

    def __post_init__(self) -> None:
        if self.kind not in _REGISTRY:
            raise ConfigError(f"unknown corruption kind {self.kind!r}; "
                              f"known: {', '.join(CORRUPTION_KINDS)}")
        if not isinstance(self.severity, int) or not 0 <= self.severity <= 5:
            raise ConfigError(f"severity must be an integer in 0..5, "
                              f"got {self.severity!r}")

    @property
    def name(self) -> str:
        return f"{self.kind}-s{self.severity}"


def corrupt(image: np.ndarray, spec: CorruptionSpec, seed: int) -> np.ndarray:
    """Apply one corruption; deterministic for a fixed (spec, seed).

    Annotations are unaffected by definition: only the image domain changes,
    never the scene geometry the boxes describe.
    """
    arr = _as_rgb(image)
    if spec.severity == 0:
        return arr.copy()
    kind_index = CORRUPTION_KINDS.index(spec.kind)
    rng = np.random.default_rng(
        np.random.SeedSequence([int(seed), kind_index, spec.severity]))
    out = _REGISTRY[spec.kind](arr, spec.severity, rng)
    if out.shape != arr.shape:
        raise AssertionError(f"{spec.kind} changed image shape "
                             f"{arr.shape} -> {out.shape}")
    return out
