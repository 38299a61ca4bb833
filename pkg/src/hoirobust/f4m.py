"""Desk-scale token-fusion kernel around a mock frozen foundation model.

The kernel realizes the structural contracts of fusing foundation-model
tokens into a detection transformer: global tokens become extra decoder
queries that are discarded after self-attention, regional token maps are
resampled and concatenated onto the backbone token sequence, and regional
tokens are randomly dropped (with survivor rescaling) during training only.
Everything is a pure numpy function built for invariant verification, not
accuracy: a seeded deterministic mock stands in for the foundation model,
and a file adapter accepts externally exported token tensors.

Attention here is a single head over raw tokens, no learned maps and no
positional encodings: the minimal mechanism that still exercises every
stated invariant (row-stochastic weights, exact masked zeros, shape
contracts, inference counts).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Sequence

import numpy as np

from .core import ConfigError


class GridError(ConfigError):
    """A sub-image grid does not divide the token grid; nothing is padded."""


class MaskError(ConfigError):
    """An attention mask leaves some query row with no permitted key."""


def _as_2d(x: object, name: str) -> np.ndarray:
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim != 2:
        raise ConfigError(f"{name}: expected a 2-D tensor, got shape {arr.shape}")
    if arr.size and not np.isfinite(arr).all():
        raise ConfigError(f"{name}: non-finite values")
    return arr


def _as_3d(x: object, name: str) -> np.ndarray:
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim != 3:
        raise ConfigError(f"{name}: expected a 3-D tensor, got shape {arr.shape}")
    if arr.size and not np.isfinite(arr).all():
        raise ConfigError(f"{name}: non-finite values")
    return arr


def _rng(*entropy: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(list(entropy)))


@dataclass(frozen=True)
class F4MConfig:
    query_type: int = 4
    grid: tuple[int, int] = (2, 2)
    pi_f: float = 0.5
    d_model: int = 32
    num_vfms: int = 1
    training: bool = False
    seed: int = 0
    d_v: int = 16
    patch_grid: tuple[int, int] = (24, 24)

    def __post_init__(self) -> None:
        if self.query_type not in (1, 2, 3, 4):
            raise ConfigError(f"query_type must be 1..4, got {self.query_type}")
        rows, cols = self.grid
        if rows < 1 or cols < 1:
            raise ConfigError(f"grid must be >= (1,1), got {self.grid}")
        if not 0.0 <= self.pi_f <= 1.0:
            raise ConfigError(f"pi_f must be in [0,1], got {self.pi_f}")
        if self.d_model < 1 or self.d_v < 1 or self.num_vfms < 1:
            raise ConfigError("d_model, d_v and num_vfms must be >= 1")
        if self.patch_grid[0] < 1 or self.patch_grid[1] < 1:
            raise ConfigError(f"patch_grid must be >= (1,1), got {self.patch_grid}")
        if not (isinstance(self.seed, int) and self.seed >= 0):
            raise ConfigError(f"seed must be a non-negative integer, got {self.seed}")


@dataclass(frozen=True)
class VfmOutput:
    """Foundation-model tokens: global [G, D_v] and regional [H_p, W_p, D_v]."""

    global_tokens: np.ndarray
    regional_tokens: np.ndarray

    def __post_init__(self) -> None:
        g = _as_2d(self.global_tokens, "global_tokens")
        r = _as_3d(self.regional_tokens, "regional_tokens")
        if g.shape[0] < 1:
            raise ConfigError("need at least one global token")
        if g.shape[1] != r.shape[2]:
            raise ConfigError(f"token width mismatch: global {g.shape[1]} vs "
                              f"regional {r.shape[2]}")
        object.__setattr__(self, "global_tokens", g)
        object.__setattr__(self, "regional_tokens", r)


def cell_mask(token_grid: tuple[int, int], grid: tuple[int, int]) -> np.ndarray:
    """Block mask [rows*cols, H_p*W_p]: True where a token lies in the cell."""
    hp, wp = token_grid
    rows, cols = grid
    if hp % rows or wp % cols:
        raise GridError(f"grid {rows}x{cols} does not divide the "
                        f"{hp}x{wp} token grid")
    bh, bw = hp // rows, wp // cols
    token_rows, token_cols = np.divmod(np.arange(hp * wp), wp)
    cell_of_token = (token_rows // bh) * cols + (token_cols // bw)
    return cell_of_token[None, :] == np.arange(rows * cols)[:, None]


def masked_attention(queries: np.ndarray, keys: np.ndarray, values: np.ndarray,
                     mask: np.ndarray | None = None,
                     return_weights: bool = False):
    """Scaled dot-product attention with optional boolean mask [Q, K].

    Masked logits are set to -inf before the softmax, so the corresponding
    weights are exactly 0.0.  A query row with no permitted key is an error.
    """
    q = _as_2d(queries, "queries")
    k = _as_2d(keys, "keys")
    v = _as_2d(values, "values")
    if q.shape[1] != k.shape[1]:
        raise ConfigError(f"query width {q.shape[1]} != key width {k.shape[1]}")
    if k.shape[0] != v.shape[0]:
        raise ConfigError(f"key count {k.shape[0]} != value count {v.shape[0]}")
    logits = q @ k.T / math.sqrt(q.shape[1])
    if mask is not None:
        m = np.asarray(mask, dtype=bool)
        if m.shape != logits.shape:
            raise ConfigError(f"mask shape {m.shape} != logits shape {logits.shape}")
        if q.shape[0] and not m.any(axis=1).all():
            bad = int(np.flatnonzero(~m.any(axis=1))[0])
            raise MaskError(f"query row {bad} has no permitted key")
        logits = np.where(m, logits, -np.inf)
    if q.shape[0] == 0:
        weights = np.zeros((0, k.shape[0]))
    else:
        weights = np.exp(logits - logits.max(axis=1, keepdims=True))
        weights /= weights.sum(axis=1, keepdims=True)
    out = weights @ v
    return (out, weights) if return_weights else out


def mock_vfm_forward(image_like: np.ndarray, cfg: F4MConfig) -> VfmOutput:
    """Deterministic stand-in for a frozen foundation model.

    Patch-pools the input to cfg.patch_grid, applies a fixed seeded random
    linear map to width d_v, and derives global tokens: the whole-image mean,
    plus per-grid-cell masked means when the config selects query type 4.
    The map depends only on (seed, channel count, d_v), never on any call
    history: the model is frozen by construction.
    """
    arr = np.asarray(image_like, dtype=np.float64)
    if arr.ndim != 3:
        raise ConfigError(f"expected [H, W, C] input, got shape {arr.shape}")
    if not np.isfinite(arr).all():
        raise ConfigError("non-finite input values")
    h, w, channels = arr.shape
    hp, wp = cfg.patch_grid
    if h < hp or w < wp:
        raise ConfigError(f"input {h}x{w} smaller than the {hp}x{wp} patch grid")

    row_bins = np.array_split(np.arange(h), hp)
    col_bins = np.array_split(np.arange(w), wp)
    pooled = np.empty((hp, wp, channels))
    for i, rr in enumerate(row_bins):
        band = arr[rr[0]:rr[-1] + 1]
        for j, cc in enumerate(col_bins):
            pooled[i, j] = band[:, cc[0]:cc[-1] + 1].mean(axis=(0, 1))

    w_map = _rng(cfg.seed, channels, cfg.d_v).standard_normal(
        (channels, cfg.d_v)) / math.sqrt(channels)
    regional = pooled @ w_map
    flat = regional.reshape(-1, cfg.d_v)
    whole = flat.mean(axis=0, keepdims=True)
    if cfg.query_type == 4:
        mask = cell_mask((hp, wp), cfg.grid)
        cells = masked_attention(np.zeros((mask.shape[0], cfg.d_v)), flat, flat,
                                 mask)
        global_tokens = np.vstack([whole, cells])
    else:
        global_tokens = whole
    return VfmOutput(global_tokens=global_tokens, regional_tokens=regional)


def image_queries(vfm: VfmOutput, cfg: F4MConfig,
                  vfm_forward: Callable[[int, int], VfmOutput] | None = None,
                  ) -> np.ndarray:
    """Image queries [Q_img, D_v] under the configured query type.

    Type 1: the single global token.  Type 2: the global token plus one
    per grid cell, each from a separate forward pass on the cropped
    sub-input; `vfm_forward(row, col)` must supply those passes.  Type 3:
    the global token plus the arithmetic mean of each regional token group.
    Type 4: the 1 + rows*cols global tokens the model produced under
    per-cell masking.
    """
    rows, cols = cfg.grid
    top = vfm.global_tokens[:1]
    if cfg.query_type == 1:
        return top.copy()
    if cfg.query_type == 2:
        if vfm_forward is None:
            raise ConfigError("query type 2 needs a vfm_forward(row, col) callable")
        parts = [top]
        for r in range(rows):
            for c in range(cols):
                sub = vfm_forward(r, c)
                if not isinstance(sub, VfmOutput):
                    raise ConfigError("vfm_forward must return a VfmOutput")
                parts.append(sub.global_tokens[:1])
        return np.vstack(parts)
    if cfg.query_type == 3:
        hp, wp, d_v = vfm.regional_tokens.shape
        if hp % rows or wp % cols:
            raise GridError(f"grid {rows}x{cols} does not divide the "
                            f"{hp}x{wp} token grid")
        groups = vfm.regional_tokens.reshape(rows, hp // rows, cols, wp // cols,
                                             d_v).mean(axis=(1, 3))
        return np.vstack([top, groups.reshape(rows * cols, d_v)])
    expected = 1 + rows * cols
    if vfm.global_tokens.shape[0] != expected:
        raise ConfigError(
            f"query type 4 needs {expected} global tokens (whole image plus one "
            f"per grid cell); got {vfm.global_tokens.shape[0]}")
    return vfm.global_tokens.copy()


def _normalize_groups(image_q, proj) -> list[tuple[np.ndarray, np.ndarray]]:
    if image_q is None:
        return []
    qs = [image_q] if isinstance(image_q, np.ndarray) else list(image_q)
    ps = [proj] if isinstance(proj, np.ndarray) else list(proj) if proj is not None \
        else []
    if len(ps) != len(qs):
        raise ConfigError(f"{len(qs)} image-query tensors but {len(ps)} projections")
    return [(_as_2d(q, f"image_q[{i}]"), _as_2d(p, f"proj[{i}]"))
            for i, (q, p) in enumerate(zip(qs, ps))]


def decoder_self_attention_with_image_queries(
        instance_q: np.ndarray, image_q, proj) -> np.ndarray:
    """One decoder self-attention pass with image queries mixed in.

    Image queries (one tensor per foundation model, concatenated in order)
    are projected to d_model, appended after the instance queries, and
    attended over jointly; the image-query rows are discarded afterwards, so
    the output is always [Q, d_model].
    """
    inst = _as_2d(instance_q, "instance_q")
    tokens = [inst]
    for q, p in _normalize_groups(image_q, proj):
        if q.shape[0] and q.shape[1] != p.shape[0]:
            raise ConfigError(f"image-query width {q.shape[1]} does not match "
                              f"projection input {p.shape[0]}")
        if p.shape[1] != inst.shape[1]:
            raise ConfigError(f"projection output {p.shape[1]} != d_model "
                              f"{inst.shape[1]}")
        if q.shape[0]:
            tokens.append(q @ p)
    stacked = np.vstack(tokens)
    return masked_attention(stacked, stacked, stacked)[:inst.shape[0]]


def decoder_stack(instance_q: np.ndarray, image_q, proj, num_layers: int = 2,
                  share_projection: bool = True) -> np.ndarray:
    """Multi-layer decoder driver; image queries are re-injected per layer.

    With share_projection the same projection serves every layer; otherwise
    `proj` must be a sequence with one projection (set) per layer.
    """
    if num_layers < 1:
        raise ConfigError(f"num_layers must be >= 1, got {num_layers}")
    if not share_projection:
        layer_projs = list(proj)
        if len(layer_projs) != num_layers:
            raise ConfigError(f"{num_layers} layers need {num_layers} projections, "
                              f"got {len(layer_projs)}")
    x = _as_2d(instance_q, "instance_q")
    for layer in range(num_layers):
        p = proj if share_projection else layer_projs[layer]
        x = decoder_self_attention_with_image_queries(x, image_q, p)
    return x


def regional_fuse(backbone_map: np.ndarray, vfm_maps: Sequence[np.ndarray],
                  projections: Sequence[np.ndarray | None] | None = None,
                  ) -> np.ndarray:
    """Concatenate backbone tokens with every model's regional tokens.

    Each regional map is nearest-resampled to the backbone's spatial shape
    and channel-projected to d_model, then flattened row-major; the output
    sequence is backbone tokens first, then each model's tokens in order,
    H_b * W_b * (1 + num_vfms) tokens long.
    """
    bb = _as_3d(backbone_map, "backbone_map")
    hb, wb, d_model = bb.shape
    if projections is None:
        projections = [None] * len(vfm_maps)
    if len(projections) != len(vfm_maps):
        raise ConfigError(f"{len(vfm_maps)} maps but {len(projections)} projections")
    groups = [bb.reshape(-1, d_model)]
    for i, (vmap, p) in enumerate(zip(vfm_maps, projections)):
        m = _as_3d(vmap, f"vfm_maps[{i}]")
        rows = np.minimum((np.arange(hb) + 0.5) * m.shape[0] // hb,
                          m.shape[0] - 1).astype(int)
        cols = np.minimum((np.arange(wb) + 0.5) * m.shape[1] // wb,
                          m.shape[1] - 1).astype(int)
        resampled = m[rows][:, cols]
        if p is not None:
            p = _as_2d(p, f"projections[{i}]")
            if p.shape[0] != m.shape[2] or p.shape[1] != d_model:
                raise ConfigError(f"projections[{i}]: expected "
                                  f"[{m.shape[2]}, {d_model}], got {p.shape}")
            resampled = resampled @ p
        elif m.shape[2] != d_model:
            raise ConfigError(f"vfm_maps[{i}] width {m.shape[2]} != d_model "
                              f"{d_model} and no projection given")
        groups.append(resampled.reshape(-1, d_model))
    return np.vstack(groups)


def regional_dropout(tokens: np.ndarray, pi_f: float, training: bool,
                     seed: int | np.random.Generator) -> np.ndarray:
    """Drop regional tokens during training, scaling the survivors.

    Each token is zeroed independently with probability pi_f; survivors are
    scaled by N / N_remaining so the expected token sum is preserved.  If a
    draw drops everything it is redrawn (the ratio is undefined at zero).
    At test time this is the identity and consumes no randomness.
    """
    t = _as_2d(tokens, "tokens")
    if t.shape[0] < 1:
        raise ConfigError("need at least one token")
    if not 0.0 <= pi_f <= 1.0:
        raise ConfigError(f"pi_f must be in [0,1], got {pi_f}")
    if not training or pi_f == 0.0:
        return t.copy()
    if pi_f >= 1.0:
        raise ConfigError("pi_f must be < 1 when training (nothing could survive)")
    rng = seed if isinstance(seed, np.random.Generator) \
        else np.random.default_rng(seed)
    n = t.shape[0]
    while True:
        keep = rng.random(n) >= pi_f
        if keep.any():
            break
    out = np.zeros_like(t)
    out[keep] = t[keep] * (n / keep.sum())
    return out


def default_projection(d_in: int, d_out: int, seed: int = 0) -> np.ndarray:
    """Fixed seeded projection matrix [d_in, d_out] for kernel wiring."""
    return _rng(seed, d_in, d_out).standard_normal((d_in, d_out)) / math.sqrt(d_in)


def run_query_pipeline(image: np.ndarray, cfg: F4MConfig,
                       forward: Callable[[np.ndarray, F4MConfig], VfmOutput]
                       | None = None) -> tuple[np.ndarray, int]:
    """Compute image queries for one image, counting model forward passes.

    Query types 1, 3 and 4 cost exactly one forward pass; type 2 costs
    1 + rows*cols (one per cropped sub-image).  Returns (queries, calls).
    """
    fwd = forward if forward is not None else mock_vfm_forward
    calls = 0

    def counted(img: np.ndarray) -> VfmOutput:
        nonlocal calls
        calls += 1
        return fwd(img, cfg)

    arr = np.asarray(image, dtype=np.float64)
    vfm = counted(arr)
    sub_forward = None
    if cfg.query_type == 2:
        rows, cols = cfg.grid
        row_bins = np.array_split(np.arange(arr.shape[0]), rows)
        col_bins = np.array_split(np.arange(arr.shape[1]), cols)

        def sub_forward(r: int, c: int) -> VfmOutput:
            rr, cc = row_bins[r], col_bins[c]
            return counted(arr[rr[0]:rr[-1] + 1, cc[0]:cc[-1] + 1])

    return image_queries(vfm, cfg, sub_forward), calls


def _check_entry(passed: bool, measured) -> dict:
    return {"passed": bool(passed), "measured": measured}


def f4m_check(cfg: F4MConfig, vfm_tokens: VfmOutput | None = None) -> dict:
    """Run every kernel invariant end-to-end on seeded synthetic inputs.

    Returns a report dict: per-check pass/fail with measured values, the
    echoed config, and an overall verdict.  An indivisible grid is reported
    as a configuration error instead of raising.  With `vfm_tokens`,
    externally exported tokens replace the mock for the token-level checks
    and the forward-dependent checks are skipped.
    """
    rows, cols = cfg.grid
    hp, wp = cfg.patch_grid
    checks: dict[str, dict] = {}
    config_error: str | None = None
    external = vfm_tokens is not None

    rng = _rng(cfg.seed, 1009)
    image = rng.random((hp * max(rows, 1), wp * max(cols, 1), 3))

    # --- grid-independent checks -------------------------------------------
    tokens = rng.standard_normal((7, 5))
    _, w_free = masked_attention(tokens, tokens, tokens, return_weights=True)
    free_mask = rng.random((4, 7)) < 0.6
    free_mask[:, 0] = True  # keep every query row satisfiable
    _, w_masked = masked_attention(tokens[:4], tokens, tokens, mask=free_mask,
                                   return_weights=True)
    row_dev = max(float(np.abs(w_free.sum(axis=1) - 1).max()),
                  float(np.abs(w_masked.sum(axis=1) - 1).max()))
    checks["attention_rows_sum_to_1"] = _check_entry(row_dev <= 1e-9, row_dev)

    masked_max = float(np.abs(w_masked[~free_mask]).max()) if (~free_mask).any() \
        else 0.0
    checks["masked_weights_exact_zero"] = _check_entry(masked_max == 0.0,
                                                       masked_max)

    shape_results = []
    inst = rng.standard_normal((3, cfg.d_model))
    for q_img in (0, 1, 5):
        for n_vfms in (1, 2):
            qs = [rng.standard_normal((q_img, cfg.d_v)) for _ in range(n_vfms)]
            ps = [default_projection(cfg.d_v, cfg.d_model, cfg.seed + i)
                  for i in range(n_vfms)]
            out = decoder_self_attention_with_image_queries(inst, qs, ps)
            shape_results.append([q_img, n_vfms, list(out.shape)])
    shapes_ok = all(r[2] == [3, cfg.d_model] for r in shape_results)
    checks["decoder_discard_shape"] = _check_entry(shapes_ok, shape_results)

    drop_tokens = rng.random((64, 8)) + 0.5
    in_mean = float(drop_tokens.mean())
    acc = 0.0
    trials = 10_000
    for trial in range(trials):
        acc += float(regional_dropout(drop_tokens, 0.5, True,
                                      _rng(cfg.seed, 2, trial)).mean())
    rel_dev = abs(acc / trials - in_mean) / abs(in_mean)
    checks["dropout_expectation"] = _check_entry(rel_dev < 0.01, rel_dev)

    ones = np.ones((8, 3))
    dropped = regional_dropout(ones, 0.5, True, _rng(cfg.seed, 3))
    survivors = dropped[dropped[:, 0] != 0]
    n_kept = survivors.shape[0]
    scale_exact = n_kept > 0 and bool((survivors == 8 / n_kept).all())
    eval_out = regional_dropout(drop_tokens, cfg.pi_f, False, cfg.seed)
    eval_identity = bool(np.array_equal(eval_out, drop_tokens))
    checks["dropout_scaling_exact"] = _check_entry(scale_exact and eval_identity,
                                                   {"scale": 8 / n_kept if n_kept
                                                    else None,
                                                    "eval_identity": eval_identity})

    # --- grid-dependent and forward-dependent checks -----------------------
    try:
        if hp % rows or wp % cols:
            raise GridError(f"grid {rows}x{cols} does not divide the "
                            f"{hp}x{wp} token grid")

        vfm = vfm_tokens if external else mock_vfm_forward(image, cfg)
        flat = vfm.regional_tokens.reshape(-1, vfm.regional_tokens.shape[2])
        token_grid = vfm.regional_tokens.shape[:2]
        mask = cell_mask(token_grid, cfg.grid)
        _, w_cells = masked_attention(np.zeros((mask.shape[0], flat.shape[1])),
                                      flat, flat, mask, return_weights=True)
        out_of_cell = float(np.abs(w_cells[~mask]).max()) if (~mask).any() else 0.0
        checks["cell_locality_exact_zero"] = _check_entry(out_of_cell == 0.0,
                                                          out_of_cell)

        cfg3 = replace(cfg, query_type=3)
        q3 = image_queries(vfm, cfg3)
        th, tw = token_grid
        bh, bw = th // rows, tw // cols
        worst = 0.0
        for r in range(rows):
            for c in range(cols):
                block = vfm.regional_tokens[r * bh:(r + 1) * bh,
                                            c * bw:(c + 1) * bw]
                manual = block.reshape(-1, block.shape[2]).mean(axis=0)
                worst = max(worst,
                            float(np.abs(q3[1 + r * cols + c] - manual).max()))
        checks["type3_group_mean_oracle"] = _check_entry(worst <= 1e-12, worst)

        if external:
            for name in ("frozen_vfm", "seed_sensitivity", "inference_counts",
                         "eval_determinism"):
                checks[name] = {"passed": True, "skipped": True,
                                "measured": "skipped (external tokens)"}
            q_named = image_queries(vfm, replace(cfg, query_type=1))
            checks["query_counts"] = _check_entry(
                q_named.shape[0] == 1, {"type1": q_named.shape[0]})
        else:
            before = mock_vfm_forward(image, cfg)
            regional_dropout(flat, 0.5, True, _rng(cfg.seed, 4))
            regional_fuse(rng.standard_normal((rows * 2, cols * 2, cfg.d_model)),
                          [vfm.regional_tokens],
                          [default_projection(cfg.d_v, cfg.d_model, cfg.seed)])
            after = mock_vfm_forward(image, cfg)
            frozen = bool(
                np.array_equal(before.global_tokens, after.global_tokens)
                and np.array_equal(before.regional_tokens, after.regional_tokens))
            checks["frozen_vfm"] = _check_entry(frozen, frozen)

            differing = 0
            for trial in range(10):
                alt = mock_vfm_forward(image, replace(cfg, seed=cfg.seed + trial + 1))
                if not np.array_equal(alt.regional_tokens, vfm.regional_tokens):
                    differing += 1
            checks["seed_sensitivity"] = _check_entry(differing == 10, differing)

            counts = {}
            expected = {1: 1, 2: 1 + rows * cols, 3: 1, 4: 1}
            for t in (1, 2, 3, 4):
                _q, calls = run_query_pipeline(image, replace(cfg, query_type=t))
                counts[str(t)] = calls
            counts_ok = all(counts[str(t)] == expected[t] for t in expected)
            checks["inference_counts"] = _check_entry(counts_ok, counts)

            q_counts = {}
            for t in (1, 2, 3, 4):
                q, _calls = run_query_pipeline(image, replace(cfg, query_type=t))
                q_counts[str(t)] = q.shape[0]
            q_ok = (q_counts["1"] == 1
                    and all(q_counts[str(t)] == 1 + rows * cols for t in (2, 3, 4)))
            checks["query_counts"] = _check_entry(q_ok, q_counts)

            eval_cfg = replace(cfg, training=False)

            def full_path() -> np.ndarray:
                q, _ = run_query_pipeline(image, eval_cfg)
                proj = default_projection(eval_cfg.d_v, eval_cfg.d_model,
                                          eval_cfg.seed)
                dec = decoder_self_attention_with_image_queries(inst, q, proj)
                fused = regional_fuse(
                    rng_det.standard_normal((rows * 2, cols * 2,
                                             eval_cfg.d_model)),
                    [vfm.regional_tokens], [proj])
                kept = regional_dropout(flat, eval_cfg.pi_f, False, eval_cfg.seed)
                return np.concatenate([dec.ravel(), fused.ravel(), kept.ravel()])

            rng_det = _rng(cfg.seed, 5)
            first = full_path()
            rng_det = _rng(cfg.seed, 5)
            second = full_path()
            deterministic = bool(np.array_equal(first, second))
            checks["eval_determinism"] = _check_entry(deterministic, deterministic)
    except GridError as exc:
        config_error = str(exc)

    passed = config_error is None and all(
        entry["passed"] for entry in checks.values() if not entry.get("skipped"))
    return {
        "config": {
            "query_type": cfg.query_type, "grid": [rows, cols], "pi_f": cfg.pi_f,
            "d_model": cfg.d_model, "num_vfms": cfg.num_vfms,
            "training": cfg.training, "seed": cfg.seed, "d_v": cfg.d_v,
            "patch_grid": [hp, wp],
        },
        "checks": checks,
        "config_error": config_error,
        "passed": passed,
    }


def vfm_output_from_dict(raw: object) -> VfmOutput:
    """Adapter for externally exported tokens: {"global": [...], "regional": [[...]]}."""
    from .core import SchemaError
    if not isinstance(raw, dict) or "global" not in raw or "regional" not in raw:
        raise SchemaError("token file: expected an object with 'global' and "
                          "'regional'")
    try:
        g = np.asarray(raw["global"], dtype=np.float64)
        r = np.asarray(raw["regional"], dtype=np.float64)
    except ValueError as exc:
        raise SchemaError(f"token file: ragged or non-numeric arrays: {exc}") from exc
    if g.ndim == 1:
        g = g[None, :]
    if g.ndim != 2 or r.ndim != 3:
        raise SchemaError(
            f"token file: 'global' must be [G][D_v] (or a single [D_v] row) and "
            f"'regional' [H_p][W_p][D_v]; got shapes {g.shape} and {r.shape}")
    return VfmOutput(global_tokens=g, regional_tokens=r)
