"""
Token fusion with a frozen foundation model, desk scale
=======================================================

Walks the fusion kernel: global tokens become extra decoder queries that
are discarded after attention, regional tokens are fused into the encoder
sequence, and the built-in self-checks verify the whole contract.
"""
import numpy as np

from hoirobust.f4m import (
    F4MConfig,
    decoder_self_attention_with_image_queries,
    default_projection,
    f4m_check,
    masked_attention,
    mock_vfm_forward,
    regional_dropout,
    regional_fuse,
    run_query_pipeline,
)

cfg = F4MConfig(query_type=4, grid=(2, 2), patch_grid=(4, 4),
                d_v=3, d_model=6, seed=5)
rng = np.random.default_rng(0)

# --- masked attention: masked weights are exactly zero ----------------------
q = rng.standard_normal((2, 4))
kv = rng.standard_normal((3, 4))
mask = np.array([[True, True, False],
                 [True, True, True]])
_, weights = masked_attention(q, kv, kv, mask, return_weights=True)
print("attention weights:")
print(np.array_str(weights, precision=3))
print(f"masked entry == 0.0: {weights[0, 2] == 0.0}")

# --- image queries from the deterministic stand-in model --------------------
image = rng.standard_normal((16, 16, 3))
for query_type in (1, 2, 3, 4):
    type_cfg = F4MConfig(query_type=query_type, grid=(2, 2),
                         patch_grid=(4, 4), d_v=3, d_model=6, seed=5)
    queries, calls = run_query_pipeline(image, type_cfg)
    print(f"type {query_type}: {queries.shape[0]} image queries, "
          f"{calls} model call(s)")

# --- the decoder keeps its instance rows ------------------------------------
instance_q = rng.standard_normal((4, cfg.d_model))
vfm = mock_vfm_forward(image, cfg)
queries, _ = run_query_pipeline(image, cfg)
proj = default_projection(cfg.d_v, cfg.d_model, seed=cfg.seed)
out = decoder_self_attention_with_image_queries(instance_q, [queries], [proj])
print(f"\ndecoder: {instance_q.shape[0]} instance + {queries.shape[0]} image "
      f"queries in, {out.shape} out")

# --- regional fusion and training-time token dropout ------------------------
backbone = rng.standard_normal((2, 2, cfg.d_model))
fused = regional_fuse(backbone, [np.asarray(vfm.regional_tokens)],
                      [default_projection(cfg.d_v, cfg.d_model, seed=1)])
print(f"fused sequence: {fused.shape[0]} tokens "
      f"({backbone.shape[0] * backbone.shape[1]} backbone + rest regional)")

tokens = np.ones((8, cfg.d_model))
dropped = regional_dropout(tokens, pi_f=0.5, training=True, seed=2)
survivors = int((dropped[:, 0] != 0).sum())
print(f"dropout: {survivors}/8 tokens kept, survivor value "
      f"{dropped[dropped[:, 0] != 0][0, 0]:.3f} (= 8/{survivors})")

# --- the packaged contract check --------------------------------------------
report = f4m_check(cfg)
print("\nself-checks:")
for name, entry in report["checks"].items():
    print(f"  {'PASS' if entry['passed'] else 'FAIL'}  {name}")
print(f"verdict: {'passed' if report['passed'] else 'FAILED'}")
