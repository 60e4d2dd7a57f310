"""Score a source/summary pair and look at the input the model actually sees.

Walks through: tokenization into byte-offset spans, the joint
[BEGIN] source [SEP] summary [END] layout, truncation behavior, and how the
sliding-window + global attention mask differs between cls_only and
summary_global modes.
"""

from dataclasses import replace

from scorelens import ModelConfig, build_attention_mask, build_model_input
from scorelens.scoring import reference_forward_raw

SOURCE = (
    "Plants make their own food using energy from the sun. Green leaves take "
    "in light and air, while roots pull water from the soil. The plant "
    "combines these to grow and to store energy in its cells."
)
SUMMARY = "Plants use sunlight, air, and water to make food and grow."

config = ModelConfig(
    model_id="demo", kind="reference",
    layers=4, heads=4, embed_dim=32, window=8, max_len=512, seed=11,
)

model_input = build_model_input(SOURCE, SUMMARY, config)
print(f"sequence length: {len(model_input)} tokens, truncated={model_input.truncated}")
print("first tokens:", [
    (seg, span.surface if span else "")
    for span, seg in list(zip(model_input.spans, model_input.segment))[:6]
])

score, attn, mask = reference_forward_raw(model_input, config)
print(f"\nscore (std-dev units vs training mean): {score:+.4f}")

# cls_only: only BEGIN is global. A mid-source token sees its window plus BEGIN.
q = len(model_input) // 2
keys = [k for k in range(mask.n) if mask.allowed(q, k)]
print(f"\ncls_only: token {q} may attend to {keys}")

# summary_global: every summary token becomes global.
global_cfg = replace(config, global_mode="summary_global")
gi = build_model_input(SOURCE, SUMMARY, global_cfg)
gmask = build_attention_mask(gi, global_cfg)
keys = [k for k in range(gmask.n) if gmask.allowed(q, k)]
print(f"summary_global: token {q} may attend to {len(keys)} keys "
      f"(window plus all {int(gmask.global_flags.sum())} global tokens)")
