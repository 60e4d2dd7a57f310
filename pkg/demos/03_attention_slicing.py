"""Slice a windowed attention tensor: heatmap columns, rug plot, zero vs missing.

Captures attention from the reference scorer, packs it into the banded
layout, and prints the three slice modes behind the UI: per-layer and
per-head heatmap columns for a selected token, and the rug strip.  Also
shows the storage arithmetic that motivates the windowed layout.
"""

from scorelens import (
    ModelConfig,
    ModelRegistry,
    classify_cell,
    slice_attention,
    storage_cells,
)

SOURCE = "Seeds need water, warmth, and soil to grow. First a root pushes down."
SUMMARY = "A seed grows a root first."

registry = ModelRegistry([
    ModelConfig(model_id="content", kind="reference", layers=4, heads=4,
                embed_dim=32, window=8, max_len=512, seed=11),
])
result = registry.score_pair("content", SOURCE, SUMMARY, want_attention=True)
tensor = result.attention
print(f"n={tensor.n} tokens, L={tensor.layers}, H={tensor.heads}, "
      f"w={tensor.window}, global tokens at {tensor.global_indices}")

q = tensor.n - 3  # a summary token near the end
rug = slice_attention(tensor, q, "rug", layer=2, head=1)
cells = "".join(
    "." if c.state == "missing" else ("0" if c.state == "zero" else "#") for c in rug
)
print(f"\nrug for token {q} at (layer 2, head 1):  {cells}")
print("('#' = weight, '0' = stored exact zero, '.' = masked out; note the "
      "global BEGIN column is never missing)")

by_layer = slice_attention(tensor, q, "by_layer", head=1)
print(f"\nby_layer heatmap shape: {len(by_layer)} keys x {len(by_layer[0])} layers")
print("BEGIN-column weights per layer:",
      [round(c.value, 4) for c in by_layer[0]])

print("\ncell states around the window edge:")
for k in (0, max(0, q - tensor.half_window - 1), q, min(tensor.n - 1, q + tensor.half_window + 1)):
    print(f"  (q={q}, k={k}) -> {classify_cell(tensor, 2, 1, q, k)}")

print("\nstorage arithmetic at deployed scale (700 tokens, w=256, 12x12):")
print(f"  windowed:    {storage_cells(700, 256, 12, 12, 'windowed'):,} cells")
print(f"  full global: {storage_cells(700, 256, 12, 12, 'full_global'):,} cells")
