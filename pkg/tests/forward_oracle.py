"""Brute-force straight-line re-implementation of the reference forward pass.

Written before the vectorized engine and kept deliberately naive: explicit
loops over positions, heads, and layers, with no shared code paths beyond
the weight set itself.
"""

import math

import numpy as np

from scorelens.scoring import (
    LN_EPS,
    ModelConfig,
    ModelInput,
    reference_weights,
)


def slow_sinusoid(pos: int, d: int) -> np.ndarray:
    enc = np.zeros(d)
    for i in range(d // 2):
        angle = pos / (10000.0 ** (2.0 * i / d))
        enc[2 * i] = math.sin(angle)
        enc[2 * i + 1] = math.cos(angle)
    return enc


def slow_layer_norm(vec: np.ndarray) -> np.ndarray:
    mean = sum(vec) / len(vec)
    var = sum((v - mean) ** 2 for v in vec) / len(vec)
    return (vec - mean) / math.sqrt(var + LN_EPS)


def slow_forward(model_input: ModelInput, config: ModelConfig):
    """Returns (score, attention[L][H][n][n] as nested lists)."""
    w = reference_weights(config)
    n = len(model_input.tokens)
    d, H, L = config.embed_dim, config.heads, config.layers
    dh = d // H
    half = config.window // 2
    glob = list(model_input.global_flags)

    def permitted(q, k):
        return abs(q - k) <= half or glob[q] or glob[k]

    x = [w["embed"][tid].copy() + slow_sinusoid(p, d)
         for p, tid in enumerate(model_input.tokens)]

    attn_all = [[[[0.0] * n for _ in range(n)] for _ in range(H)] for _ in range(L)]
    for l in range(L):
        ctx = [np.zeros(d) for _ in range(n)]
        for h in range(H):
            lo, hi = h * dh, (h + 1) * dh
            qs = [x[p] @ w[f"wq{l}"][:, lo:hi] for p in range(n)]
            ks = [x[p] @ w[f"wk{l}"][:, lo:hi] for p in range(n)]
            vs = [x[p] @ w[f"wv{l}"][:, lo:hi] for p in range(n)]
            for q in range(n):
                keys = [k for k in range(n) if permitted(q, k)]
                logits = [float(qs[q] @ ks[k]) / math.sqrt(dh) for k in keys]
                mx = max(logits)
                exps = [math.exp(v - mx) for v in logits]
                total = sum(exps)
                for k, e in zip(keys, exps):
                    weight = e / total
                    attn_all[l][h][q][k] = weight
                    ctx[q][lo:hi] += weight * vs[k]
        new_x = []
        for p in range(n):
            att_out = ctx[p] @ w[f"wo{l}"]
            y = slow_layer_norm(x[p] + att_out)
            hidden = y @ w[f"ff1_{l}"] + w[f"ffb1_{l}"]
            hidden = np.maximum(hidden, 0.0)
            ff = hidden @ w[f"ff2_{l}"]
            new_x.append(slow_layer_norm(y + ff + w[f"ffb2_{l}"]))
        x = new_x

    score = float(np.dot(w["head_w"], x[0]) + w["head_b"])
    return score, attn_all
