"""Model registry and scoring.

Builds the joint source+summary input with a separator token, applies a
Longformer-style attention mask (sliding window plus global tokens), and
either runs the built-in deterministic reference scorer or forwards the
pair to an external scorer over HTTP.  Scores are continuous and expressed
in z-normalized standard-deviation units relative to the training mean.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import requests

from .attention import AttentionTensor, ingest_attention
from .segmentation import (
    BEGIN_ID,
    END_ID,
    SEP_ID,
    SpanKind,
    TextSpan,
    get_tokenizer,
)

LN_EPS = 1e-6


class ModelNotFoundError(KeyError):
    pass


class SummaryTooLongError(ValueError):
    pass


class ExternalScorerError(RuntimeError):
    """External scorer failure; carries the endpoint identity."""

    def __init__(self, endpoint: str, message: str):
        super().__init__(f"{message} (endpoint: {endpoint})")
        self.endpoint = endpoint


class SchemaViolationError(ExternalScorerError):
    def __init__(self, endpoint: str, fld: str, message: str = "invalid value"):
        super().__init__(endpoint, f"response schema violation at {fld!r}: {message}")
        self.field = fld


@dataclass(frozen=True)
class ModelConfig:
    model_id: str
    kind: str  # "reference" | "external"
    layers: int = 4
    heads: int = 4
    embed_dim: int = 32
    window: int = 8  # total width of the sliding window, in tokens
    max_len: int = 512
    global_mode: str = "cls_only"  # or "summary_global"
    seed: int = 0
    endpoint: Optional[str] = None
    score_dimension: str = ""

    def __post_init__(self):
        if self.kind not in ("reference", "external"):
            raise ValueError(f"unknown model kind: {self.kind!r}")
        if self.layers < 1 or self.heads < 1:
            raise ValueError("layers and heads must be >= 1")
        if self.embed_dim % self.heads != 0:
            raise ValueError("embed_dim must be divisible by heads")
        if self.window < 2 or self.window % 2 != 0:
            raise ValueError("window must be even and >= 2")
        if self.max_len < 3:
            raise ValueError("max_len must be >= 3")
        if self.global_mode not in ("cls_only", "summary_global"):
            raise ValueError(f"unknown global_mode: {self.global_mode!r}")
        if self.kind == "external" and not self.endpoint:
            raise ValueError("external model requires an endpoint")


# Geometry of the full-size deployed scorers; too slow for CI but valid.
DEPLOYED_SCALE = dict(layers=12, heads=12, embed_dim=768, window=256, max_len=4096)
# Small geometry used throughout the test suite.
TEST_SCALE = dict(layers=4, heads=4, embed_dim=32, window=8, max_len=512)

SEGMENT_BEGIN = "begin_marker"
SEGMENT_SOURCE = "source"
SEGMENT_SEP = "separator"
SEGMENT_SUMMARY = "summary"
SEGMENT_END = "end_marker"


@dataclass(frozen=True)
class ModelInput:
    """Tokenized [BEGIN] source [SEP] summary [END] sequence with per-token
    spans into the concatenated display text."""

    tokens: Tuple[int, ...]
    spans: Tuple[Optional[TextSpan], ...]  # None for marker tokens
    segment: Tuple[str, ...]
    global_flags: Tuple[bool, ...]
    display_text: str
    truncated: bool

    def __len__(self) -> int:
        return len(self.tokens)

    def token_payload(self) -> List[dict]:
        out = []
        for span, seg, glob in zip(self.spans, self.segment, self.global_flags):
            out.append(
                {
                    "start": span.start if span else -1,
                    "end": span.end if span else -1,
                    "surface": span.surface if span else "",
                    "segment": seg,
                    "global": glob,
                }
            )
        return out


@dataclass(frozen=True)
class MaskSpec:
    """Permitted (query, key) pairs: within the window, or either side global."""

    n: int
    half_window: int
    global_flags: np.ndarray  # bool [n]

    def allowed(self, q: int, k: int) -> bool:
        return (
            abs(q - k) <= self.half_window
            or bool(self.global_flags[q])
            or bool(self.global_flags[k])
        )

    def dense(self) -> np.ndarray:
        idx = np.arange(self.n)
        band = np.abs(idx[:, None] - idx[None, :]) <= self.half_window
        g = np.asarray(self.global_flags, dtype=bool)
        return band | g[:, None] | g[None, :]


@dataclass(frozen=True)
class ScoreResult:
    model_id: str
    score: float
    truncated: bool
    attention: Optional[AttentionTensor] = None
    model_input: Optional[ModelInput] = None

    def to_payload(self, include_attention: bool = True) -> dict:
        payload = {
            "model_id": self.model_id,
            "score": self.score,
            "truncated": self.truncated,
        }
        if include_attention and self.attention is not None:
            payload["attention"] = self.attention.to_payload()
        return payload


def build_model_input(
    source: str, summary: str, config: ModelConfig, tokenizer_id: str = "reference"
) -> ModelInput:
    """Tokenize and join a pair; the source tail is truncated if the sequence
    exceeds ``max_len``, the summary never is."""
    tok = get_tokenizer(tokenizer_id)
    src_pairs = tok.encode(source)
    sum_pairs = tok.encode(summary)
    if len(sum_pairs) + 3 > config.max_len:
        raise SummaryTooLongError(
            f"summary too long for model: {len(sum_pairs)} tokens, "
            f"max {config.max_len - 3}"
        )
    budget = config.max_len - 3 - len(sum_pairs)
    truncated = len(src_pairs) > budget
    src_pairs = src_pairs[:budget]

    display = source + "\n" + summary
    shift = len(source.encode("utf-8")) + 1

    tokens: List[int] = [BEGIN_ID]
    spans: List[Optional[TextSpan]] = [None]
    segment: List[str] = [SEGMENT_BEGIN]
    for span, tid in src_pairs:
        tokens.append(tid)
        spans.append(span)
        segment.append(SEGMENT_SOURCE)
    tokens.append(SEP_ID)
    spans.append(None)
    segment.append(SEGMENT_SEP)
    for span, tid in sum_pairs:
        tokens.append(tid)
        spans.append(replace(span, start=span.start + shift, end=span.end + shift))
        segment.append(SEGMENT_SUMMARY)
    tokens.append(END_ID)
    spans.append(None)
    segment.append(SEGMENT_END)

    summary_global = config.global_mode == "summary_global"
    global_flags = tuple(
        seg == SEGMENT_BEGIN or (summary_global and seg == SEGMENT_SUMMARY)
        for seg in segment
    )
    return ModelInput(
        tokens=tuple(tokens),
        spans=tuple(spans),
        segment=tuple(segment),
        global_flags=global_flags,
        display_text=display,
        truncated=truncated,
    )


def build_attention_mask(model_input: ModelInput, config: ModelConfig) -> MaskSpec:
    n = len(model_input)
    if n > config.max_len:
        raise ValueError("input exceeds max_len")
    return MaskSpec(
        n=n,
        half_window=config.window // 2,
        global_flags=np.array(model_input.global_flags, dtype=bool),
    )


# ---------------------------------------------------------------------------
# Reference scorer: a small from-scratch transformer with seeded weights
# ---------------------------------------------------------------------------

def sinusoidal_encoding(n: int, d: int) -> np.ndarray:
    pos = np.arange(n)[:, None].astype(np.float64)
    i = np.arange(d // 2)[None, :].astype(np.float64)
    angles = pos / np.power(10000.0, 2.0 * i / d)
    enc = np.zeros((n, d))
    enc[:, 0::2] = np.sin(angles)
    enc[:, 1::2] = np.cos(angles)
    return enc


@lru_cache(maxsize=16)
def reference_weights(config: ModelConfig) -> dict:
    """Deterministic seeded weight set for a reference model configuration."""
    from .segmentation import VOCAB_SIZE

    rng = np.random.default_rng(config.seed)
    d = config.embed_dim
    scale = 1.0 / math.sqrt(d)
    w: dict = {"embed": rng.standard_normal((VOCAB_SIZE, d)) * scale}
    for l in range(config.layers):
        w[f"wq{l}"] = rng.standard_normal((d, d)) * scale
        w[f"wk{l}"] = rng.standard_normal((d, d)) * scale
        w[f"wv{l}"] = rng.standard_normal((d, d)) * scale
        w[f"wo{l}"] = rng.standard_normal((d, d)) * scale
        w[f"ff1_{l}"] = rng.standard_normal((d, 2 * d)) * scale
        w[f"ffb1_{l}"] = rng.standard_normal(2 * d) * 0.01
        w[f"ff2_{l}"] = rng.standard_normal((2 * d, d)) * scale / math.sqrt(2.0)
        w[f"ffb2_{l}"] = rng.standard_normal(d) * 0.01
    w["head_w"] = rng.standard_normal(d) * scale
    w["head_b"] = float(rng.standard_normal())
    return w


def _layer_norm(x: np.ndarray) -> np.ndarray:
    mean = x.mean(axis=-1, keepdims=True)
    var = x.var(axis=-1, keepdims=True)
    return (x - mean) / np.sqrt(var + LN_EPS)


def reference_forward_raw(
    model_input: ModelInput, config: ModelConfig
) -> Tuple[float, np.ndarray, MaskSpec]:
    """Forward pass returning (score, dense attention [L,H,n,n], mask).

    Deterministic given (tokens, config, seed): hashing embedding lookup plus
    sinusoidal positions; per layer masked multi-head attention, residual +
    layer norm, and a two-layer feed-forward; final score is a linear head
    over the BEGIN token's embedding.
    """
    if config.kind != "reference":
        raise ValueError("reference_forward requires a reference-kind config")
    w = reference_weights(config)
    mask = build_attention_mask(model_input, config)
    n = len(model_input)
    d, H, L = config.embed_dim, config.heads, config.layers
    dh = d // H

    x = w["embed"][list(model_input.tokens)] + sinusoidal_encoding(n, d)
    allowed = mask.dense()
    neg = np.where(allowed, 0.0, -np.inf)
    attn_all = np.zeros((L, H, n, n))

    for l in range(L):
        q = (x @ w[f"wq{l}"]).reshape(n, H, dh).transpose(1, 0, 2)
        k = (x @ w[f"wk{l}"]).reshape(n, H, dh).transpose(1, 0, 2)
        v = (x @ w[f"wv{l}"]).reshape(n, H, dh).transpose(1, 0, 2)
        scores = q @ k.transpose(0, 2, 1) / math.sqrt(dh) + neg[None, :, :]
        scores -= scores.max(axis=-1, keepdims=True)
        e = np.exp(scores)
        attn = e / e.sum(axis=-1, keepdims=True)
        attn_all[l] = attn
        ctx = (attn @ v).transpose(1, 0, 2).reshape(n, d)
        x = _layer_norm(x + ctx @ w[f"wo{l}"])
        ff = np.maximum(x @ w[f"ff1_{l}"] + w[f"ffb1_{l}"], 0.0) @ w[f"ff2_{l}"]
        x = _layer_norm(x + ff + w[f"ffb2_{l}"])

    score = float(w["head_w"] @ x[0] + w["head_b"])
    return score, attn_all, mask


def reference_forward(
    model_input: ModelInput, config: ModelConfig
) -> Tuple[float, AttentionTensor]:
    score, raw, mask = reference_forward_raw(model_input, config)
    return score, ingest_attention(raw, mask)


# ---------------------------------------------------------------------------
# External scorer (JSON over HTTP)
# ---------------------------------------------------------------------------

_SEGMENTS = {SEGMENT_BEGIN, SEGMENT_SOURCE, SEGMENT_SEP, SEGMENT_SUMMARY, SEGMENT_END}


def _require(payload: dict, fld: str, endpoint: str):
    if fld.split(".")[-1] not in payload:
        raise SchemaViolationError(endpoint, fld, "missing")
    return payload[fld.split(".")[-1]]


def external_score(
    endpoint: str,
    request: dict,
    timeout: float = 60.0,
    session: Optional[requests.Session] = None,
) -> ScoreResult:
    """Score one pair against an external scorer and validate the response."""
    http = session or requests
    try:
        resp = http.post(f"{endpoint}/score", json=request, timeout=timeout)
    except requests.Timeout as exc:
        raise ExternalScorerError(endpoint, f"timeout after {timeout}s") from exc
    except requests.RequestException as exc:
        raise ExternalScorerError(endpoint, f"unreachable: {exc}") from exc
    if resp.status_code != 200:
        raise ExternalScorerError(endpoint, f"non-success status {resp.status_code}")
    try:
        payload = resp.json()
    except ValueError as exc:
        raise SchemaViolationError(endpoint, "<body>", "not JSON") from exc

    score = _require(payload, "score", endpoint)
    if not isinstance(score, (int, float)) or not math.isfinite(score):
        raise SchemaViolationError(endpoint, "score", "must be a finite number")
    truncated = payload.get("truncated", False)
    if not isinstance(truncated, bool):
        raise SchemaViolationError(endpoint, "truncated", "must be a boolean")
    tokens = payload.get("tokens", [])
    if not isinstance(tokens, list):
        raise SchemaViolationError(endpoint, "tokens", "must be a list")
    for i, t in enumerate(tokens):
        for key in ("start", "end", "segment", "global"):
            if not isinstance(t, dict) or key not in t:
                raise SchemaViolationError(endpoint, f"tokens[{i}].{key}", "missing")
        if t["segment"] not in _SEGMENTS:
            raise SchemaViolationError(endpoint, f"tokens[{i}].segment", "unknown value")

    tensor = None
    att = payload.get("attention")
    if att is not None:
        if not isinstance(att, dict):
            raise SchemaViolationError(endpoint, "attention", "must be an object")
        for key in ("layers", "heads", "window", "global_indices",
                    "band", "global_rows", "global_cols"):
            if key not in att:
                raise SchemaViolationError(endpoint, f"attention.{key}", "missing")
        for key in ("layers", "heads", "window"):
            if not isinstance(att[key], int) or att[key] <= 0:
                raise SchemaViolationError(
                    endpoint, f"attention.{key}", "must be a positive integer"
                )
        try:
            tensor = AttentionTensor.from_payload(att, n=len(tokens))
        except (ValueError, TypeError) as exc:
            raise SchemaViolationError(endpoint, "attention.band", str(exc)) from exc

    return ScoreResult(
        model_id=request.get("model_id", ""),
        score=float(score),
        truncated=truncated,
        attention=tensor,
    )


# ---------------------------------------------------------------------------
# Registry
# ---------------------------------------------------------------------------

class ModelRegistry:
    """Read-mostly registry of scorer configurations."""

    def __init__(self, configs: Sequence[ModelConfig] = (), timeout: float = 60.0):
        self._models: Dict[str, ModelConfig] = {}
        self.timeout = timeout
        for cfg in configs:
            self.register(cfg)

    def register(self, config: ModelConfig) -> None:
        self._models[config.model_id] = config

    def get(self, model_id: str) -> ModelConfig:
        try:
            return self._models[model_id]
        except KeyError:
            raise ModelNotFoundError(f"model not found: {model_id!r}") from None

    def configs(self) -> List[ModelConfig]:
        return list(self._models.values())

    @classmethod
    def from_file(cls, path, timeout: float = 60.0) -> "ModelRegistry":
        with open(path, "r", encoding="utf-8") as fh:
            records = json.load(fh)
        if not isinstance(records, list):
            raise ValueError("models file must be a JSON array of model configs")
        return cls([ModelConfig(**rec) for rec in records], timeout=timeout)

    def score_pair(
        self,
        model_id: str,
        source: str,
        summary: str,
        want_attention: bool = False,
    ) -> ScoreResult:
        """Score a pair with the named model, optionally capturing attention."""
        config = self.get(model_id)
        if config.kind == "reference":
            model_input = build_model_input(source, summary, config)
            if want_attention:
                score, tensor = reference_forward(model_input, config)
            else:
                score, _, _ = reference_forward_raw(model_input, config)
                tensor = None
            return ScoreResult(
                model_id=model_id,
                score=score,
                truncated=model_input.truncated,
                attention=tensor,
                model_input=model_input,
            )
        request = {
            "model_id": model_id,
            "source": source,
            "summary": summary,
            "want_attention": want_attention,
        }
        return external_score(config.endpoint, request, timeout=self.timeout)
