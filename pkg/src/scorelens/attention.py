"""Windowed sparse storage and slicing of attention tensors.

A scorer emits dense per-layer/head attention matrices; here they are packed
into a banded layout (each query keeps only its window of key offsets) plus
dedicated blocks for global tokens.  Slicing preserves the distinction
between a stored weight of exactly 0.0 and a (query, key) pair the mask
never permitted.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

ROW_SUM_TOL = 1e-5


class MaskViolationError(ValueError):
    pass


@dataclass(frozen=True, slots=True)
class CellState:
    """One heatmap cell: a weight, an exact zero, or a masked-out pair."""

    state: str  # "weight" | "zero" | "missing"
    value: Optional[float] = None

    @classmethod
    def of_weight(cls, value: float) -> "CellState":
        return cls("zero") if value == 0.0 else cls("weight", float(value))

    @classmethod
    def missing(cls) -> "CellState":
        return cls("missing")

    def to_payload(self) -> dict:
        if self.state == "weight":
            return {"s": "w", "v": self.value}
        if self.state == "zero":
            return {"s": "z"}
        return {"s": "m"}


@dataclass(frozen=True)
class AttentionTensor:
    """Banded attention storage: ``band[l, h, q, off]`` holds the weight from
    query ``q`` to key ``q + off - w/2``; keys that are global live once in
    ``global_cols``, and global queries keep their full rows in
    ``global_rows``."""

    n: int
    layers: int
    heads: int
    window: int  # total width; each side sees window/2 neighbors
    global_indices: Tuple[int, ...]
    band: np.ndarray  # [L, H, n, w+1] float32
    band_present: np.ndarray  # [L, H, n, w+1] bool
    global_rows: np.ndarray  # [L, H, g, n] float32
    global_cols: np.ndarray  # [L, H, n, g] float32
    _gpos: Dict[int, int] = field(default_factory=dict, repr=False)

    def __post_init__(self):
        object.__setattr__(
            self, "_gpos", {p: i for i, p in enumerate(self.global_indices)}
        )

    @property
    def half_window(self) -> int:
        return self.window // 2

    def is_global(self, pos: int) -> bool:
        return pos in self._gpos

    def cell(self, layer: int, head: int, q: int, k: int) -> CellState:
        if not (0 <= layer < self.layers and 0 <= head < self.heads):
            raise IndexError(f"layer/head out of range: ({layer}, {head})")
        if not (0 <= q < self.n and 0 <= k < self.n):
            raise IndexError(f"token index out of range: ({q}, {k})")
        if q in self._gpos:
            return CellState.of_weight(self.global_rows[layer, head, self._gpos[q], k])
        if k in self._gpos:
            return CellState.of_weight(self.global_cols[layer, head, q, self._gpos[k]])
        off = k - q + self.half_window
        if 0 <= off <= self.window and self.band_present[layer, head, q, off]:
            return CellState.of_weight(self.band[layer, head, q, off])
        return CellState.missing()

    def row_values(self, layer: int, head: int, q: int) -> List[float]:
        """All non-missing weights of one softmax row, keys deduplicated."""
        return [
            c.value if c.state == "weight" else 0.0
            for k in range(self.n)
            for c in (self.cell(layer, head, q, k),)
            if c.state != "missing"
        ]

    def to_payload(self) -> dict:
        def nested(arr: np.ndarray, present: Optional[np.ndarray] = None):
            if present is None:
                return arr.astype(float).tolist()
            out = arr.astype(object)
            out[~present] = None
            return out.tolist()

        return {
            "layers": self.layers,
            "heads": self.heads,
            "window": self.window,
            "global_indices": list(self.global_indices),
            "band": nested(self.band.astype(float), self.band_present),
            "global_rows": self.global_rows.astype(float).tolist(),
            "global_cols": self.global_cols.astype(float).tolist(),
        }

    @classmethod
    def from_payload(cls, payload: dict, n: int) -> "AttentionTensor":
        L, H, w = payload["layers"], payload["heads"], payload["window"]
        g = sorted(payload["global_indices"])
        band_raw = np.array(
            [[[[np.nan if c is None else c for c in row] for row in head]
              for head in layer] for layer in payload["band"]],
            dtype=np.float64,
        )
        present = ~np.isnan(band_raw)
        band = np.where(present, band_raw, 0.0).astype(np.float32)
        grows = np.asarray(payload["global_rows"], dtype=np.float32)
        gcols = np.asarray(payload["global_cols"], dtype=np.float32)
        if grows.size == 0:
            grows = grows.reshape(L, H, 0, n)
        if gcols.size == 0:
            gcols = gcols.reshape(L, H, n, 0)
        return cls(
            n=n, layers=L, heads=H, window=w, global_indices=tuple(g),
            band=band, band_present=present, global_rows=grows, global_cols=gcols,
        )


def ingest_attention(raw: np.ndarray, mask) -> AttentionTensor:
    """Pack dense per-layer/head matrices ``raw[L, H, n, n]`` into the
    windowed layout, validating the weights against ``mask``.

    Keys that are both in-window and global are stored once, in the global
    block.  Cells the mask forbids are recorded as missing.
    """
    raw = np.asarray(raw, dtype=np.float64)
    L, H, n, n2 = raw.shape
    if n != n2 or n != mask.n:
        raise ValueError("raw attention shape does not match mask")
    allowed = mask.dense()
    viol = (raw != 0.0) & ~allowed[None, None, :, :]
    if viol.any():
        l, h, q, k = (int(i[0]) for i in np.nonzero(viol))
        raise MaskViolationError(f"mask violation at ({l}, {h}, {q}, {k})")

    half = mask.half_window
    w = 2 * half
    gidx = tuple(int(i) for i in np.nonzero(mask.global_flags)[0])
    g = len(gidx)
    is_global = np.asarray(mask.global_flags, dtype=bool)

    band = np.zeros((L, H, n, w + 1), dtype=np.float32)
    present = np.zeros((L, H, n, w + 1), dtype=bool)
    for off in range(-half, half + 1):
        qs = np.arange(max(0, -off), min(n, n - off))
        if qs.size == 0:
            continue
        ks = qs + off
        keep = ~is_global[qs] & ~is_global[ks]
        qs, ks = qs[keep], ks[keep]
        band[:, :, qs, off + half] = raw[:, :, qs, ks]
        present[:, :, qs, off + half] = True

    grows = np.zeros((L, H, g, n), dtype=np.float32)
    gcols = np.zeros((L, H, n, g), dtype=np.float32)
    for i, pos in enumerate(gidx):
        grows[:, :, i, :] = raw[:, :, pos, :]
        gcols[:, :, :, i] = raw[:, :, :, pos]

    return AttentionTensor(
        n=n, layers=L, heads=H, window=w, global_indices=gidx,
        band=band, band_present=present, global_rows=grows, global_cols=gcols,
    )


def classify_cell(tensor: AttentionTensor, layer: int, head: int, q: int, k: int) -> CellState:
    """Weight / zero / missing state of a single (layer, head, q, k) cell."""
    return tensor.cell(layer, head, q, k)


def slice_attention(
    tensor: AttentionTensor,
    query_token: int,
    mode: str,
    *,
    layer: Optional[int] = None,
    head: Optional[int] = None,
) -> Union[List[List[CellState]], List[CellState]]:
    """Slice one query token's attention.

    ``by_layer`` (fixed head): n x L matrix; ``by_head`` (fixed layer):
    n x H matrix; ``rug`` (fixed layer and head): length-n vector.
    """
    if not 0 <= query_token < tensor.n:
        raise IndexError(f"query token out of range: {query_token}")
    if mode == "by_layer":
        if head is None or not 0 <= head < tensor.heads:
            raise IndexError(f"head out of range: {head}")
        return [
            [tensor.cell(l, head, query_token, k) for l in range(tensor.layers)]
            for k in range(tensor.n)
        ]
    if mode == "by_head":
        if layer is None or not 0 <= layer < tensor.layers:
            raise IndexError(f"layer out of range: {layer}")
        return [
            [tensor.cell(layer, h, query_token, k) for h in range(tensor.heads)]
            for k in range(tensor.n)
        ]
    if mode == "rug":
        if layer is None or not 0 <= layer < tensor.layers:
            raise IndexError(f"layer out of range: {layer}")
        if head is None or not 0 <= head < tensor.heads:
            raise IndexError(f"head out of range: {head}")
        return [tensor.cell(layer, head, query_token, k) for k in range(tensor.n)]
    raise ValueError(f"unknown slice mode: {mode!r}")


def storage_cells(n: int, w: int, layers: int, heads: int, mode: str) -> int:
    """Cell count of the windowed layout (n*w*L*H) vs a dense one (n^2*L*H)."""
    if min(n, layers, heads) <= 0 or (mode == "windowed" and w <= 0):
        raise ValueError("arguments must be positive")
    if mode == "windowed":
        return n * w * layers * heads
    if mode == "full_global":
        return n * n * layers * heads
    raise ValueError(f"unknown storage mode: {mode!r}")
