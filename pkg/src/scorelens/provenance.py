"""Provenance of scoring runs and the expert-scored training distribution.

Runs are appended to a line-delimited JSON event log so the full revision
history of every summary slot survives restarts.  The training corpus is
ingested from line-delimited JSON; Content/Wording targets can be derived
from the six-criterion rubric by PCA with z-score normalization.
"""

from __future__ import annotations

import hashlib
import json
import os
import threading
import time
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .assignments import Assignment, SummarySlot

RUBRIC_CRITERIA = (
    "main_idea",
    "details",
    "cohesion",
    "objective_language",
    "paraphrasing",
    "language_beyond_source",
)
CONTENT_CRITERIA = slice(0, 4)  # main idea, details, cohesion, objective language
HISTOGRAM_BINS = 20


class DegenerateRubricError(ValueError):
    pass


@dataclass(frozen=True)
class RunEntry:
    slot_id: str
    summary_text: str
    summary_sha256: str
    model_id: str
    score: float


@dataclass(frozen=True)
class RunRecord:
    run_number: int
    timestamp: float
    entries: Tuple[RunEntry, ...]

    def to_payload(self) -> dict:
        return {
            "run_number": self.run_number,
            "timestamp": self.timestamp,
            "entries": [
                {
                    "slot_id": e.slot_id,
                    "summary_text": e.summary_text,
                    "summary_sha256": e.summary_sha256,
                    "model_id": e.model_id,
                    "score": e.score,
                }
                for e in self.entries
            ],
        }


def _hash_text(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


class EventLog:
    """Append-only run log; replaying the file reconstructs identical state."""

    def __init__(self, path):
        self.path = str(path)
        self._lock = threading.Lock()
        self._records: List[RunRecord] = []
        if os.path.exists(self.path):
            with open(self.path, "r", encoding="utf-8") as fh:
                for line in fh:
                    line = line.strip()
                    if not line:
                        continue
                    rec = json.loads(line)
                    self._records.append(
                        RunRecord(
                            run_number=rec["run_number"],
                            timestamp=rec["timestamp"],
                            entries=tuple(RunEntry(**e) for e in rec["entries"]),
                        )
                    )

    @property
    def next_run_number(self) -> int:
        return (self._records[-1].run_number if self._records else 0) + 1

    def record_run(
        self, assignment: Assignment, scores: Sequence[Tuple[str, str, float]]
    ) -> RunRecord:
        """Append one run of ``(slot_id, model_id, score)`` entries; the full
        summary text of each slot is persisted so prior versions stay
        recoverable."""
        if not scores:
            raise ValueError("a run must contain at least one entry")
        with self._lock:
            entries = tuple(
                RunEntry(
                    slot_id=slot_id,
                    summary_text=assignment.slot(slot_id).text,
                    summary_sha256=_hash_text(assignment.slot(slot_id).text),
                    model_id=model_id,
                    score=float(score),
                )
                for slot_id, model_id, score in scores
            )
            record = RunRecord(
                run_number=self.next_run_number,
                timestamp=time.time(),
                entries=entries,
            )
            with open(self.path, "a", encoding="utf-8") as fh:
                fh.write(json.dumps(record.to_payload()) + "\n")
                fh.flush()
                os.fsync(fh.fileno())
            self._records.append(record)
            return record

    def records(self) -> List[RunRecord]:
        return list(self._records)

    def get_history(self, slot_id: str) -> List[dict]:
        """Chronological (run_number, model_id, score, summary_text) rows."""
        rows = []
        for rec in self._records:
            for e in rec.entries:
                if e.slot_id == slot_id:
                    rows.append(
                        {
                            "run_number": rec.run_number,
                            "model_id": e.model_id,
                            "score": e.score,
                            "summary_text": e.summary_text,
                        }
                    )
        return rows


# ---------------------------------------------------------------------------
# Training corpus
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TrainingExample:
    example_id: str
    source: str
    summary: str
    content: float
    wording: float
    rubric: Optional[Tuple[float, ...]] = None

    def __post_init__(self):
        if self.rubric is not None:
            if len(self.rubric) != len(RUBRIC_CRITERIA):
                raise ValueError("rubric must have six criteria")
            if any(not (1.0 <= r <= 4.0) for r in self.rubric):
                raise ValueError("rubric values must be in [1, 4]")
        if not (np.isfinite(self.content) and np.isfinite(self.wording)):
            raise ValueError("content/wording must be finite")


@dataclass(frozen=True)
class IngestReport:
    accepted: int
    rejected: List[Tuple[int, str]]  # (line number, reason)


class TrainingStore:
    """In-memory index of the expert-scored training corpus."""

    def __init__(self):
        self._examples: Dict[str, TrainingExample] = {}

    def ingest(self, path) -> IngestReport:
        """Ingest line-delimited JSON; malformed lines are reported with line
        numbers and skipped."""
        accepted = 0
        rejected: List[Tuple[int, str]] = []
        with open(path, "r", encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    rec = json.loads(line)
                    example = TrainingExample(
                        example_id=str(rec["example_id"]),
                        source=rec["source"],
                        summary=rec["summary"],
                        content=float(rec["content"]),
                        wording=float(rec["wording"]),
                        rubric=tuple(float(r) for r in rec["rubric"])
                        if rec.get("rubric") is not None
                        else None,
                    )
                except (KeyError, TypeError, ValueError) as exc:
                    rejected.append((lineno, str(exc)))
                    continue
                self._examples[example.example_id] = example
                accepted += 1
        return IngestReport(accepted=accepted, rejected=rejected)

    def __len__(self) -> int:
        return len(self._examples)

    def get(self, example_id: str) -> TrainingExample:
        try:
            return self._examples[example_id]
        except KeyError:
            raise KeyError(f"training example not found: {example_id!r}") from None

    def examples(self) -> List[TrainingExample]:
        return list(self._examples.values())


# ---------------------------------------------------------------------------
# Content/Wording derivation (PCA + z-score normalization)
# ---------------------------------------------------------------------------

def derive_component_scores(rubric: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Distill an N x 6 rubric matrix into z-normalized Content and Wording
    component scores.

    The first two principal components of the mean-centered criteria are
    retained; each is sign-aligned to correlate positively with the row-mean
    rubric score and z-normalized (mean 0, sample std 1).  The component
    whose loadings put more absolute mass on the content criteria (main
    idea, details, cohesion, objective language) is labeled Content.
    """
    X = np.asarray(rubric, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != len(RUBRIC_CRITERIA):
        raise ValueError("rubric matrix must be N x 6")
    n = X.shape[0]
    if n < 3:
        raise ValueError("need at least 3 rubric rows")
    if np.any(X.var(axis=0) == 0.0):
        raise DegenerateRubricError("degenerate rubric criterion")

    Xc = X - X.mean(axis=0)
    cov = (Xc.T @ Xc) / (n - 1)
    eigvals, eigvecs = np.linalg.eigh(cov)
    order = np.argsort(eigvals)[::-1]
    components = eigvecs[:, order[:2]]  # 6 x 2
    scores = Xc @ components  # N x 2

    row_mean = X.mean(axis=1)
    for j in range(2):
        if np.std(scores[:, j]) == 0.0:
            raise DegenerateRubricError("degenerate rubric criterion")
        if np.corrcoef(scores[:, j], row_mean)[0, 1] < 0:
            scores[:, j] = -scores[:, j]
            components[:, j] = -components[:, j]

    mass = np.abs(components[CONTENT_CRITERIA, :]).sum(axis=0)
    content_col = int(np.argmax(mass))
    wording_col = 1 - content_col

    def z(v: np.ndarray) -> np.ndarray:
        return (v - v.mean()) / v.std(ddof=1)

    return z(scores[:, content_col]), z(scores[:, wording_col])


# ---------------------------------------------------------------------------
# Scatter / histogram payloads
# ---------------------------------------------------------------------------

def _axis_value(example: TrainingExample, dimension: str) -> float:
    if dimension == "wording":
        return example.wording
    return example.content


def _histogram(training_values: Sequence[float], all_values: Sequence[float]) -> List[dict]:
    if not training_values:
        return []
    lo = float(min(all_values))
    hi = float(max(all_values))
    if hi == lo:
        lo, hi = lo - 0.5, hi + 0.5
    edges = np.linspace(lo, hi, HISTOGRAM_BINS + 1)
    counts, _ = np.histogram(np.asarray(training_values, dtype=float), bins=edges)
    return [
        {"lo": float(edges[i]), "hi": float(edges[i + 1]), "count": int(counts[i])}
        for i in range(HISTOGRAM_BINS)
    ]


def scatter_payload(
    training: TrainingStore,
    log: EventLog,
    x_model: str,
    y_model: str,
    x_dimension: str = "content",
    y_dimension: str = "wording",
) -> dict:
    """Layers for the training-distribution scatter: training points, current
    per-run points, provenance arrows, and 20-bin axis histograms."""
    training_points = [
        {
            "example_id": ex.example_id,
            "x": _axis_value(ex, x_dimension),
            "y": _axis_value(ex, y_dimension),
        }
        for ex in training.examples()
    ]

    # One current point per (slot, run) where both models scored the slot.
    per_slot: Dict[str, List[dict]] = {}
    for rec in log.records():
        by_slot: Dict[str, Dict[str, float]] = {}
        for e in rec.entries:
            by_slot.setdefault(e.slot_id, {})[e.model_id] = e.score
        for slot_id, scores in by_slot.items():
            if x_model in scores and y_model in scores:
                per_slot.setdefault(slot_id, []).append(
                    {
                        "slot_id": slot_id,
                        "run_number": rec.run_number,
                        "x": scores[x_model],
                        "y": scores[y_model],
                    }
                )

    current_points = [p for pts in per_slot.values() for p in pts]
    current_points.sort(key=lambda p: (p["run_number"], p["slot_id"]))
    run_arrows = []
    for slot_id in sorted(per_slot):
        pts = per_slot[slot_id]
        for a, b in zip(pts, pts[1:]):
            run_arrows.append(
                {
                    "slot_id": slot_id,
                    "from_run": a["run_number"],
                    "to_run": b["run_number"],
                    "x0": a["x"], "y0": a["y"], "x1": b["x"], "y1": b["y"],
                }
            )

    xs = [p["x"] for p in training_points]
    ys = [p["y"] for p in training_points]
    all_x = xs + [p["x"] for p in current_points]
    all_y = ys + [p["y"] for p in current_points]
    return {
        "training_points": training_points,
        "current_points": current_points,
        "run_arrows": run_arrows,
        "x_hist": _histogram(xs, all_x),
        "y_hist": _histogram(ys, all_y),
    }


def example_slot_id(example_id: str) -> str:
    return f"example-{example_id}"


def load_example(training: TrainingStore, example_id: str) -> Assignment:
    """Materialize a training example as a scoreable assignment.

    The slot id is deterministic per example, so scores recorded for a loaded
    example are found again by ``get_history`` on the next load."""
    ex = training.get(example_id)
    return Assignment(
        assignment_id=example_slot_id(example_id),
        source=ex.source,
        slots=[SummarySlot(slot_id=example_slot_id(example_id), text=ex.summary)],
    )
