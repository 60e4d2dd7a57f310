"""Assignments: one source text plus N summary slots with analysis options."""

from __future__ import annotations

import uuid
from dataclasses import dataclass, field
from typing import Dict, List, Sequence

ANALYSIS_OPTIONS = ("grammar", "words", "sentences", "tokens", "attention")


@dataclass(frozen=True)
class AnalysisOptions:
    grammar: bool = False
    words: bool = False
    sentences: bool = False
    tokens: bool = False
    attention: bool = False

    @classmethod
    def from_payload(cls, payload: dict) -> "AnalysisOptions":
        return cls(**{k: bool(payload.get(k, False)) for k in ANALYSIS_OPTIONS})

    def to_payload(self) -> dict:
        return {k: getattr(self, k) for k in ANALYSIS_OPTIONS}


@dataclass(frozen=True)
class SummarySlot:
    slot_id: str
    text: str
    options: AnalysisOptions = AnalysisOptions()


@dataclass(frozen=True)
class Assignment:
    assignment_id: str
    source: str
    slots: Sequence[SummarySlot]

    def slot(self, slot_id: str) -> SummarySlot:
        for s in self.slots:
            if s.slot_id == slot_id:
                return s
        raise KeyError(f"slot not found: {slot_id!r}")

    def to_payload(self) -> dict:
        return {
            "assignment_id": self.assignment_id,
            "source": self.source,
            "summaries": [
                {"slot_id": s.slot_id, "text": s.text, "options": s.options.to_payload()}
                for s in self.slots
            ],
        }


def new_assignment(source: str, summaries: Sequence[dict]) -> Assignment:
    """Build an assignment from API-shaped summary payloads."""
    aid = uuid.uuid4().hex[:12]
    slots = [
        SummarySlot(
            slot_id=item.get("slot_id") or f"{aid}-s{i}",
            text=item["text"],
            options=AnalysisOptions.from_payload(item.get("options", {})),
        )
        for i, item in enumerate(summaries)
    ]
    return Assignment(assignment_id=aid, source=source, slots=slots)
