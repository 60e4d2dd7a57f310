"""Systematic summary perturbation and re-scoring.

Four methods: synonym replacement of non-stop-word spans, sentence masking,
subword-token masking, and three grammar-correction passes.  Every variant
is re-scored against the unchanged source and reported with its score delta
(perturbed minus baseline, so positive means the change raised the score).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, replace as dc_replace
from importlib import resources
from typing import Dict, FrozenSet, List, Optional, Sequence

from .scoring import ModelRegistry, ScoreResult
from .segmentation import SpanKind, TextSpan, get_tokenizer, split_sentences, split_words
from .spelling import FrequencyDictionary, match_case

METHODS = ("words", "sentences", "tokens", "grammar")
GRAMMAR_MODES = ("word_spelling", "compound_spelling", "word_segmentation")


class EmptyLexiconError(ValueError):
    pass


class NoSpansError(ValueError):
    pass


class VariantScoringError(RuntimeError):
    def __init__(self, variant_index: int, cause: Exception):
        super().__init__(f"scoring failed for variant {variant_index}: {cause}")
        self.variant_index = variant_index


@dataclass(frozen=True)
class Variant:
    method: str
    span: Optional[TextSpan]  # absent for grammar variants
    replacement: str
    variant_text: str
    score: Optional[float] = None
    delta: Optional[float] = None

    def to_payload(self) -> dict:
        return {
            "method": self.method,
            "span": None
            if self.span is None
            else {"start": self.span.start, "end": self.span.end,
                  "surface": self.span.surface, "kind": self.span.kind.value},
            "replacement": self.replacement,
            "variant_text": self.variant_text,
            "score": self.score,
            "delta": self.delta,
        }


@dataclass(frozen=True)
class PerturbationReport:
    model_id: str
    method: str
    baseline_score: float
    variants: Sequence[Variant]

    def to_payload(self) -> dict:
        return {
            "model_id": self.model_id,
            "method": self.method,
            "baseline_score": self.baseline_score,
            "variants": [v.to_payload() for v in self.variants],
        }


def load_stopwords(path=None) -> FrozenSet[str]:
    if path is None:
        data = resources.files("scorelens.data").joinpath("stopwords.txt").read_text("utf-8")
    else:
        with open(path, "r", encoding="utf-8") as fh:
            data = fh.read()
    return frozenset(w.strip().lower() for w in data.splitlines() if w.strip())


def load_lexicon(path=None) -> Dict[str, List[str]]:
    """Synonym lexicon: lines of ``word<TAB>synonym1,synonym2,...``."""
    if path is None:
        data = resources.files("scorelens.data").joinpath("lexicon.tsv").read_text("utf-8")
    else:
        with open(path, "r", encoding="utf-8") as fh:
            data = fh.read()
    lexicon: Dict[str, List[str]] = {}
    for line in data.splitlines():
        line = line.strip()
        if not line:
            continue
        word, _, syns = line.partition("\t")
        lexicon[word.strip().lower()] = [s.strip() for s in syns.split(",") if s.strip()]
    return lexicon


def _replace_span(text: str, span: TextSpan, replacement: str) -> str:
    raw = text.encode("utf-8")
    return (raw[: span.start] + replacement.encode("utf-8") + raw[span.end:]).decode("utf-8")


_PUNCT_STRIP_RE = re.compile(r"[^\w\s]+", re.UNICODE)


def _grammar_variants(summary: str, dictionary: FrequencyDictionary) -> List[Variant]:
    # Mode 1: per-word lookup, casing and punctuation preserved.
    corrected = summary
    for span in reversed(split_words(summary)):
        if span.kind is not SpanKind.WORD:
            continue
        fixed = dictionary.lookup(span.surface.lower())
        if fixed is not None and fixed != span.surface.lower():
            corrected = _replace_span(corrected, span, match_case(span.surface, fixed))
    # Mode 2: compound correction on normalized text; sentence structure is
    # intentionally lost (lowercased, punctuation stripped).
    normalized = _PUNCT_STRIP_RE.sub(" ", summary.lower())
    compound = dictionary.lookup_compound(normalized)
    # Mode 3: word segmentation, casing kept, punctuation dropped.
    depunct = _PUNCT_STRIP_RE.sub(" ", summary)
    segmented = " ".join(
        word for chunk in depunct.split() for word in dictionary.segment(chunk)
    )
    return [
        Variant("grammar", None, mode, text)
        for mode, text in zip(GRAMMAR_MODES, (corrected, compound, segmented))
    ]


def generate_variants(
    summary: str,
    method: str,
    *,
    lexicon: Optional[Dict[str, List[str]]] = None,
    dictionary: Optional[FrequencyDictionary] = None,
    stopwords: Optional[FrozenSet[str]] = None,
    tokenizer_id: str = "reference",
) -> List[Variant]:
    """Unscored variants for one perturbation method, in document order."""
    if method not in METHODS:
        raise ValueError(f"unknown perturbation method: {method!r}")

    if method == "words":
        if not lexicon:
            raise EmptyLexiconError("synonym lexicon is empty")
        stop = stopwords if stopwords is not None else load_stopwords()
        out: List[Variant] = []
        for span in split_words(summary):
            if span.kind is not SpanKind.WORD or span.surface.lower() in stop:
                continue
            for lemma in lexicon.get(span.surface.lower(), ()):
                out.append(Variant("words", span, lemma, _replace_span(summary, span, lemma)))
        return out

    if method in ("sentences", "tokens"):
        tokenizer = get_tokenizer(tokenizer_id)
        mask = getattr(tokenizer, "mask_token", None) or "[MASK]"
        spans = (
            split_sentences(summary)
            if method == "sentences"
            else tokenizer.tokenize(summary)
        )
        if not spans:
            raise NoSpansError("no spans")
        return [Variant(method, s, mask, _replace_span(summary, s, mask)) for s in spans]

    if dictionary is None:
        raise ValueError("grammar perturbation requires a frequency dictionary")
    return _grammar_variants(summary, dictionary)


def run_perturbation(
    source: str,
    summary: str,
    model_id: str,
    method: str,
    registry: ModelRegistry,
    *,
    lexicon: Optional[Dict[str, List[str]]] = None,
    dictionary: Optional[FrequencyDictionary] = None,
    stopwords: Optional[FrozenSet[str]] = None,
    tokenizer_id: str = "reference",
) -> PerturbationReport:
    """Score the baseline pair and every variant; all-or-nothing."""
    baseline = registry.score_pair(model_id, source, summary)
    variants = generate_variants(
        summary,
        method,
        lexicon=lexicon,
        dictionary=dictionary,
        stopwords=stopwords,
        tokenizer_id=tokenizer_id,
    )
    scored: List[Variant] = []
    for i, variant in enumerate(variants):
        try:
            result = registry.score_pair(model_id, source, variant.variant_text)
        except Exception as exc:
            raise VariantScoringError(i, exc) from exc
        scored.append(
            dc_replace(variant, score=result.score, delta=result.score - baseline.score)
        )
    return PerturbationReport(
        model_id=model_id,
        method=method,
        baseline_score=baseline.score,
        variants=scored,
    )


def word_underline_value(deltas: Sequence[float]) -> float:
    """The delta with the largest absolute value, sign preserved; ties go to
    the first occurrence."""
    if not deltas:
        raise ValueError("deltas must be non-empty")
    best = deltas[0]
    for d in deltas[1:]:
        if abs(d) > abs(best):
            best = d
    return best
