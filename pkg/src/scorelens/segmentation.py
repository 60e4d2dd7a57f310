"""Deterministic text segmentation with byte-offset provenance.

Three granularities are provided: treebank-style word/punctuation spans,
sentence spans with an abbreviation-aware boundary detector, and subword
token spans produced by a registered tokenizer.  Every span records byte
offsets into the UTF-8 encoding of the input plus the exact surface string,
so downstream annotations always map back to the original text.
"""

from __future__ import annotations

import re
import zlib
from dataclasses import dataclass
from enum import Enum
from importlib import resources
from typing import Iterable, List, Optional, Sequence, Tuple


class SpanKind(str, Enum):
    WORD = "word"
    PUNCTUATION = "punctuation"
    SENTENCE = "sentence"
    SUBWORD = "subword"


@dataclass(frozen=True, slots=True)
class TextSpan:
    """Half-open ``[start, end)`` byte span into the UTF-8 source text."""

    start: int
    end: int
    kind: SpanKind
    surface: str

    def __post_init__(self) -> None:
        if not (0 <= self.start < self.end):
            raise ValueError(f"invalid span offsets [{self.start}, {self.end})")


class TokenizerNotRegisteredError(KeyError):
    pass


def _byte_offsets(text: str) -> List[int]:
    """Map each character index (and the end position) to its byte offset."""
    offsets = [0] * (len(text) + 1)
    pos = 0
    for i, ch in enumerate(text):
        offsets[i] = pos
        pos += len(ch.encode("utf-8"))
    offsets[len(text)] = pos
    return offsets


# ---------------------------------------------------------------------------
# Word-level segmentation (Penn-Treebank style contraction/punct rules)
# ---------------------------------------------------------------------------

_TOKEN_RE = re.compile(r"\w+(?:'\w+)*|[^\w\s]", re.UNICODE)
_CONTRACTION_RE = re.compile(r"^(.+?)('(?:ll|ve|re|d|s|m))$", re.IGNORECASE)
_HAS_WORD_RE = re.compile(r"\w")


def _split_token(text: str, cstart: int, cend: int) -> List[Tuple[int, int]]:
    """Apply treebank contraction rules to one regex match, in char offsets."""
    piece = text[cstart:cend]
    low = piece.lower()
    if low.endswith("n't") and len(piece) > 3:
        return [(cstart, cend - 3), (cend - 3, cend)]
    if low == "cannot":
        return [(cstart, cstart + 3), (cstart + 3, cend)]
    m = _CONTRACTION_RE.match(piece)
    if m and "'" not in m.group(1):
        cut = cstart + len(m.group(1))
        return [(cstart, cut), (cut, cend)]
    return [(cstart, cend)]


def split_words(text: str) -> List[TextSpan]:
    """Word and punctuation spans in document order.

    Contractions split treebank-style ("don't" -> "do", "n't"); punctuation
    attached to words becomes separate punctuation spans.
    """
    if not text:
        return []
    byte_of = _byte_offsets(text)
    spans: List[TextSpan] = []
    for m in _TOKEN_RE.finditer(text):
        for cs, ce in _split_token(text, m.start(), m.end()):
            surface = text[cs:ce]
            kind = SpanKind.WORD if _HAS_WORD_RE.search(surface) else SpanKind.PUNCTUATION
            spans.append(TextSpan(byte_of[cs], byte_of[ce], kind, surface))
    return spans


# ---------------------------------------------------------------------------
# Sentence segmentation
# ---------------------------------------------------------------------------

def _load_default_abbreviations() -> frozenset[str]:
    data = resources.files("scorelens.data").joinpath("abbreviations.txt").read_text("utf-8")
    return frozenset(line.strip().lower() for line in data.splitlines() if line.strip())


_DEFAULT_ABBREVIATIONS: Optional[frozenset[str]] = None

_TERMINAL_RE = re.compile(r"[.!?]+[\"')\]]*")
_BLANK_LINE_RE = re.compile(r"\n[ \t]*\n")


def _abbreviations() -> frozenset[str]:
    global _DEFAULT_ABBREVIATIONS
    if _DEFAULT_ABBREVIATIONS is None:
        _DEFAULT_ABBREVIATIONS = _load_default_abbreviations()
    return _DEFAULT_ABBREVIATIONS


def _word_before(text: str, idx: int) -> str:
    """Letters immediately preceding position ``idx`` (exclusive)."""
    start = idx
    while start > 0 and (text[start - 1].isalpha() or text[start - 1] == "."):
        start -= 1
    return text[start:idx]


def _is_boundary(text: str, match: re.Match, abbreviations: frozenset[str]) -> bool:
    end = match.end()
    # Abbreviations and single-letter initials never end a sentence on ".".
    if match.group(0).startswith("."):
        prev = _word_before(text, match.start())
        if (prev + ".").lower() in abbreviations:
            return False
        if len(prev) == 1 and prev.isalpha() and prev.isupper():
            return False
    if end >= len(text):
        return True
    rest = text[end:]
    if not rest[0].isspace():
        return False
    nxt = rest.lstrip()
    if not nxt:
        return True
    first = nxt[0]
    return first.isupper() or first.isdigit() or first in "\"'(["


def split_sentences(text: str, abbreviations: Optional[Iterable[str]] = None) -> List[TextSpan]:
    """Sentence spans in order; blank lines are hard boundaries.

    Boundaries fall at sentence-final ``.``, ``!`` or ``?`` followed by
    whitespace and a capital (or end of text); abbreviations from the
    configurable list never break a sentence.
    """
    if not text.strip():
        return []
    abbrevs = (
        frozenset(a.strip().lower() for a in abbreviations)
        if abbreviations is not None
        else _abbreviations()
    )
    byte_of = _byte_offsets(text)

    # Blank lines partition the text into hard blocks first.
    blocks: List[Tuple[int, int]] = []
    prev = 0
    for m in _BLANK_LINE_RE.finditer(text):
        blocks.append((prev, m.start()))
        prev = m.end()
    blocks.append((prev, len(text)))

    spans: List[TextSpan] = []
    for bstart, bend in blocks:
        block = text[bstart:bend]
        if not block.strip():
            continue
        cuts = [0]
        for m in _TERMINAL_RE.finditer(block):
            if m.end() < len(block) and _is_boundary(block, m, abbrevs):
                cuts.append(m.end())
        cuts.append(len(block))
        for cs, ce in zip(cuts, cuts[1:]):
            raw = block[cs:ce]
            lead = len(raw) - len(raw.lstrip())
            trail = len(raw) - len(raw.rstrip())
            if lead + trail >= len(raw):
                continue
            s = bstart + cs + lead
            e = bstart + ce - trail
            spans.append(TextSpan(byte_of[s], byte_of[e], SpanKind.SENTENCE, text[s:e]))
    return spans


# ---------------------------------------------------------------------------
# Subword tokenization
# ---------------------------------------------------------------------------

_PIECE_RE = re.compile(r"[^\W\d_]+|\d+|.", re.UNICODE | re.DOTALL)
_MAX_PIECE_CHARS = 8

VOCAB_SIZE = 8192
PAD_ID, BEGIN_ID, SEP_ID, END_ID, MASK_ID = 0, 1, 2, 3, 4
_FIRST_PIECE_ID = 5


class ReferenceTokenizer:
    """Hashing subword tokenizer: lowercased word pieces hashed into a
    fixed vocabulary.  Deterministic and dependency-free."""

    mask_token = "[MASK]"
    vocab_size = VOCAB_SIZE

    def piece_id(self, piece: str) -> int:
        digest = zlib.crc32(piece.lower().encode("utf-8"))
        return _FIRST_PIECE_ID + digest % (VOCAB_SIZE - _FIRST_PIECE_ID)

    def encode(self, text: str) -> List[Tuple[TextSpan, int]]:
        """Subword spans with token ids; every non-whitespace byte is covered
        by exactly one span."""
        if not text:
            return []
        byte_of = _byte_offsets(text)
        out: List[Tuple[TextSpan, int]] = []
        for run in re.finditer(r"\S+", text):
            for pm in _PIECE_RE.finditer(text, run.start(), run.end()):
                ps, pe = pm.start(), pm.end()
                for cs in range(ps, pe, _MAX_PIECE_CHARS):
                    ce = min(cs + _MAX_PIECE_CHARS, pe)
                    surface = text[cs:ce]
                    span = TextSpan(byte_of[cs], byte_of[ce], SpanKind.SUBWORD, surface)
                    out.append((span, self.piece_id(surface)))
        return out

    def tokenize(self, text: str) -> List[TextSpan]:
        return [span for span, _ in self.encode(text)]


_TOKENIZERS: dict[str, ReferenceTokenizer] = {"reference": ReferenceTokenizer()}


def register_tokenizer(tokenizer_id: str, tokenizer) -> None:
    _TOKENIZERS[tokenizer_id] = tokenizer


def get_tokenizer(tokenizer_id: str):
    try:
        return _TOKENIZERS[tokenizer_id]
    except KeyError:
        raise TokenizerNotRegisteredError(
            f"tokenizer not registered: {tokenizer_id!r}"
        ) from None


def subword_tokenize(text: str, tokenizer_id: str = "reference") -> List[TextSpan]:
    """Subword token spans for ``text`` under the named tokenizer."""
    return get_tokenizer(tokenizer_id).tokenize(text)
