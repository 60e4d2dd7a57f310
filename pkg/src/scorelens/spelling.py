"""Dictionary-based spelling correction and word segmentation.

Implements symmetric-delete candidate lookup (precomputed deletion index of
the dictionary, verified with Damerau-Levenshtein distance), a compound
correction pass over normalized text, and a dynamic-program word segmenter
that maximizes the product of unigram probabilities.
"""

from __future__ import annotations

import math
from collections import defaultdict
from importlib import resources
from typing import Dict, Iterable, List, Optional, Tuple

MAX_EDIT_DISTANCE = 2
_MAX_SEGMENT_WORD = 24


def damerau_levenshtein(a: str, b: str) -> int:
    """Optimal-string-alignment distance (substitutions, insertions,
    deletions, adjacent transpositions)."""
    la, lb = len(a), len(b)
    if la == 0 or lb == 0:
        return max(la, lb)
    prev2: List[int] = []
    prev = list(range(lb + 1))
    for i in range(1, la + 1):
        cur = [i] + [0] * lb
        for j in range(1, lb + 1):
            cost = 0 if a[i - 1] == b[j - 1] else 1
            cur[j] = min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + cost)
            if i > 1 and j > 1 and a[i - 1] == b[j - 2] and a[i - 2] == b[j - 1]:
                cur[j] = min(cur[j], prev2[j - 2] + 1)
        prev2, prev = prev, cur
    return prev[lb]


def _deletes(word: str, max_edit: int) -> set:
    out = {word}
    frontier = {word}
    for _ in range(max_edit):
        nxt = set()
        for w in frontier:
            for i in range(len(w)):
                nxt.add(w[:i] + w[i + 1:])
        out |= nxt
        frontier = nxt
    return out


class FrequencyDictionary:
    """Word -> count dictionary with a symmetric-delete lookup index."""

    def __init__(self, counts: Dict[str, int], max_edit: int = MAX_EDIT_DISTANCE):
        if not counts:
            raise ValueError("frequency dictionary is empty")
        self.counts = dict(counts)
        self.max_edit = max_edit
        self.total = sum(self.counts.values())
        self._index: Dict[str, List[str]] = defaultdict(list)
        for word in self.counts:
            for d in _deletes(word, max_edit):
                self._index[d].append(word)

    @classmethod
    def from_file(cls, path, max_edit: int = MAX_EDIT_DISTANCE) -> "FrequencyDictionary":
        counts: Dict[str, int] = {}
        with open(path, "r", encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                word, _, count = line.partition(" ")
                counts[word] = int(count)
        return cls(counts, max_edit=max_edit)

    @classmethod
    def bundled(cls) -> "FrequencyDictionary":
        path = resources.files("scorelens.data").joinpath("frequency_dictionary.txt")
        with resources.as_file(path) as p:
            return cls.from_file(p)

    def __contains__(self, word: str) -> bool:
        return word in self.counts

    def probability(self, word: str) -> float:
        return self.counts.get(word, 0) / self.total

    def lookup(self, word: str) -> Optional[str]:
        """Best correction for ``word`` or None if no candidate is within the
        edit-distance bound.  Ranked by (distance, -frequency, word)."""
        word = word.lower()
        if word in self.counts:
            return word
        candidates: Dict[str, int] = {}
        for d in _deletes(word, self.max_edit):
            for cand in self._index.get(d, ()):
                if cand not in candidates:
                    dist = damerau_levenshtein(word, cand)
                    if dist <= self.max_edit:
                        candidates[cand] = dist
        if not candidates:
            return None
        return min(candidates, key=lambda c: (candidates[c], -self.counts[c], c))

    def _log_prob(self, word: str) -> float:
        count = self.counts.get(word.lower())
        if count:
            return math.log(count / self.total)
        # Norvig-style penalty so unknown chunks only survive when nothing
        # in the dictionary explains the characters.
        return math.log(10.0 / (self.total * 10.0 ** len(word)))

    def segment(self, chunk: str) -> List[str]:
        """Split a run-together chunk into the most probable word sequence."""
        if not chunk:
            return []
        n = len(chunk)
        low = chunk.lower()
        best = [-math.inf] * (n + 1)
        back = [0] * (n + 1)
        best[0] = 0.0
        for i in range(1, n + 1):
            for j in range(max(0, i - _MAX_SEGMENT_WORD), i):
                cand = best[j] + self._log_prob(low[j:i])
                if cand > best[i]:
                    best[i] = cand
                    back[i] = j
        cuts = []
        i = n
        while i > 0:
            cuts.append((back[i], i))
            i = back[i]
        return [chunk[s:e] for s, e in reversed(cuts)]

    def lookup_compound(self, text: str) -> str:
        """Correct a whitespace-separated token stream, falling back to word
        segmentation for tokens with no in-bound correction."""
        out: List[str] = []
        for token in text.split():
            if token in self.counts:
                out.append(token)
                continue
            fixed = self.lookup(token)
            if fixed is not None:
                out.append(fixed)
                continue
            out.extend(self.segment(token))
        return " ".join(out)


def match_case(template: str, word: str) -> str:
    """Transfer the casing pattern of ``template`` onto ``word``."""
    if template.isupper() and len(template) > 1:
        return word.upper()
    if template[:1].isupper():
        return word[:1].upper() + word[1:]
    return word
