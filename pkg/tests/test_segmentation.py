import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from scorelens.segmentation import (
    ReferenceTokenizer,
    SpanKind,
    TokenizerNotRegisteredError,
    split_sentences,
    split_words,
    subword_tokenize,
)


def surfaces(spans):
    return [s.surface for s in spans]


class TestSplitWords:
    def test_empty(self):
        assert split_words("") == []

    def test_basic_sentence(self):
        spans = split_words("The cat sat.")
        assert surfaces(spans) == ["The", "cat", "sat", "."]
        assert spans[-1].kind is SpanKind.PUNCTUATION
        assert all(s.kind is SpanKind.WORD for s in spans[:-1])

    def test_contraction(self):
        assert surfaces(split_words("don't stop")) == ["do", "n't", "stop"]

    @pytest.mark.parametrize(
        "text,expected",
        [
            ("I'll go", ["I", "'ll", "go"]),
            ("we've won", ["we", "'ve", "won"]),
            ("she's here", ["she", "'s", "here"]),
            ("cannot", ["can", "not"]),
            ("won't", ["wo", "n't"]),
        ],
    )
    def test_treebank_contractions(self, text, expected):
        assert surfaces(split_words(text)) == expected

    def test_punctuation_separated(self):
        spans = split_words('He said, "go!"')
        assert surfaces(spans) == ["He", "said", ",", '"', "go", "!", '"']

    def test_byte_offsets_multibyte(self):
        text = "café time"
        spans = split_words(text)
        raw = text.encode("utf-8")
        for s in spans:
            assert raw[s.start:s.end].decode("utf-8") == s.surface


class TestSplitSentences:
    def test_two_terminal_marks(self):
        spans = split_sentences("One. Two!")
        assert surfaces(spans) == ["One.", "Two!"]

    def test_no_terminal_punctuation(self):
        spans = split_sentences("No terminal punctuation")
        assert len(spans) == 1
        assert spans[0].surface == "No terminal punctuation"

    def test_abbreviation_does_not_break(self):
        spans = split_sentences("Dr. Smith left. He returned.")
        assert surfaces(spans) == ["Dr. Smith left.", "He returned."]

    def test_custom_abbreviations(self):
        spans = split_sentences("See ref. Alpha next.", abbreviations=["ref."])
        assert len(spans) == 1

    def test_blank_line_hard_boundary(self):
        spans = split_sentences("first block\n\nsecond block")
        assert surfaces(spans) == ["first block", "second block"]

    def test_question_and_exclamation(self):
        spans = split_sentences("Really? Yes! Fine.")
        assert surfaces(spans) == ["Really?", "Yes!", "Fine."]

    def test_reconstruction(self):
        text = "One sentence here. Another one follows!  And a third."
        spans = split_sentences(text)
        raw = text.encode("utf-8")
        rebuilt = b""
        prev = 0
        for s in spans:
            rebuilt += raw[prev:s.start] + raw[s.start:s.end]
            prev = s.end
        rebuilt += raw[prev:]
        assert rebuilt == raw


class TestSubwordTokenize:
    def test_empty(self):
        assert subword_tokenize("") == []

    def test_coverage(self):
        spans = subword_tokenize("hello")
        assert len(spans) >= 1
        assert spans[0].start == 0 and spans[-1].end == 5

    def test_unknown_tokenizer(self):
        with pytest.raises(TokenizerNotRegisteredError, match="tokenizer not registered"):
            subword_tokenize("x", "no-such-tokenizer")

    def test_every_nonspace_byte_covered_once(self):
        text = "The café reopened, finally -- 42 days later!"
        raw = text.encode("utf-8")
        covered = [False] * len(raw)
        for s in subword_tokenize(text):
            for b in range(s.start, s.end):
                assert not covered[b]
                covered[b] = True
        for i, byte in enumerate(raw):
            is_space = chr(byte).isspace() if byte < 128 else None
            if is_space is True:
                assert not covered[i]

    def test_token_ids_match_span_count(self):
        tok = ReferenceTokenizer()
        text = "an example with extraordinarily long tokens"
        assert len(tok.encode(text)) == len(tok.tokenize(text))

    def test_determinism(self):
        text = "Stable output, please."
        assert subword_tokenize(text) == subword_tokenize(text)


@settings(max_examples=150, deadline=None)
@given(st.text(alphabet=st.characters(codec="utf-8"), max_size=120))
def test_word_spans_roundtrip_property(text):
    raw = text.encode("utf-8")
    for splitter in (split_words, split_sentences, subword_tokenize):
        spans = splitter(text)
        prev_end = {}
        for s in spans:
            assert 0 <= s.start < s.end <= len(raw)
            assert raw[s.start:s.end].decode("utf-8") == s.surface
            if s.kind in prev_end:
                assert s.start >= prev_end[s.kind]
            prev_end[s.kind] = s.end
