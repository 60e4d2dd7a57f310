"""Which spans of a summary move the score? Input-perturbation saliency.

Runs all four perturbation methods against the reference scorer and prints
per-span score deltas (perturbed minus baseline; positive = the change
improved the score).  The word-level view also shows the max-signed-magnitude
value used to color the replaced word's underline.
"""

from collections import defaultdict

from scorelens import ModelConfig, ModelRegistry, run_perturbation, word_underline_value
from scorelens.perturbation import load_lexicon, load_stopwords
from scorelens.spelling import FrequencyDictionary

SOURCE = (
    "Water moves through the world in a cycle. Heat from the sun turns water "
    "in lakes and oceans into vapor. The vapor rises, cools, and forms "
    "clouds. When the clouds grow heavy, rain falls back to the ground."
)
SUMMARY = "The sun heats water, which rises as vapor. Clouds form and rain falls."

registry = ModelRegistry([
    ModelConfig(model_id="content", kind="reference", layers=4, heads=4,
                embed_dim=32, window=8, max_len=512, seed=11),
])
resources = dict(
    lexicon=load_lexicon(),
    stopwords=load_stopwords(),
    dictionary=FrequencyDictionary.bundled(),
)

for method in ("sentences", "tokens", "words", "grammar"):
    report = run_perturbation(SOURCE, SUMMARY, "content", method, registry, **resources)
    print(f"\n== {method} (baseline {report.baseline_score:+.4f}) ==")
    for v in report.variants[:8]:
        label = v.span.surface if v.span else v.replacement
        print(f"  {label!r:30s} delta {v.delta:+.5f}")
    if len(report.variants) > 8:
        print(f"  ... {len(report.variants) - 8} more variants")
    if method == "words":
        by_word = defaultdict(list)
        for v in report.variants:
            by_word[v.span.surface].append(v.delta)
        for word, deltas in by_word.items():
            print(f"  underline for {word!r}: {word_underline_value(deltas):+.5f}")
