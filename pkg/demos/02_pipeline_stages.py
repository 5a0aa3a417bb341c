"""The three pipeline stages, separately and composed.

Run with: python demos/02_pipeline_stages.py
"""

from absaeval import (
    FilterConfig,
    Sentence,
    classify_aspect,
    extract_aspects,
    filter_aspects,
    run_pipeline,
)
from absaeval.backends import LexiconAscBackend, LexiconAteBackend, LexiconConfig

text = "The price was high, but the restaurant was breathtaking."
sentence = Sentence(id="demo", text=text)

# A deterministic lexicon stands in for the real models: extraction is a
# dictionary lookup, sentiment is the nearest cue within a token window.
lexicon = LexiconConfig(
    aspect_terms={"price", "restaurant", "battery life"},
    positive_cues={"breathtaking", "great"},
    negative_cues={"high", "bad"},
)
ate = LexiconAteBackend(lexicon)
asc = LexiconAscBackend(lexicon)

# ---------------------------------------------------------------------------
# Stage 1: candidate extraction. Raw backend output, duplicates and all.

candidates = extract_aspects(ate, text)
print("candidates:", candidates.terms)

# ---------------------------------------------------------------------------
# Stage 2: filtering. Trims punctuation, dedupes, keeps only terms that
# actually occur in the text, assigns best-effort character spans.

aspects = filter_aspects(candidates, FilterConfig(), text)
for aspect in aspects:
    print(f"filtered: {aspect.term!r} normalized={aspect.normalized!r} span={aspect.span}")

# ---------------------------------------------------------------------------
# Stage 3: per-aspect sentiment, one call per (sentence, aspect) pair.

for aspect in aspects:
    labeled = classify_aspect(asc, text, aspect)
    print(f"classified: ({labeled.aspect.term}, {labeled.polarity.value})")

# ---------------------------------------------------------------------------
# The composed pipeline is exactly those three calls in sequence.

output = run_pipeline(ate, asc, sentence)
pairs = [(la.aspect.term, la.polarity.value) for la in output.labeled]
print("\npipeline output:", pairs)
print("timing keys:", sorted(output.timing), "backends:", output.backend_ids)
assert pairs == [("price", "negative"), ("restaurant", "positive")]
