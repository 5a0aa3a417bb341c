"""Corpus handling: build, serialize, parse, validate, summarize.

Run with: python demos/01_corpus_basics.py
"""

from absaeval import (
    Corpus,
    GoldAspect,
    Polarity,
    Sentence,
    apply_conflict_policy,
    corpus_stats,
    parse_semeval_xml,
    serialize_semeval_xml,
    validate_corpus,
)

# ---------------------------------------------------------------------------
# 1. Build a small annotated corpus in memory. The worked example: two
#    aspects with opposite sentiment in one sentence.

text = "The price was high, but the restaurant was breathtaking."
corpus = Corpus(
    name="demo-res-14",
    split="test",
    sentences=(
        Sentence(
            id="s1",
            text=text,
            gold=(
                GoldAspect("price", Polarity.NEGATIVE, (4, 9)),
                GoldAspect("restaurant", Polarity.POSITIVE, (28, 38)),
            ),
        ),
        Sentence(id="s2", text="Average food & average prices.",
                 gold=(GoldAspect("food", Polarity.CONFLICT, (8, 12)),)),
        Sentence(id="s3", text="Would go back."),
    ),
)

# ---------------------------------------------------------------------------
# 2. Serialize to the 2014-style XML and parse it back: field-for-field
#    identity, entities escaped along the way.

data = serialize_semeval_xml(corpus)
print(data.decode("utf-8"))
assert parse_semeval_xml(data) == corpus
print("round trip: identical\n")

# ---------------------------------------------------------------------------
# 3. Validation returns violations as data; this corpus is clean.

print("violations:", validate_corpus(corpus))

# ---------------------------------------------------------------------------
# 4. Statistics: counts and polarity histogram.

stats = corpus_stats(corpus)
print(f"sentences={stats.sentence_count} aspects={stats.aspect_count} "
      f"no-aspect={stats.no_aspect_count} mean={stats.mean_aspects:.2f}")
for polarity, count in stats.polarity_histogram.items():
    print(f"  {polarity.value:>8}: {count}")

# ---------------------------------------------------------------------------
# 5. Gold data may carry the fourth label, "conflict"; pipelines never emit
#    it, so a policy resolves it before 3-class evaluation.

dropped = apply_conflict_policy(corpus, "drop")
print("\nafter drop policy:", corpus_stats(dropped).aspect_count, "aspects remain")
mapped = apply_conflict_policy(corpus, "map_to_neutral")
print("after map_to_neutral:",
      corpus_stats(mapped).polarity_histogram[Polarity.NEUTRAL], "neutral aspects")
