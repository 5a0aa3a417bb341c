"""Scoring the three tasks: term F1, sentiment, and pair (joint) F1.

Run with: python demos/03_scoring.py
"""

from absaeval import (
    Corpus,
    GoldAspect,
    LabeledAspect,
    MatchCounts,
    PipelineOutput,
    Polarity,
    PredictedAspect,
    Sentence,
    brute_force_oracle,
    match_pairs,
    match_terms,
    normalize_term,
    prf,
    score_asc_pipelined,
    score_ate,
    score_joint,
    sentence_errors,
)

POS, NEG = Polarity.POSITIVE, Polarity.NEGATIVE

# ---------------------------------------------------------------------------
# 1. Term matching is a multiset intersection over normalized strings.

counts = match_terms(["The Price", "restaurant"], ["price.", "waiter"])
print("term counts:", counts)
assert counts == brute_force_oracle(["The Price", "restaurant"], ["price.", "waiter"])

# 2. Pair matching requires term AND polarity to agree.

pair_counts = match_pairs(
    [("price", NEG), ("restaurant", POS)],
    [("price", POS), ("restaurant", POS)],
)
print("pair counts:", pair_counts)

# 3. Counts become precision/recall/F1 (micro-averaged at corpus level).

score = prf(MatchCounts(1, 2, 1))
print(f"prf(1,2,1): p={score.precision:.4f} r={score.recall:.4f} f1={score.f1:.4f}")

# ---------------------------------------------------------------------------
# 4. A tiny corpus and an imperfect run of predictions.

text = "The price was high, but the restaurant was breathtaking."
corpus = Corpus(
    "demo", "test",
    (
        Sentence("s1", text, (
            GoldAspect("price", NEG, (4, 9)),
            GoldAspect("restaurant", POS, (28, 38)),
        )),
    ),
)


def predicted(sentence_id, pairs):
    labeled = tuple(
        LabeledAspect(PredictedAspect(t, normalize_term(t)), p) for t, p in pairs
    )
    return PipelineOutput(sentence_id, labeled,
                          {"ate": 0.0, "filter": 0.0, "asc": 0.0},
                          {"ate": "demo", "asc": "demo"})


outputs = [predicted("s1", [("price", POS), ("restaurant", POS)])]  # price flipped

ate = score_ate(corpus, outputs)
joint = score_joint(corpus, outputs)
pipelined = score_asc_pipelined(corpus, outputs)
print(f"\nATE      f1={100 * ate.f1:.2f}  (both terms found)")
print(f"joint    f1={100 * joint.f1:.2f}  (one pair has the wrong polarity)")
print(f"ASC pipelined accuracy={100 * pipelined.accuracy:.2f} over {pipelined.total} matched aspects")
assert joint.counts.tp <= ate.counts.tp  # pair-correct implies term-correct

# 5. The error listing names exactly what went wrong, per sentence.

for entry in sentence_errors(corpus, outputs):
    print("errors:", entry)
