import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from absaeval import (
    Corpus,
    GoldAspect,
    LabeledAspect,
    MatchCounts,
    NormConfig,
    PipelineOutput,
    Polarity,
    PredictedAspect,
    Sentence,
    brute_force_oracle,
    match_pairs,
    match_terms,
    normalize_term,
    prf,
    score_asc_given_gold,
    score_asc_pipelined,
    score_ate,
    score_joint,
    sentence_errors,
)
from absaeval.errors import IdMismatch, SizeExceeded

from conftest import make_sample_corpus

POS, NEG, NEU = Polarity.POSITIVE, Polarity.NEGATIVE, Polarity.NEUTRAL


def output_for(sentence_id: str, pairs) -> PipelineOutput:
    labeled = tuple(
        LabeledAspect(PredictedAspect(term, normalize_term(term)), polarity)
        for term, polarity in pairs
    )
    return PipelineOutput(
        sentence_id=sentence_id,
        labeled=labeled,
        timing={"ate": 0.0, "filter": 0.0, "asc": 0.0},
        backend_ids={"ate": "test", "asc": "test"},
    )


class TestMatchTerms:
    def test_perfect(self):
        counts = match_terms(["price", "restaurant"], ["price", "restaurant"])
        assert counts == MatchCounts(tp=2, fp=0, fn=0)

    def test_empty_predictions(self):
        assert match_terms(["price", "restaurant"], []) == MatchCounts(0, 0, 2)

    def test_partial(self):
        assert match_terms(["a", "b"], ["a", "c", "d"]) == MatchCounts(1, 2, 1)

    def test_multiset_duplicates(self):
        assert match_terms(["a", "a"], ["a"]) == MatchCounts(1, 0, 1)
        assert match_terms(["a"], ["a", "a"]) == MatchCounts(1, 1, 0)

    def test_normalization_applies(self):
        assert match_terms(["The Price"], ["price."], NormConfig(strip_articles=True)) == (
            MatchCounts(1, 0, 0)
        )


class TestMatchPairs:
    def test_perfect(self):
        gold = [("price", NEG), ("restaurant", POS)]
        assert match_pairs(gold, list(gold)) == MatchCounts(2, 0, 0)

    def test_one_flipped_polarity(self):
        gold = [("price", NEG), ("restaurant", POS)]
        pred = [("price", POS), ("restaurant", POS)]
        assert match_pairs(gold, pred) == MatchCounts(1, 1, 1)

    def test_empty_pred(self):
        gold = [("price", NEG), ("restaurant", POS)]
        assert match_pairs(gold, []) == MatchCounts(0, 0, 2)


class TestPrf:
    def test_hand_arithmetic(self):
        score = prf(MatchCounts(1, 2, 1))
        assert score.precision == 1 / 3
        assert score.recall == 1 / 2
        assert score.f1 == 0.4

    def test_degenerate_zero(self):
        score = prf(MatchCounts(0, 0, 0))
        assert (score.precision, score.recall, score.f1) == (0.0, 0.0, 0.0)

    @given(st.integers(1, 10_000))
    def test_all_true_positives(self, n):
        score = prf(MatchCounts(n, 0, 0))
        assert (score.precision, score.recall, score.f1) == (1.0, 1.0, 1.0)

    @given(st.integers(0, 50), st.integers(0, 50), st.integers(0, 50))
    def test_defining_formulas(self, tp, fp, fn):
        score = prf(MatchCounts(tp, fp, fn))
        assert score.precision == (tp / (tp + fp) if tp + fp else 0.0)
        assert score.recall == (tp / (tp + fn) if tp + fn else 0.0)
        p, r = score.precision, score.recall
        assert score.f1 == (2 * p * r / (p + r) if p + r else 0.0)
        assert (score.f1 == 0) == (tp == 0)

    def test_negative_counts_rejected(self):
        with pytest.raises(ValueError):
            MatchCounts(-1, 0, 0)


_terms = st.lists(st.sampled_from("abcdefghij"), max_size=6)


@given(_terms, _terms)
def test_symmetry(gold, pred):
    forward = match_terms(gold, pred)
    backward = match_terms(pred, gold)
    assert forward.tp == backward.tp
    assert forward.fp == backward.fn
    assert forward.fn == backward.fp


@given(_terms, _terms, st.sampled_from("abcdefghij"))
def test_monotonicity(gold, pred, extra):
    base = match_terms(gold, pred)
    more = match_terms(gold, pred + [extra])
    assert more.tp >= base.tp
    assert more.tp + more.fp == base.tp + base.fp + 1
    correct = match_terms(gold + [extra], pred + [extra])
    assert correct.tp >= base.tp


@given(_terms, _terms)
def test_oracle_equivalence_terms(gold, pred):
    assert match_terms(gold, pred) == brute_force_oracle(gold, pred)


_pairs = st.lists(
    st.tuples(st.sampled_from("abcd"), st.sampled_from([POS, NEG, NEU])), max_size=6
)


@given(_pairs, _pairs)
def test_oracle_equivalence_pairs(gold, pred):
    assert match_pairs(gold, pred) == brute_force_oracle(gold, pred)


class TestOracle:
    def test_empty(self):
        assert brute_force_oracle([], []) == MatchCounts(0, 0, 0)

    def test_size_limit(self):
        brute_force_oracle(["a"] * 12, ["a"] * 12)  # at the limit: fine
        with pytest.raises(SizeExceeded):
            brute_force_oracle(["a"] * 13, [])

    def test_worst_case_all_equal_keys(self):
        counts = brute_force_oracle(["x"] * 12, ["x"] * 12)
        assert counts == MatchCounts(12, 0, 0)


class TestScoreAte:
    def test_perfect_run(self, sample_corpus):
        outputs = [output_for("s1", [("price", NEG), ("restaurant", POS)])]
        assert score_ate(sample_corpus, outputs).f1 == 1.0

    def test_all_empty_predictions(self, sample_corpus):
        outputs = [output_for("s1", [])]
        score = score_ate(sample_corpus, outputs)
        assert score.f1 == 0.0
        assert score.counts.fn == 2

    def test_id_mismatch(self, sample_corpus):
        with pytest.raises(IdMismatch):
            score_ate(sample_corpus, [output_for("nope", [])])
        with pytest.raises(IdMismatch):
            score_ate(sample_corpus, [])

    def test_matches_oracle_on_random_corpora(self):
        rng = random.Random(7)
        vocabulary = "abcdefghij"
        for _ in range(50):
            sentences = []
            outputs = []
            for i in range(rng.randint(1, 5)):
                gold = [
                    GoldAspect(rng.choice(vocabulary), NEU) for _ in range(rng.randint(0, 4))
                ]
                sentences.append(Sentence(f"s{i}", "text", tuple(gold)))
                predicted = [
                    (rng.choice(vocabulary), NEU) for _ in range(rng.randint(0, 4))
                ]
                outputs.append(output_for(f"s{i}", predicted))
            corpus = Corpus("fuzz", "other", tuple(sentences))
            total = MatchCounts(0, 0, 0)
            for sentence, output in zip(corpus.sentences, outputs):
                total = total + brute_force_oracle(
                    [a.term for a in sentence.gold],
                    [la.aspect.term for la in output.labeled],
                )
            assert score_ate(corpus, outputs).counts == total


class TestScoreJoint:
    def test_perfect_run(self, sample_corpus):
        outputs = [output_for("s1", [("price", NEG), ("restaurant", POS)])]
        assert score_joint(sample_corpus, outputs).f1 == 1.0

    def test_one_flipped_polarity(self, sample_corpus):
        outputs = [output_for("s1", [("price", POS), ("restaurant", POS)])]
        score = score_joint(sample_corpus, outputs)
        assert (score.precision, score.recall, score.f1) == (0.5, 0.5, 0.5)

    def test_joint_dominated_by_ate(self, sample_corpus):
        outputs = [output_for("s1", [("price", POS), ("restaurant", POS)])]
        joint = score_joint(sample_corpus, outputs)
        ate = score_ate(sample_corpus, outputs)
        assert joint.counts.tp <= ate.counts.tp
        assert joint.f1 <= ate.f1


class _FixedAsc:
    single_flight = False
    id = "fixed"

    def __init__(self, mapping=None, default=NEU):
        self.mapping = mapping or {}
        self.default = default

    def classify(self, text, term):
        return self.mapping.get(term, self.default), None


class TestScoreAscGivenGold:
    def test_agreeing_backend(self, sample_corpus):
        backend = _FixedAsc({"price": NEG, "restaurant": POS})
        summary = score_asc_given_gold(sample_corpus, backend)
        assert summary.accuracy == 1.0
        assert summary.total == 2

    def test_all_neutral_on_balanced_three(self):
        corpus = Corpus(
            "c",
            "other",
            (
                Sentence("1", "a", (GoldAspect("a", POS),)),
                Sentence("2", "b", (GoldAspect("b", NEG),)),
                Sentence("3", "c", (GoldAspect("c", NEU),)),
            ),
        )
        summary = score_asc_given_gold(corpus, _FixedAsc())
        assert summary.accuracy == pytest.approx(1 / 3)
        # neutral: p=1/3, r=1, f1=1/2; other classes 0
        assert summary.macro_f1 == pytest.approx(0.5 / 3)
        assert summary.per_class[NEU].recall == 1.0

    def test_empty_corpus_is_flagged_degenerate(self):
        summary = score_asc_given_gold(Corpus("c", "other", ()), _FixedAsc())
        assert summary.accuracy == 0.0
        assert summary.total == 0

    def test_conflict_gold_rejected(self):
        corpus = Corpus(
            "c", "other", (Sentence("1", "a", (GoldAspect("a", Polarity.CONFLICT),)),)
        )
        with pytest.raises(ValueError):
            score_asc_given_gold(corpus, _FixedAsc())

    def test_micro_f1_equals_accuracy(self, sample_corpus):
        summary = score_asc_given_gold(sample_corpus, _FixedAsc({"price": NEG}))
        assert summary.micro_f1 == summary.accuracy == 0.5


class TestScoreAscPipelined:
    def test_only_extracted_aspects_count(self, sample_corpus):
        # "restaurant" was never extracted; "price" got the wrong label.
        outputs = [output_for("s1", [("price", POS)])]
        summary = score_asc_pipelined(sample_corpus, outputs)
        assert summary.total == 1
        assert summary.accuracy == 0.0

    def test_spurious_terms_invisible(self, sample_corpus):
        outputs = [output_for("s1", [("waiter", POS)])]
        summary = score_asc_pipelined(sample_corpus, outputs)
        assert summary.total == 0


class TestSentenceErrors:
    def test_perfect_run_is_silent(self, sample_corpus):
        outputs = [output_for("s1", [("price", NEG), ("restaurant", POS)])]
        assert sentence_errors(sample_corpus, outputs) == []

    def test_flip_shows_as_missing_plus_spurious(self, sample_corpus):
        outputs = [output_for("s1", [("price", POS), ("restaurant", POS)])]
        listing = sentence_errors(sample_corpus, outputs)
        assert listing == [
            {"id": "s1", "missing": ["price (negative)"], "spurious": ["price (positive)"]}
        ]

    def test_sorted_by_sentence_id(self):
        corpus = Corpus(
            "c",
            "other",
            (
                Sentence("b", "x", (GoldAspect("x", POS),)),
                Sentence("a", "y", (GoldAspect("y", POS),)),
            ),
        )
        outputs = [output_for("b", []), output_for("a", [])]
        assert [e["id"] for e in sentence_errors(corpus, outputs)] == ["a", "b"]


def test_sample_corpus_fixture_is_the_worked_example():
    corpus = make_sample_corpus()
    assert corpus.sentences[0].gold[0].term == "price"
    assert corpus.sentences[0].gold[0].polarity is NEG
    assert corpus.sentences[0].gold[1].term == "restaurant"
    assert corpus.sentences[0].gold[1].polarity is POS
