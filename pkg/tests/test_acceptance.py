"""Acceptance suite: the harness's exit criteria, one pass/fail line each.

Run with ``pytest tests/test_acceptance.py -s`` to see the per-criterion
lines. Every tolerance is pinned here; nothing is deferred to later
calibration.
"""

import json
import random
import time
import xml.etree.ElementTree as ET
from contextlib import contextmanager

import pytest

from absaeval import (
    Corpus,
    FilterConfig,
    GoldAspect,
    MatchCounts,
    Polarity,
    Sentence,
    brute_force_oracle,
    classify_aspect,
    extract_aspects,
    filter_aspects,
    match_pairs,
    match_terms,
    parse_semeval_xml,
    prf,
    run_corpus,
    run_pipeline,
    score_ate,
    score_joint,
    serialize_semeval_xml,
    validate_corpus,
)
from absaeval.backends import (
    LexiconAscBackend,
    LexiconAteBackend,
    LexiconConfig,
    ReplayAscBackend,
    ReplayAteBackend,
    asc_key,
    ate_key,
    replay_load,
)
from absaeval.cli import main
from absaeval.metrics import normalize_term

from conftest import make_sample_corpus, sample_fixture_records

POS, NEG, NEU = Polarity.POSITIVE, Polarity.NEGATIVE, Polarity.NEUTRAL


@contextmanager
def criterion(name: str):
    try:
        yield
    except BaseException:
        print(f"[FAIL] {name}", flush=True)
        raise
    print(f"[PASS] {name}", flush=True)


# ---------------------------------------------------------------------------


def test_metric_oracle_equivalence():
    with criterion("metric oracle equivalence (10,000 fuzzed multisets, < 10 s)"):
        alphabet = "abcdefghij"
        labels = [POS, NEG, NEU]
        rng = random.Random(20260811)
        started = time.perf_counter()
        for _ in range(10_000):
            gold_terms = [rng.choice(alphabet) for _ in range(rng.randint(0, 6))]
            pred_terms = [rng.choice(alphabet) for _ in range(rng.randint(0, 6))]
            assert match_terms(gold_terms, pred_terms) == brute_force_oracle(
                gold_terms, pred_terms
            )
            gold_pairs = [(term, rng.choice(labels)) for term in gold_terms]
            pred_pairs = [(term, rng.choice(labels)) for term in pred_terms]
            assert match_pairs(gold_pairs, pred_pairs) == brute_force_oracle(
                gold_pairs, pred_pairs
            )
        elapsed = time.perf_counter() - started
        assert elapsed < 10.0, f"took {elapsed:.2f}s"


def test_prf_formula_checks():
    with criterion("prf formula checks (exact arithmetic)"):
        score = prf(MatchCounts(1, 2, 1))
        assert (score.precision, score.recall, score.f1) == (1 / 3, 1 / 2, 0.4)
        zero = prf(MatchCounts(0, 0, 0))
        assert (zero.precision, zero.recall, zero.f1) == (0.0, 0.0, 0.0)
        rng = random.Random(7)
        for _ in range(200):
            n = rng.randint(1, 10**6)
            perfect = prf(MatchCounts(n, 0, 0))
            assert (perfect.precision, perfect.recall, perfect.f1) == (1.0, 1.0, 1.0)


def test_worked_example_reproduction(tmp_path):
    with criterion("worked-example reproduction (sample sentence via replay)"):
        fixture = tmp_path / "fixtures.jsonl"
        fixture.write_text(
            "\n".join(json.dumps(r) for r in sample_fixture_records()) + "\n",
            encoding="utf-8",
        )
        store = replay_load(fixture)
        corpus = make_sample_corpus()
        outputs = run_corpus(ReplayAteBackend(store), ReplayAscBackend(store), corpus)
        pairs = [
            (labeled.aspect.term, labeled.polarity) for labeled in outputs[0].labeled
        ]
        assert pairs == [("price", NEG), ("restaurant", POS)]
        joint = score_joint(corpus, outputs)
        assert round(100.0 * joint.f1, 2) == 100.00
        assert score_ate(corpus, outputs).f1 == 1.0


def _random_outputs(rng, corpus, vocabulary):
    from absaeval import LabeledAspect, PipelineOutput, PredictedAspect

    outputs = []
    for sentence in corpus.sentences:
        labeled = tuple(
            LabeledAspect(
                PredictedAspect(term := rng.choice(vocabulary), normalize_term(term)),
                rng.choice([POS, NEG, NEU]),
            )
            for _ in range(rng.randint(0, 4))
        )
        outputs.append(
            PipelineOutput(
                sentence_id=sentence.id,
                labeled=labeled,
                timing={"ate": 0.0, "filter": 0.0, "asc": 0.0},
                backend_ids={"ate": "fuzz", "asc": "fuzz"},
            )
        )
    return outputs


def test_joint_dominance(tmp_path):
    with criterion("joint dominance (joint tp <= ate tp, joint F1 <= ate F1)"):
        vocabulary = "abcdefghij"
        rng = random.Random(99)
        for _ in range(300):
            sentences = tuple(
                Sentence(
                    f"s{i}",
                    "text",
                    tuple(
                        GoldAspect(rng.choice(vocabulary), rng.choice([POS, NEG, NEU]))
                        for _ in range(rng.randint(0, 4))
                    ),
                )
                for i in range(rng.randint(1, 5))
            )
            corpus = Corpus("fuzz", "other", sentences)
            outputs = _random_outputs(rng, corpus, vocabulary)
            joint = score_joint(corpus, outputs)
            ate = score_ate(corpus, outputs)
            assert joint.counts.tp <= ate.counts.tp
            assert joint.f1 <= ate.f1 + 1e-12

        # and on a replay run
        fixture = tmp_path / "fixtures.jsonl"
        fixture.write_text(
            "\n".join(json.dumps(r) for r in sample_fixture_records()) + "\n",
            encoding="utf-8",
        )
        store = replay_load(fixture)
        corpus = make_sample_corpus()
        outputs = run_corpus(ReplayAteBackend(store), ReplayAscBackend(store), corpus)
        assert score_joint(corpus, outputs).counts.tp <= score_ate(corpus, outputs).counts.tp
        assert score_joint(corpus, outputs).f1 <= score_ate(corpus, outputs).f1


def _build_reviews_xml(sentences) -> bytes:
    root = ET.Element("Reviews")
    review = ET.SubElement(root, "Review", attrib={"rid": "r1"})
    container = ET.SubElement(review, "sentences")
    for sentence in sentences:
        s_el = ET.SubElement(container, "sentence", attrib={"id": sentence.id})
        ET.SubElement(s_el, "text").text = sentence.text
        if sentence.gold:
            opinions = ET.SubElement(s_el, "Opinions")
            for aspect in sentence.gold:
                ET.SubElement(
                    opinions,
                    "Opinion",
                    attrib={
                        "target": aspect.term,
                        "category": "FOOD#QUALITY",
                        "polarity": aspect.polarity.value,
                        "from": str(aspect.span[0]),
                        "to": str(aspect.span[1]),
                    },
                )
    return ET.tostring(root, encoding="utf-8", xml_declaration=True)


def _constructed_sentences(prefix: str, count: int):
    polarities = [POS, NEG, NEU, Polarity.CONFLICT]
    sentences = []
    for i in range(count):
        term = f"aspect{i}"
        text = f'Fish & chips <{i}> "so-called" it\'s {term} time.'
        start = text.index(term)
        sentences.append(
            Sentence(
                f"{prefix}{i}",
                text,
                (GoldAspect(term, polarities[i % 4], (start, start + len(term))),)
                if i % 5
                else (),
            )
        )
    return sentences


def test_round_trip_50_sentences():
    with criterion("round-trip identity (50 sentences, both schemas, escaping)"):
        part_2014 = Corpus("half-2014", "train", tuple(_constructed_sentences("a", 25)))
        parsed_2014 = parse_semeval_xml(serialize_semeval_xml(part_2014))
        assert parsed_2014 == part_2014

        reviews_xml = _build_reviews_xml(_constructed_sentences("r1:", 25))
        parsed_reviews = parse_semeval_xml(reviews_xml, name="half-2016", split="test")
        assert len(parsed_reviews) == 25

        merged = Corpus(
            "both-schemas", "other", parsed_2014.sentences + parsed_reviews.sentences
        )
        assert len(merged) == 50
        seen_polarities = {a.polarity for s in merged.sentences for a in s.gold}
        assert seen_polarities == set(Polarity)
        assert any("&" in s.text and "<" in s.text and '"' in s.text for s in merged.sentences)

        reparsed = parse_semeval_xml(serialize_semeval_xml(merged))
        assert reparsed == merged
        assert validate_corpus(reparsed) == []
        twice = parse_semeval_xml(serialize_semeval_xml(reparsed))
        assert twice == merged


def _determinism_corpus_and_fixtures(tmp_path):
    texts = [f"The item{i} was high and the place{i} was breathtaking." for i in range(10)]
    sentences = []
    records = []
    for i, text in enumerate(texts):
        item, place = f"item{i}", f"place{i}"
        sentences.append(
            Sentence(
                f"s{i}",
                text,
                (
                    GoldAspect(item, NEG, (text.index(item), text.index(item) + len(item))),
                    GoldAspect(place, POS, (text.index(place), text.index(place) + len(place))),
                ),
            )
        )
        records.append(
            {"kind": "ate", "key": ate_key(text), "text": text, "terms": [item, place]}
        )
        records.append(
            {"kind": "asc", "key": asc_key(text, item), "term": item, "polarity": "negative"}
        )
        records.append(
            {"kind": "asc", "key": asc_key(text, place), "term": place, "polarity": "positive"}
        )
    corpus_path = tmp_path / "determinism.xml"
    corpus_path.write_bytes(
        serialize_semeval_xml(Corpus("determinism-res-14", "test", tuple(sentences)))
    )
    fixture_path = tmp_path / "determinism-fixtures.jsonl"
    fixture_path.write_text(
        "\n".join(json.dumps(r) for r in records) + "\n", encoding="utf-8"
    )
    return corpus_path, fixture_path


def test_determinism_cli_and_record_replay(tmp_path):
    with criterion("determinism (parallelism 1 vs 8 byte-identical; record->replay closure)"):
        corpus_path, fixture_path = _determinism_corpus_and_fixtures(tmp_path)
        out1, out8 = tmp_path / "p1", tmp_path / "p8"
        for out, parallelism in ((out1, "1"), (out8, "8")):
            code = main(
                ["run", "--corpus", str(corpus_path), "--ate", "replay", "--asc", "replay",
                 "--fixtures", str(fixture_path), "--parallelism", parallelism,
                 "--out", str(out), "--format", "json,csv,markdown"]
            )
            assert code == 0
        for name in ("predictions.jsonl", "report.json", "report.csv", "report.md"):
            assert (out1 / name).read_bytes() == (out8 / name).read_bytes(), name

        # record a lexicon session, then replay it
        config = tmp_path / "lexicon.cfg"
        config.write_text(
            "lexicon_aspect_terms = price, restaurant\n"
            "lexicon_positive_cues = breathtaking\n"
            "lexicon_negative_cues = high\n",
            encoding="utf-8",
        )
        sample_path = tmp_path / "sample.xml"
        sample_path.write_bytes(serialize_semeval_xml(make_sample_corpus()))
        recorded = tmp_path / "recorded.jsonl"
        out_rec, out_rep = tmp_path / "rec", tmp_path / "rep"
        assert (
            main(["record", "--corpus", str(sample_path), "--ate", "lexicon",
                  "--asc", "lexicon", "--config", str(config), "--fixtures", str(recorded),
                  "--out", str(out_rec), "--format", "json,csv,markdown"])
            == 0
        )
        assert (
            main(["run", "--corpus", str(sample_path), "--ate", "replay", "--asc", "replay",
                  "--fixtures", str(recorded), "--out", str(out_rep),
                  "--format", "json,csv,markdown"])
            == 0
        )
        assert (out_rec / "predictions.jsonl").read_bytes() == (
            out_rep / "predictions.jsonl"
        ).read_bytes()
        # every result section reproduces byte-for-byte; the manifest section
        # legitimately differs (it names the live vs replay backends)
        rec_doc = json.loads((out_rec / "report.json").read_text())
        rep_doc = json.loads((out_rep / "report.json").read_text())
        for section in ("ate", "asc", "joint", "errors"):
            assert rec_doc[section] == rep_doc[section], section


def test_pipeline_composition_1000_fuzzed():
    with criterion("pipeline composition (1,000 fuzzed sentences, lexicon backend)"):
        cfg = LexiconConfig(
            aspect_terms={"price", "restaurant", "battery life", "screen", "food"},
            positive_cues={"great", "breathtaking", "good", "tasty"},
            negative_cues={"high", "bad", "slow"},
        )
        ate, asc = LexiconAteBackend(cfg), LexiconAscBackend(cfg)
        words = [
            "price", "restaurant", "battery", "life", "screen", "food", "great",
            "breathtaking", "good", "tasty", "high", "bad", "slow", "not", "no",
            "never", "the", "was", "and", "a", "very",
        ]
        rng = random.Random(4242)
        filter_cfg = FilterConfig()
        for i in range(1_000):
            text = " ".join(rng.choice(words) for _ in range(rng.randint(1, 12)))
            sentence = Sentence(f"f{i}", text)
            via_pipeline = run_pipeline(ate, asc, sentence, filter_cfg)
            manual = [
                classify_aspect(asc, text, aspect)
                for aspect in filter_aspects(
                    extract_aspects(ate, text), filter_cfg, text
                )
            ]
            assert list(via_pipeline.labeled) == manual, text


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-s", "-v"]))
