import json

import pytest

from absaeval import Corpus, GoldAspect, Polarity, Sentence, serialize_semeval_xml
from absaeval.backends import asc_key, ate_key

SAMPLE_TEXT = "The price was high, but the restaurant was breathtaking."


def make_sample_corpus(name: str = "sample-res-14") -> Corpus:
    return Corpus(
        name=name,
        split="test",
        sentences=(
            Sentence(
                id="s1",
                text=SAMPLE_TEXT,
                gold=(
                    GoldAspect("price", Polarity.NEGATIVE, (4, 9)),
                    GoldAspect("restaurant", Polarity.POSITIVE, (28, 38)),
                ),
            ),
        ),
    )


def sample_fixture_records() -> list[dict]:
    return [
        {
            "kind": "ate",
            "key": ate_key(SAMPLE_TEXT),
            "text": SAMPLE_TEXT,
            "terms": ["price", "restaurant"],
        },
        {
            "kind": "asc",
            "key": asc_key(SAMPLE_TEXT, "price"),
            "term": "price",
            "polarity": "negative",
        },
        {
            "kind": "asc",
            "key": asc_key(SAMPLE_TEXT, "restaurant"),
            "term": "restaurant",
            "polarity": "positive",
        },
    ]


@pytest.fixture
def sample_corpus() -> Corpus:
    return make_sample_corpus()


@pytest.fixture
def sample_corpus_path(tmp_path, sample_corpus):
    path = tmp_path / "sample.xml"
    path.write_bytes(serialize_semeval_xml(sample_corpus))
    return path


@pytest.fixture
def sample_fixture_path(tmp_path):
    path = tmp_path / "fixtures.jsonl"
    path.write_text(
        "\n".join(json.dumps(record) for record in sample_fixture_records()) + "\n",
        encoding="utf-8",
    )
    return path
