import pytest
from hypothesis import given
from hypothesis import strategies as st

from absaeval.normalize import DEFAULT_STRIP_CHARS, NormConfig, normalize_term


def test_defaults_lowercase_and_trim():
    assert normalize_term("  Price.  ") == "price"


def test_article_stripping():
    cfg = NormConfig(strip_articles=True)
    assert normalize_term("The Price ", cfg) == "price"
    assert normalize_term("an apple", cfg) == "apple"
    # a bare article has nothing following it and stays put
    assert normalize_term("the", cfg) == "the"


def test_stacked_articles_reach_fixpoint():
    cfg = NormConfig(strip_articles=True)
    once = normalize_term("the a la carte menu", cfg)
    assert once == normalize_term(once, cfg)


def test_empty_string():
    assert normalize_term("") == ""


def test_strip_chars_both_ends():
    assert normalize_term("“battery life.”") == "battery life"


def test_collapse_whitespace():
    assert normalize_term("battery \t  life") == "battery life"
    kept = NormConfig(collapse_whitespace=False)
    assert normalize_term("battery  life", kept) == "battery  life"


def test_no_lowercase():
    assert normalize_term("Battery Life", NormConfig(lowercase=False)) == "Battery Life"


_cfgs = st.builds(
    NormConfig,
    lowercase=st.booleans(),
    strip_chars=st.sampled_from([DEFAULT_STRIP_CHARS, "", ".,"]),
    collapse_whitespace=st.booleans(),
    strip_articles=st.booleans(),
)


@given(term=st.text(max_size=30), cfg=_cfgs)
def test_idempotent(term, cfg):
    once = normalize_term(term, cfg)
    assert normalize_term(once, cfg) == once


@pytest.mark.parametrize("term", ["the the end", "a a b", "AN ANSWER", "'the price'"])
def test_idempotent_article_corners(term):
    cfg = NormConfig(strip_articles=True)
    once = normalize_term(term, cfg)
    assert normalize_term(once, cfg) == once
