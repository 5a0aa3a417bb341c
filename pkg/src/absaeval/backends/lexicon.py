"""Deterministic lexicon baseline for both pipeline stages.

This is the offline stand-in for the real models: a dictionary lookup for
extraction and a cue-within-window rule for sentiment. It exists so the
harness, metrics, and CLI can be exercised and fuzzed without any model or
network.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from ..corpus import Polarity
from ..errors import TermNotFound
from ..pipeline import CandidateAspects

_TOKEN_RE = re.compile(r"[\w']+")


def _tokenize(text: str) -> list[str]:
    """Lowercased word tokens; punctuation splits, apostrophes survive
    inside tokens ("wasn't") but are trimmed from the edges."""
    return [tok for tok in (t.strip("'") for t in _TOKEN_RE.findall(text.lower())) if tok]


@dataclass(frozen=True)
class LexiconConfig:
    aspect_terms: frozenset[str] = frozenset()
    positive_cues: frozenset[str] = frozenset()
    negative_cues: frozenset[str] = frozenset()
    negators: frozenset[str] = frozenset({"not", "no", "never", "n't"})
    window: int = 3

    def __post_init__(self):
        for name in ("aspect_terms", "positive_cues", "negative_cues", "negators"):
            object.__setattr__(self, name, frozenset(getattr(self, name)))
        if self.window < 1:
            raise ValueError("window must be >= 1")
        overlap = {c.lower() for c in self.positive_cues} & {
            c.lower() for c in self.negative_cues
        }
        if overlap:
            raise ValueError(f"positive and negative cues overlap: {sorted(overlap)}")


def lexicon_ate(cfg: LexiconConfig, text: str) -> CandidateAspects:
    """All lexicon entries occurring in the tokenized, lowercased text.

    Multi-word entries match as contiguous token sequences. Output is in
    first-occurrence order; ties (two entries starting at the same token)
    break alphabetically for determinism.
    """
    tokens = _tokenize(text)
    found = []
    for entry in cfg.aspect_terms:
        entry_tokens = _tokenize(entry)
        if not entry_tokens:
            continue
        idx = _find_subsequence(tokens, entry_tokens)
        if idx is not None:
            found.append((idx, entry.strip()))
    found.sort()
    return CandidateAspects(tuple(term for _, term in found))


def lexicon_asc(
    cfg: LexiconConfig, text: str, term: str
) -> tuple[Polarity, dict[Polarity, float]]:
    """Polarity of the nearest sentiment cue within ``cfg.window`` tokens.

    The window is scanned outward from the term, left before right at each
    distance. The deciding cue flips between positive and negative when a
    negator sits strictly between cue and term or immediately adjacent to
    the cue on its far side ("not good battery"). No cue in the window
    means neutral. Scores are one-hot.
    """
    tokens = _tokenize(text)
    term_tokens = _tokenize(term)
    start = _find_subsequence(tokens, term_tokens) if term_tokens else None
    if start is None:
        raise TermNotFound(f"term {term!r} does not occur in text")
    end = start + len(term_tokens)

    polarity = Polarity.NEUTRAL
    cue = _nearest_cue(cfg, tokens, start, end)
    if cue is not None:
        cue_idx, polarity = cue
        if _negated(cfg, tokens, cue_idx, start, end):
            polarity = (
                Polarity.NEGATIVE if polarity is Polarity.POSITIVE else Polarity.POSITIVE
            )
    scores = {
        label: 1.0 if label is polarity else 0.0
        for label in (Polarity.POSITIVE, Polarity.NEGATIVE, Polarity.NEUTRAL)
    }
    return polarity, scores


def _find_subsequence(tokens: list[str], sub: list[str]) -> int | None:
    for i in range(len(tokens) - len(sub) + 1):
        if tokens[i : i + len(sub)] == sub:
            return i
    return None


def _nearest_cue(
    cfg: LexiconConfig, tokens: list[str], start: int, end: int
) -> tuple[int, Polarity] | None:
    positive = {c.lower() for c in cfg.positive_cues}
    negative = {c.lower() for c in cfg.negative_cues}
    for distance in range(1, cfg.window + 1):
        for idx in (start - distance, end - 1 + distance):
            if 0 <= idx < len(tokens):
                if tokens[idx] in positive:
                    return idx, Polarity.POSITIVE
                if tokens[idx] in negative:
                    return idx, Polarity.NEGATIVE
    return None


def _negated(cfg: LexiconConfig, tokens: list[str], cue_idx: int, start: int, end: int) -> bool:
    negators = {n.lower() for n in cfg.negators}
    if cue_idx < start:
        zone = list(range(cue_idx + 1, start)) + [cue_idx - 1]
    else:
        zone = list(range(end, cue_idx)) + [cue_idx + 1]
    return any(
        0 <= i < len(tokens) and _is_negator(tokens[i], negators) for i in zone
    )


def _is_negator(token: str, negators: set[str]) -> bool:
    return token in negators or token.endswith("n't")


class LexiconAteBackend:
    single_flight = False

    def __init__(self, cfg: LexiconConfig, id: str = "lexicon-ate"):
        self.cfg = cfg
        self.id = id

    def extract(self, text: str) -> CandidateAspects:
        return lexicon_ate(self.cfg, text)


class LexiconAscBackend:
    single_flight = False

    def __init__(self, cfg: LexiconConfig, id: str = "lexicon-asc"):
        self.cfg = cfg
        self.id = id

    def classify(self, text: str, term: str) -> tuple[Polarity, dict[Polarity, float]]:
        return lexicon_asc(self.cfg, text, term)
