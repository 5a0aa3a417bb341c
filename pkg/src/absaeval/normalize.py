"""Term normalization for string-level aspect matching.

Generative extraction backends return plain strings, so predictions are
matched against gold annotations on a normalized form rather than on
character offsets.
"""

from __future__ import annotations

import string
from dataclasses import dataclass

#: Characters trimmed from term edges by default: straight and curly
#: quotes, periods, and commas.
DEFAULT_STRIP_CHARS = "\"'“”‘’.,"

_ARTICLES = ("the", "a", "an")


@dataclass(frozen=True)
class NormConfig:
    lowercase: bool = True
    strip_chars: str = DEFAULT_STRIP_CHARS
    collapse_whitespace: bool = True
    strip_articles: bool = False


def normalize_term(term: str, cfg: NormConfig = NormConfig()) -> str:
    """Normalize ``term`` per ``cfg``.

    Idempotent for any fixed config: ``normalize_term(normalize_term(t))``
    equals ``normalize_term(t)``.
    """
    edge = cfg.strip_chars + string.whitespace
    out = term.strip(edge)
    if cfg.collapse_whitespace:
        out = " ".join(out.split())
    if cfg.lowercase:
        out = out.lower()
    if cfg.strip_articles:
        out = _drop_leading_articles(out, edge)
    return out


def _drop_leading_articles(term: str, edge: str) -> str:
    # Loops to a fixpoint so repeated normalization is stable even for
    # terms like "the a la carte menu".
    while True:
        lowered = term.lower()
        for article in _ARTICLES:
            if lowered.startswith(article + " "):
                term = term[len(article) + 1 :].strip(edge)
                break
        else:
            return term
