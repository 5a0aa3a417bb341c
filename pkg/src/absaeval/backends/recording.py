"""Record wrapper: proxy a live backend and persist every call as a fixture.

Record once against the slow or remote backend, then replay forever. The
wrapper never changes the inner backend's outputs; each distinct key is
written once (replay_load rejects duplicate keys, and recorded backends
are deterministic per key anyway).
"""

from __future__ import annotations

import json
import threading
from pathlib import Path

from ..corpus import Polarity
from ..errors import FixtureCorrupt
from ..normalize import normalize_term
from ..pipeline import CandidateAspects
from .replay import KEY_NORM, asc_key, ate_key

_SCORE_ORDER = (Polarity.POSITIVE, Polarity.NEGATIVE, Polarity.NEUTRAL)


class _FixtureWriter:
    """Append-only fixture sink; writes are serialized and deduplicated."""

    def __init__(self, path: Path):
        self.path = path
        self._lock = threading.Lock()
        self._seen: set[str] = set()
        if path.exists():
            with open(path, encoding="utf-8") as fh:
                for lineno, line in enumerate(fh, start=1):
                    line = line.strip()
                    if not line:
                        continue
                    try:
                        self._seen.add(json.loads(line)["key"])
                    except (json.JSONDecodeError, TypeError, KeyError):
                        raise FixtureCorrupt(
                            f"{path}:{lineno}: existing fixture line unreadable"
                        ) from None

    def write(self, key: str, record: dict) -> None:
        with self._lock:
            if key in self._seen:
                return
            with open(self.path, "a", encoding="utf-8") as fh:
                fh.write(json.dumps(record, ensure_ascii=False) + "\n")
            self._seen.add(key)


class RecordingAteBackend:
    def __init__(self, inner, writer: _FixtureWriter):
        self._inner = inner
        self._writer = writer
        self.id = f"record:{inner.id}"
        self.single_flight = getattr(inner, "single_flight", False)

    def extract(self, text: str) -> CandidateAspects:
        out = self._inner.extract(text)
        key = ate_key(text)
        self._writer.write(
            key, {"kind": "ate", "key": key, "text": text, "terms": list(out.terms)}
        )
        return out


class RecordingAscBackend:
    def __init__(self, inner, writer: _FixtureWriter):
        self._inner = inner
        self._writer = writer
        self.id = f"record:{inner.id}"
        self.single_flight = getattr(inner, "single_flight", False)

    def classify(self, text: str, term: str):
        polarity, scores = self._inner.classify(text, term)
        key = asc_key(text, term)
        record = {
            "kind": "asc",
            "key": key,
            "term": normalize_term(term, KEY_NORM),
            "polarity": polarity.value,
        }
        if scores is not None:
            record["scores"] = {
                label.value: float(scores[label]) for label in _SCORE_ORDER if label in scores
            }
        self._writer.write(key, record)
        return polarity, scores


def record_wrap(inner, path):
    """Wrap an ATE or ASC backend so every call lands in ``path``.

    The two wrapper kinds may share one fixture file; their key spaces are
    disjoint. Write failures surface as OSError.
    """
    writer = _FixtureWriter(Path(path))
    if hasattr(inner, "extract"):
        return RecordingAteBackend(inner, writer)
    if hasattr(inner, "classify"):
        return RecordingAscBackend(inner, writer)
    raise TypeError(f"{inner!r} is neither an ATE nor an ASC backend")
