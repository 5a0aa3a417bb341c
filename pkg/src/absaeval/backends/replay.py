"""Record/replay fixture store: deterministic, offline model stand-ins.

Fixtures are line-delimited UTF-8 JSON, one record per call::

    {"kind": "ate", "key": <hex>, "text": <str>, "terms": [<str>, ...]}
    {"kind": "asc", "key": <hex>, "term": <str>, "polarity": <str>, "scores": {...}}

Keys are content hashes (SHA-256 of the UTF-8 text; for ASC the text plus
"\\u0000" plus the normalized term), never sentence ids, so the same
fixtures serve multiple corpora and ad-hoc texts. A missing key raises
instead of falling back: a silent default would make replayed runs
unreproducible.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass

from ..corpus import PIPELINE_POLARITIES, Polarity
from ..errors import DuplicateKey, FixtureCorrupt, MissingFixture
from ..normalize import NormConfig, normalize_term
from ..pipeline import CandidateAspects

#: Normalization applied to ASC key terms; fixed so fixtures written by one
#: process replay in any other.
KEY_NORM = NormConfig()


def ate_key(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def asc_key(text: str, term: str) -> str:
    payload = text + "\u0000" + normalize_term(term, KEY_NORM)
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


@dataclass
class ReplayStore:
    ate_map: dict[str, tuple[str, ...]]
    asc_map: dict[str, tuple[Polarity, dict[Polarity, float] | None]]
    source: str

    def __len__(self) -> int:
        return len(self.ate_map) + len(self.asc_map)


def replay_load(path) -> ReplayStore:
    """Load a fixture file; duplicate keys and bad records are fatal."""
    ate_map: dict[str, tuple[str, ...]] = {}
    asc_map: dict[str, tuple[Polarity, dict[Polarity, float] | None]] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            where = f"{path}:{lineno}"
            try:
                record = json.loads(line)
            except json.JSONDecodeError as err:
                raise FixtureCorrupt(f"{where}: not valid JSON ({err})") from None
            if not isinstance(record, dict):
                raise FixtureCorrupt(f"{where}: record is not an object")
            kind = record.get("kind")
            if kind == "ate":
                key, terms = _ate_record(record, where)
                if key in ate_map:
                    raise DuplicateKey(f"{where}: duplicate ate key {key}")
                ate_map[key] = terms
            elif kind == "asc":
                key, value = _asc_record(record, where)
                if key in asc_map:
                    raise DuplicateKey(f"{where}: duplicate asc key {key}")
                asc_map[key] = value
            else:
                raise FixtureCorrupt(f"{where}: unknown record kind {kind!r}")
    return ReplayStore(ate_map=ate_map, asc_map=asc_map, source=str(path))


def _ate_record(record: dict, where: str) -> tuple[str, tuple[str, ...]]:
    key, text, terms = record.get("key"), record.get("text"), record.get("terms")
    if not isinstance(key, str) or not isinstance(text, str) or not isinstance(terms, list):
        raise FixtureCorrupt(f"{where}: ate record needs string key, string text, list terms")
    if any(not isinstance(t, str) for t in terms):
        raise FixtureCorrupt(f"{where}: ate terms must all be strings")
    if ate_key(text) != key:
        raise FixtureCorrupt(f"{where}: key does not hash from text")
    return key, tuple(terms)


def _asc_record(
    record: dict, where: str
) -> tuple[str, tuple[Polarity, dict[Polarity, float] | None]]:
    key, term, raw_polarity = record.get("key"), record.get("term"), record.get("polarity")
    if not isinstance(key, str) or not isinstance(term, str) or not isinstance(raw_polarity, str):
        raise FixtureCorrupt(f"{where}: asc record needs string key, term, polarity")
    try:
        polarity = Polarity(raw_polarity)
    except ValueError:
        raise FixtureCorrupt(f"{where}: unknown polarity {raw_polarity!r}") from None
    if polarity not in PIPELINE_POLARITIES:
        raise FixtureCorrupt(f"{where}: backends never emit {raw_polarity!r}")
    scores = None
    raw_scores = record.get("scores")
    if raw_scores is not None:
        if not isinstance(raw_scores, dict):
            raise FixtureCorrupt(f"{where}: scores must be an object")
        try:
            scores = {Polarity(label): float(value) for label, value in raw_scores.items()}
        except (ValueError, TypeError):
            raise FixtureCorrupt(f"{where}: bad scores {raw_scores!r}") from None
    return key, (polarity, scores)


def replay_ate(store: ReplayStore, text: str) -> CandidateAspects:
    key = ate_key(text)
    try:
        return CandidateAspects(store.ate_map[key])
    except KeyError:
        raise MissingFixture(
            f"no ate fixture in {store.source} for key {key} (text {text[:60]!r})"
        ) from None


def replay_asc(
    store: ReplayStore, text: str, term: str
) -> tuple[Polarity, dict[Polarity, float] | None]:
    key = asc_key(text, term)
    try:
        return store.asc_map[key]
    except KeyError:
        raise MissingFixture(
            f"no asc fixture in {store.source} for key {key} (term {term!r})"
        ) from None


class ReplayAteBackend:
    single_flight = False

    def __init__(self, store: ReplayStore, id: str = "replay-ate"):
        self.store = store
        self.id = id

    def extract(self, text: str) -> CandidateAspects:
        return replay_ate(self.store, text)


class ReplayAscBackend:
    single_flight = False

    def __init__(self, store: ReplayStore, id: str = "replay-asc"):
        self.store = store
        self.id = id

    def classify(self, text: str, term: str):
        return replay_asc(self.store, text, term)
