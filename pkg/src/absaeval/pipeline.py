"""The three-stage ABSA pipeline: extract aspects, filter them, classify each.

The stages are deliberately kept as separate functions; ``run_pipeline`` is
nothing more than their literal composition, and a property test holds it
to that.
"""

from __future__ import annotations

import json
import string
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Mapping, Sequence

from .corpus import PIPELINE_POLARITIES, Corpus, Polarity, Sentence
from .errors import BackendUnavailable
from .normalize import DEFAULT_STRIP_CHARS, NormConfig, normalize_term


@dataclass(frozen=True)
class CandidateAspects:
    """Raw ATE backend output: may contain duplicates and noise."""

    terms: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))


@dataclass(frozen=True)
class FilterConfig:
    require_substring: bool = True
    lowercase: bool = True
    strip_chars: str = DEFAULT_STRIP_CHARS
    dedupe: bool = True
    max_terms: int | None = None

    def __post_init__(self):
        if self.max_terms is not None and self.max_terms < 1:
            raise ValueError("max_terms must be >= 1 when present")

    def norm_config(self) -> NormConfig:
        return NormConfig(
            lowercase=self.lowercase, strip_chars=self.strip_chars, collapse_whitespace=True
        )


@dataclass(frozen=True)
class PredictedAspect:
    term: str
    normalized: str
    span: tuple[int, int] | None = None


@dataclass(frozen=True)
class LabeledAspect:
    aspect: PredictedAspect
    polarity: Polarity
    scores: Mapping[Polarity, float] | None = None

    def __post_init__(self):
        if self.polarity is Polarity.CONFLICT:
            raise ValueError("pipeline outputs never carry the conflict label")
        if self.scores is not None:
            _check_scores(self.scores, self.polarity)


def _check_scores(scores: Mapping[Polarity, float], polarity: Polarity) -> None:
    for label, value in scores.items():
        if not 0.0 <= value <= 1.0:
            raise ValueError(f"score for {label} out of [0, 1]: {value}")
    total = sum(scores.values())
    if abs(total - 1.0) > 1e-6:
        raise ValueError(f"scores sum to {total}, expected 1 within 1e-6")
    if scores.get(polarity, 0.0) < max(scores.values()) - 1e-9:
        raise ValueError(f"argmax of scores does not equal polarity {polarity}")


@dataclass(frozen=True)
class PipelineOutput:
    sentence_id: str
    labeled: tuple[LabeledAspect, ...]
    timing: Mapping[str, float]
    backend_ids: Mapping[str, str]

    def __post_init__(self):
        object.__setattr__(self, "labeled", tuple(self.labeled))


def extract_aspects(ate_backend, text: str) -> CandidateAspects:
    """Run the ATE backend; candidates are returned unmodified.

    Filtering is a separate stage on purpose, so raw backend output stays
    observable.
    """
    if not text:
        raise ValueError("text must be non-empty")
    return ate_backend.extract(text)


def filter_aspects(
    candidates: CandidateAspects, cfg: FilterConfig, text: str
) -> list[PredictedAspect]:
    """Refine raw candidates into predicted aspects.

    In order: empty terms are dropped, ``strip_chars`` are trimmed from
    both ends, duplicates (by normalized form) keep their first occurrence,
    terms whose normalized form does not occur in the normalized text are
    dropped when ``require_substring``, and the list is capped at
    ``max_terms``. Spans are assigned by first case-insensitive occurrence
    when locatable. Never invents a term the backend did not produce.
    """
    norm_cfg = cfg.norm_config()
    edge = cfg.strip_chars + string.whitespace
    norm_text = normalize_term(text, norm_cfg)
    out: list[PredictedAspect] = []
    seen: set[str] = set()
    for raw in candidates.terms:
        term = raw.strip(edge)
        if not term:
            continue
        normalized = normalize_term(term, norm_cfg)
        if not normalized:
            continue
        if cfg.dedupe:
            if normalized in seen:
                continue
            seen.add(normalized)
        if cfg.require_substring and normalized not in norm_text:
            continue
        surface, span = _locate(term, text, normalized, norm_cfg)
        out.append(PredictedAspect(term=surface, normalized=normalized, span=span))
        if cfg.max_terms is not None and len(out) >= cfg.max_terms:
            break
    return out


def _locate(
    term: str, text: str, normalized: str, norm_cfg: NormConfig
) -> tuple[str, tuple[int, int] | None]:
    """Best-effort span: first case-insensitive occurrence of ``term``.

    On a hit the text slice becomes the surface form, so a present span
    always satisfies ``text[from:to] == term``. The slice is only adopted
    when it normalizes to the same key, so the no-invention guarantee
    survives exotic case folding.
    """
    low_text, low_term = text.lower(), term.lower()
    if len(low_text) != len(text) or len(low_term) != len(term):
        low_text, low_term = text, term  # case folding moved offsets; exact search only
    pos = low_text.find(low_term)
    while pos != -1:
        surface = text[pos : pos + len(term)]
        if normalize_term(surface, norm_cfg) == normalized:
            return surface, (pos, pos + len(term))
        pos = low_text.find(low_term, pos + 1)
    return term, None


def classify_aspect(asc_backend, text: str, aspect: PredictedAspect) -> LabeledAspect:
    """Run the ASC backend for one (sentence, aspect) pair."""
    if not aspect.term:
        raise ValueError("aspect term must be non-empty")
    polarity, scores = asc_backend.classify(text, aspect.term)
    return LabeledAspect(aspect=aspect, polarity=polarity, scores=scores)


def run_pipeline(
    ate_backend,
    asc_backend,
    sentence: Sentence,
    filter_cfg: FilterConfig = FilterConfig(),
) -> PipelineOutput:
    """Extract, filter, then classify each surviving aspect in order.

    Equals the manual three-call composition by construction; the ASC
    backend is invoked once per (sentence, aspect) pair and never when the
    filtered list is empty.
    """
    t0 = time.perf_counter()
    try:
        candidates = extract_aspects(ate_backend, sentence.text)
    except BackendUnavailable as err:
        raise _with_context(err, sentence.id, "ate")
    t1 = time.perf_counter()
    aspects = filter_aspects(candidates, filter_cfg, sentence.text)
    t2 = time.perf_counter()
    labeled = []
    for aspect in aspects:
        try:
            labeled.append(classify_aspect(asc_backend, sentence.text, aspect))
        except BackendUnavailable as err:
            raise _with_context(err, sentence.id, "asc")
    t3 = time.perf_counter()
    return PipelineOutput(
        sentence_id=sentence.id,
        labeled=tuple(labeled),
        timing={"ate": t1 - t0, "filter": t2 - t1, "asc": t3 - t2},
        backend_ids={"ate": ate_backend.id, "asc": asc_backend.id},
    )


def run_corpus(
    ate_backend,
    asc_backend,
    corpus: Corpus,
    filter_cfg: FilterConfig = FilterConfig(),
    parallelism: int = 1,
) -> list[PipelineOutput]:
    """Run the pipeline over a corpus, optionally across threads.

    Output order always equals corpus sentence order, whatever the
    execution interleaving, so deterministic backends give identical
    results for every parallelism value. Fails fast on the first
    :class:`BackendUnavailable`, recording how many sentences completed.
    """
    if parallelism < 1:
        raise ValueError("parallelism must be >= 1")
    ate_backend = _serialize_if_requested(ate_backend)
    asc_backend = _serialize_if_requested(asc_backend)

    if parallelism == 1 or len(corpus.sentences) <= 1:
        outputs: list[PipelineOutput] = []
        for sentence in corpus.sentences:
            try:
                outputs.append(run_pipeline(ate_backend, asc_backend, sentence, filter_cfg))
            except BackendUnavailable as err:
                err.completed = len(outputs)
                raise
        return outputs

    with ThreadPoolExecutor(max_workers=parallelism) as pool:
        futures = [
            pool.submit(run_pipeline, ate_backend, asc_backend, sentence, filter_cfg)
            for sentence in corpus.sentences
        ]
        outputs = []
        for future in futures:
            try:
                outputs.append(future.result())
            except BackendUnavailable as err:
                for pending in futures:
                    pending.cancel()
                err.completed = len(outputs)
                raise
    return outputs


def _with_context(err: BackendUnavailable, sentence_id: str, stage: str) -> BackendUnavailable:
    if err.sentence_id is None:
        err.sentence_id = sentence_id
    if err.stage is None:
        err.stage = stage
    return err


def dump_outputs(outputs: Sequence[PipelineOutput]) -> bytes:
    """Serialize outputs to the prediction dump format.

    One UTF-8 JSON record per sentence:
    ``{"id": ..., "aspects": [{"term": ..., "polarity": ..., "scores": {...}?}]}``.
    Deterministic for deterministic inputs.
    """
    lines = []
    for output in outputs:
        aspects = []
        for labeled in output.labeled:
            record = {"term": labeled.aspect.term, "polarity": labeled.polarity.value}
            if labeled.scores is not None:
                record["scores"] = {
                    p.value: float(labeled.scores[p])
                    for p in PIPELINE_POLARITIES
                    if p in labeled.scores
                }
            aspects.append(record)
        lines.append(json.dumps({"id": output.sentence_id, "aspects": aspects}, ensure_ascii=False))
    return ("\n".join(lines) + "\n" if lines else "").encode("utf-8")


def parse_dump(data: bytes) -> list[dict]:
    """Parse a prediction dump back into raw records, checking shape.

    Raises ValueError naming the offending line; polarity values are
    restricted to the three pipeline labels.
    """
    records = []
    for lineno, line in enumerate(data.decode("utf-8").splitlines(), start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as err:
            raise ValueError(f"dump line {lineno}: not valid JSON ({err})") from None
        if not isinstance(record, dict) or not isinstance(record.get("id"), str):
            raise ValueError(f"dump line {lineno}: record needs a string id")
        aspects = record.get("aspects")
        if not isinstance(aspects, list):
            raise ValueError(f"dump line {lineno}: record needs an aspects list")
        for aspect in aspects:
            if not isinstance(aspect, dict) or not isinstance(aspect.get("term"), str):
                raise ValueError(f"dump line {lineno}: aspect needs a string term")
            if aspect.get("polarity") not in {p.value for p in PIPELINE_POLARITIES}:
                raise ValueError(
                    f"dump line {lineno}: bad polarity {aspect.get('polarity')!r}"
                )
            if "scores" in aspect and not isinstance(aspect["scores"], dict):
                raise ValueError(f"dump line {lineno}: scores must be an object")
        records.append(record)
    return records


class _SingleFlight:
    """Serializes calls to a backend that declared itself single-flight."""

    def __init__(self, inner):
        self._inner = inner
        self._lock = threading.Lock()
        self.id = inner.id
        self.single_flight = True

    def extract(self, text: str) -> CandidateAspects:
        with self._lock:
            return self._inner.extract(text)

    def classify(self, text: str, term: str):
        with self._lock:
            return self._inner.classify(text, term)


def _serialize_if_requested(backend):
    if getattr(backend, "single_flight", False):
        return _SingleFlight(backend)
    return backend
