"""Scoring for the three tasks: term F1, per-aspect sentiment, pair F1.

Term and pair matching is string equality over normalized forms with
multiset semantics: a prediction counts once per unconsumed gold
occurrence. ATE and joint scores are micro-averaged (counts summed over
the corpus, then turned into precision/recall/F1); divisions by zero
follow the 0-convention and are flagged downstream rather than emitting
NaN.
"""

from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .corpus import PIPELINE_POLARITIES, Corpus, Polarity
from .errors import IdMismatch, SizeExceeded
from .normalize import DEFAULT_STRIP_CHARS, NormConfig, normalize_term  # noqa: F401
from .pipeline import PipelineOutput

_ORACLE_LIMIT = 12


@dataclass(frozen=True)
class MatchCounts:
    tp: int = 0
    fp: int = 0
    fn: int = 0

    def __post_init__(self):
        if min(self.tp, self.fp, self.fn) < 0:
            raise ValueError("counts must be non-negative")

    def __add__(self, other: "MatchCounts") -> "MatchCounts":
        return MatchCounts(self.tp + other.tp, self.fp + other.fp, self.fn + other.fn)


@dataclass(frozen=True)
class PrfScore:
    precision: float
    recall: float
    f1: float
    counts: MatchCounts


def prf(counts: MatchCounts) -> PrfScore:
    """p = tp/(tp+fp), r = tp/(tp+fn), f1 = 2pr/(p+r); 0 when a
    denominator is 0."""
    tp, fp, fn = counts.tp, counts.fp, counts.fn
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return PrfScore(precision=precision, recall=recall, f1=f1, counts=counts)


def match_terms(
    gold: Iterable[str], pred: Iterable[str], cfg: NormConfig = NormConfig()
) -> MatchCounts:
    """Greedy multiset intersection over normalized terms."""
    gold_keys = Counter(normalize_term(term, cfg) for term in gold)
    pred_keys = Counter(normalize_term(term, cfg) for term in pred)
    return _intersect(gold_keys, pred_keys)


def match_pairs(
    gold: Iterable[tuple[str, Polarity]],
    pred: Iterable[tuple[str, Polarity]],
    cfg: NormConfig = NormConfig(),
) -> MatchCounts:
    """Multiset intersection over (normalized term, polarity) pairs."""
    gold_keys = Counter((normalize_term(term, cfg), polarity) for term, polarity in gold)
    pred_keys = Counter((normalize_term(term, cfg), polarity) for term, polarity in pred)
    return _intersect(gold_keys, pred_keys)


def _intersect(gold_keys: Counter, pred_keys: Counter) -> MatchCounts:
    tp = sum(min(count, pred_keys[key]) for key, count in gold_keys.items())
    return MatchCounts(
        tp=tp, fp=sum(pred_keys.values()) - tp, fn=sum(gold_keys.values()) - tp
    )


def brute_force_oracle(
    gold: Sequence, pred: Sequence, cfg: NormConfig = NormConfig()
) -> MatchCounts:
    """Independent oracle: maximum bipartite matching by exhaustive search.

    Searches all injective gold-to-prediction assignments (memoized on a
    used-prediction bitmask); a pair may match iff the normalized keys are
    equal. Accepts plain terms or (term, polarity) tuples. Exists to check
    the multiset implementation, not to differ from it.
    """
    gold_keys = [_oracle_key(item, cfg) for item in gold]
    pred_keys = [_oracle_key(item, cfg) for item in pred]
    if len(gold_keys) > _ORACLE_LIMIT or len(pred_keys) > _ORACLE_LIMIT:
        raise SizeExceeded(f"oracle accepts at most {_ORACLE_LIMIT} items per side")

    memo: dict[tuple[int, int], int] = {}

    def best(i: int, used: int) -> int:
        if i == len(gold_keys):
            return 0
        state = (i, used)
        if state not in memo:
            result = best(i + 1, used)  # leave gold item i unmatched
            for j, key in enumerate(pred_keys):
                if not used >> j & 1 and key == gold_keys[i]:
                    result = max(result, 1 + best(i + 1, used | 1 << j))
            memo[state] = result
        return memo[state]

    tp = best(0, 0)
    return MatchCounts(tp=tp, fp=len(pred_keys) - tp, fn=len(gold_keys) - tp)


def _oracle_key(item, cfg: NormConfig):
    if isinstance(item, tuple):
        term, polarity = item
        return (normalize_term(term, cfg), polarity)
    return normalize_term(item, cfg)


def _outputs_by_id(corpus: Corpus, outputs: Sequence[PipelineOutput]) -> dict[str, PipelineOutput]:
    corpus_ids = sorted(s.id for s in corpus.sentences)
    output_ids = sorted(o.sentence_id for o in outputs)
    if corpus_ids != output_ids:
        missing = sorted(set(corpus_ids) - set(output_ids))
        unexpected = sorted(set(output_ids) - set(corpus_ids))
        raise IdMismatch(
            f"outputs do not cover the corpus exactly"
            f" (missing {missing[:5]}, unexpected {unexpected[:5]})"
        )
    return {o.sentence_id: o for o in outputs}


def score_ate(
    corpus: Corpus, outputs: Sequence[PipelineOutput], cfg: NormConfig = NormConfig()
) -> PrfScore:
    """Micro-averaged term F1: counts summed over sentences, then prf."""
    by_id = _outputs_by_id(corpus, outputs)
    total = MatchCounts()
    for sentence in corpus.sentences:
        predicted = [la.aspect.term for la in by_id[sentence.id].labeled]
        total = total + match_terms([a.term for a in sentence.gold], predicted, cfg)
    return prf(total)


def score_joint(
    corpus: Corpus, outputs: Sequence[PipelineOutput], cfg: NormConfig = NormConfig()
) -> PrfScore:
    """Micro-averaged pair F1: a prediction counts only when term and
    polarity both match the gold pair."""
    by_id = _outputs_by_id(corpus, outputs)
    total = MatchCounts()
    for sentence in corpus.sentences:
        predicted = [(la.aspect.term, la.polarity) for la in by_id[sentence.id].labeled]
        gold = [(a.term, a.polarity) for a in sentence.gold]
        total = total + match_pairs(gold, predicted, cfg)
    return prf(total)


@dataclass(frozen=True)
class AscSummary:
    """Classification summary; ``micro_f1`` equals accuracy because every
    item is classified exactly once. ``total == 0`` flags the degenerate
    all-zero case."""

    accuracy: float
    micro_f1: float
    macro_f1: float
    per_class: Mapping[Polarity, PrfScore]
    total: int


def _asc_summary(items: Sequence[tuple[Polarity, Polarity]]) -> AscSummary:
    total = len(items)
    correct = sum(1 for gold, predicted in items if gold is predicted)
    accuracy = correct / total if total else 0.0
    per_class = {}
    for label in PIPELINE_POLARITIES:
        tp = sum(1 for gold, predicted in items if gold is label and predicted is label)
        fp = sum(1 for gold, predicted in items if gold is not label and predicted is label)
        fn = sum(1 for gold, predicted in items if gold is label and predicted is not label)
        per_class[label] = prf(MatchCounts(tp=tp, fp=fp, fn=fn))
    macro_f1 = sum(score.f1 for score in per_class.values()) / len(per_class)
    return AscSummary(
        accuracy=accuracy,
        micro_f1=accuracy,
        macro_f1=macro_f1,
        per_class=per_class,
        total=total,
    )


def score_asc_given_gold(corpus: Corpus, asc_backend) -> AscSummary:
    """Classify every gold (sentence, term) pair, independent of extraction.

    Gold must be conflict-free; apply a conflict policy first.
    """
    items = []
    for sentence in corpus.sentences:
        for aspect in sentence.gold:
            if aspect.polarity is Polarity.CONFLICT:
                raise ValueError(
                    f"sentence {sentence.id!r} still carries a conflict label;"
                    " apply_conflict_policy first"
                )
            predicted, _ = asc_backend.classify(sentence.text, aspect.term)
            items.append((aspect.polarity, predicted))
    return _asc_summary(items)


def score_asc_pipelined(
    corpus: Corpus, outputs: Sequence[PipelineOutput], cfg: NormConfig = NormConfig()
) -> AscSummary:
    """Sentiment agreement over the aspects the pipeline actually
    extracted: each prediction consumes the first unconsumed gold aspect
    with the same normalized term. Extraction misses and spurious terms
    are invisible here; they belong to the term and pair scores."""
    by_id = _outputs_by_id(corpus, outputs)
    items = []
    for sentence in corpus.sentences:
        pool: dict[str, list[Polarity]] = defaultdict(list)
        for aspect in sentence.gold:
            pool[normalize_term(aspect.term, cfg)].append(aspect.polarity)
        for labeled in by_id[sentence.id].labeled:
            matches = pool.get(normalize_term(labeled.aspect.term, cfg))
            if matches:
                items.append((matches.pop(0), labeled.polarity))
    return _asc_summary(items)


def sentence_errors(
    corpus: Corpus, outputs: Sequence[PipelineOutput], cfg: NormConfig = NormConfig()
) -> list[dict]:
    """Per-sentence listing of unmatched gold and predicted pairs, sorted
    by sentence id; sentences with a perfect pair match are omitted."""
    by_id = _outputs_by_id(corpus, outputs)
    listing = []
    for sentence in corpus.sentences:
        gold_pairs = Counter(
            (normalize_term(a.term, cfg), a.polarity) for a in sentence.gold
        )
        pred_pairs = Counter(
            (normalize_term(la.aspect.term, cfg), la.polarity)
            for la in by_id[sentence.id].labeled
        )
        missing = gold_pairs - pred_pairs
        spurious = pred_pairs - gold_pairs
        if missing or spurious:
            listing.append(
                {
                    "id": sentence.id,
                    "missing": _pair_strings(missing),
                    "spurious": _pair_strings(spurious),
                }
            )
    listing.sort(key=lambda entry: entry["id"])
    return listing


def _pair_strings(pairs: Counter) -> list[str]:
    return sorted(
        f"{term} ({polarity.value})"
        for (term, polarity), count in pairs.items()
        for _ in range(count)
    )
