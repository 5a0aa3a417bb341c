"""Aspect-based sentiment analysis joint-task harness.

Parse SemEval-style annotated corpora, run an extract/filter/classify
pipeline over pluggable model backends, score the term, sentiment, and
joint (pair) tasks, and compare the results against published baselines.
"""

from .corpus import (
    Corpus,
    CorpusStats,
    GoldAspect,
    Polarity,
    Sentence,
    Violation,
    apply_conflict_policy,
    corpus_stats,
    parse_semeval_xml,
    serialize_semeval_xml,
    validate_corpus,
)
from .metrics import (
    AscSummary,
    MatchCounts,
    PrfScore,
    brute_force_oracle,
    match_pairs,
    match_terms,
    prf,
    score_asc_given_gold,
    score_asc_pipelined,
    score_ate,
    score_joint,
    sentence_errors,
)
from .normalize import DEFAULT_STRIP_CHARS, NormConfig, normalize_term
from .pipeline import (
    CandidateAspects,
    FilterConfig,
    LabeledAspect,
    PipelineOutput,
    PredictedAspect,
    classify_aspect,
    dump_outputs,
    extract_aspects,
    filter_aspects,
    parse_dump,
    run_corpus,
    run_pipeline,
)
from .report import (
    ComparisonEntry,
    ComparisonResult,
    EvalReport,
    RunManifest,
    build_report,
    compare_to_baseline,
    emit,
)
from .baselines import PUBLISHED_BASELINES, BaselineEntry, PublishedBaselines, canonical_dataset
from .version import __version__

__all__ = [
    "AscSummary",
    "BaselineEntry",
    "CandidateAspects",
    "ComparisonEntry",
    "ComparisonResult",
    "Corpus",
    "CorpusStats",
    "DEFAULT_STRIP_CHARS",
    "EvalReport",
    "FilterConfig",
    "GoldAspect",
    "LabeledAspect",
    "MatchCounts",
    "NormConfig",
    "PUBLISHED_BASELINES",
    "PublishedBaselines",
    "PipelineOutput",
    "Polarity",
    "PredictedAspect",
    "PrfScore",
    "RunManifest",
    "Sentence",
    "Violation",
    "__version__",
    "apply_conflict_policy",
    "brute_force_oracle",
    "build_report",
    "canonical_dataset",
    "classify_aspect",
    "compare_to_baseline",
    "corpus_stats",
    "dump_outputs",
    "emit",
    "extract_aspects",
    "filter_aspects",
    "match_pairs",
    "match_terms",
    "normalize_term",
    "parse_dump",
    "parse_semeval_xml",
    "prf",
    "run_corpus",
    "run_pipeline",
    "score_asc_given_gold",
    "score_asc_pipelined",
    "score_ate",
    "score_joint",
    "sentence_errors",
    "serialize_semeval_xml",
    "validate_corpus",
]
