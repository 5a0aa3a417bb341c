"""Command-line harness: validate, stats, run, score, compare, record.

Exit codes are a stable contract for CI: 0 success, 1 evaluation or
validation failure, 2 input error, 3 backend failure. Options may also be
given in a key-value config file (``--config``); explicit flags win.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from dataclasses import replace
from datetime import datetime, timezone
from pathlib import Path

from . import backends as be
from .baselines import PUBLISHED_BASELINES
from .corpus import (
    CONFLICT_POLICIES,
    Corpus,
    Polarity,
    apply_conflict_policy,
    corpus_stats,
    parse_semeval_xml,
    validate_corpus,
)
from .errors import (
    BackendUnavailable,
    DuplicateKey,
    FixtureCorrupt,
    IdMismatch,
    MalformedXml,
    MissingFixture,
    OffsetMismatch,
    ProtocolError,
    SchemaViolation,
    UnknownDataset,
)
from .metrics import (
    score_asc_given_gold,
    score_asc_pipelined,
    score_ate,
    score_joint,
    sentence_errors,
)
from .normalize import NormConfig, normalize_term
from .pipeline import (
    FilterConfig,
    LabeledAspect,
    PipelineOutput,
    PredictedAspect,
    dump_outputs,
    parse_dump,
    run_corpus,
)
from .report import RunManifest, build_report, compare_to_baseline, emit
from .version import __version__

EXIT_OK = 0
EXIT_EVAL = 1
EXIT_INPUT = 2
EXIT_BACKEND = 3

FORMATS = ("json", "csv", "markdown")
_FORMAT_FILES = {"json": "report.json", "csv": "report.csv", "markdown": "report.md"}

STATS_HEADER = "file,sentences,aspects,no_aspect,mean_aspects,positive,negative,neutral,conflict"


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except BackendUnavailable as err:
        note = f" ({err.completed} sentences completed)" if err.completed is not None else ""
        _err(f"backend failure: {err}{note}")
        return EXIT_BACKEND
    except ProtocolError as err:
        _err(f"protocol error: {err}")
        return EXIT_BACKEND
    except IdMismatch as err:
        _err(f"id mismatch: {err}")
        return EXIT_EVAL
    except (
        MalformedXml,
        SchemaViolation,
        OffsetMismatch,
        MissingFixture,
        FixtureCorrupt,
        DuplicateKey,
        UnknownDataset,
    ) as err:
        _err(f"input error: {err}")
        return EXIT_INPUT
    except (OSError, ValueError) as err:
        _err(f"input error: {err}")
        return EXIT_INPUT


def _err(message: str) -> None:
    print(f"absaeval: {message}", file=sys.stderr)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="absaeval",
        description="Aspect-based sentiment analysis joint-task harness.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_validate = sub.add_parser("validate", help="check corpus files against the data invariants")
    p_validate.add_argument("paths", nargs="+")
    p_validate.set_defaults(func=cmd_validate)

    p_stats = sub.add_parser("stats", help="per-file corpus statistics as csv on stdout")
    p_stats.add_argument("paths", nargs="+")
    p_stats.set_defaults(func=cmd_stats)

    p_run = sub.add_parser("run", help="run the pipeline over a corpus and score it")
    _add_run_options(p_run)
    p_run.set_defaults(func=cmd_run, record=False)

    p_record = sub.add_parser(
        "record", help="run the pipeline while recording every backend call to a fixture file"
    )
    _add_run_options(p_record)
    p_record.set_defaults(func=cmd_run, record=True)

    p_score = sub.add_parser("score", help="score an existing prediction dump against a corpus")
    p_score.add_argument("--corpus", required=True)
    p_score.add_argument("--dump", required=True, help="prediction dump written by run")
    p_score.add_argument("--config", help="key-value config file")
    p_score.add_argument("--name", help="corpus name override")
    p_score.add_argument("--conflict", choices=CONFLICT_POLICIES)
    p_score.add_argument("--out")
    p_score.add_argument("--format", action="append", metavar="{json,csv,markdown}")
    p_score.set_defaults(func=cmd_score)

    p_compare = sub.add_parser("compare", help="compare a report against the shipped baselines")
    p_compare.add_argument("--report", required=True, help="report.json written by run or score")
    p_compare.add_argument("--dataset", help="dataset override, e.g. res-14")
    p_compare.add_argument("--tolerance", type=float)
    p_compare.add_argument("--config", help="key-value config file")
    p_compare.add_argument("--out")
    p_compare.add_argument("--format", action="append", metavar="{json,csv,markdown}")
    p_compare.set_defaults(func=cmd_compare)

    return parser


def _add_run_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--corpus", required=True)
    p.add_argument("--ate", choices=("lexicon", "replay", "remote"))
    p.add_argument("--asc", choices=("lexicon", "replay", "remote"))
    p.add_argument("--fixtures", help="fixture file: input for replay, output for record")
    p.add_argument("--endpoint", help="inference service base URL (default: $ABSA_ENDPOINT)")
    p.add_argument("--parallelism", type=int)
    p.add_argument("--conflict", choices=CONFLICT_POLICIES)
    p.add_argument("--out", help="output directory (default: absaeval-out)")
    p.add_argument("--format", action="append", metavar="{json,csv,markdown}")
    p.add_argument("--tolerance", type=float, help="accepted so one config file serves run and compare")
    p.add_argument("--config", help="key-value config file")
    p.add_argument("--name", help="corpus name override")
    p.add_argument(
        "--asc-given-gold",
        action="store_true",
        default=None,
        help="also classify every gold aspect, independent of extraction",
    )


# ---------------------------------------------------------------------------
# configuration plumbing


_BOOL_VALUES = {"true": True, "1": True, "yes": True, "false": False, "0": False, "no": False}

_KNOWN_KEYS = {
    "ate", "asc", "fixtures", "endpoint", "parallelism", "conflict", "out", "format",
    "tolerance", "name", "asc_given_gold",
    "filter_require_substring", "filter_lowercase", "filter_strip_chars", "filter_dedupe",
    "filter_max_terms",
    "norm_lowercase", "norm_strip_chars", "norm_collapse_whitespace", "norm_strip_articles",
    "lexicon_aspect_terms", "lexicon_positive_cues", "lexicon_negative_cues",
    "lexicon_negators", "lexicon_window",
    "remote_timeout_ms", "remote_max_retries", "remote_backoff_ms", "remote_max_batch",
    "remote_max_in_flight",
}


def _read_config(path: str | None) -> dict[str, str]:
    if path is None:
        return {}
    values: dict[str, str] = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in _KNOWN_KEYS:
            raise ValueError(f"{path}:{lineno}: unknown config key {key!r}")
        values[key] = value
    return values


def _bool(value, key: str) -> bool:
    if isinstance(value, bool):
        return value
    try:
        return _BOOL_VALUES[value.strip().lower()]
    except KeyError:
        raise ValueError(f"config key {key!r}: expected a boolean, got {value!r}") from None


def _csv_set(value: str) -> frozenset[str]:
    return frozenset(item.strip() for item in value.split(",") if item.strip())


class _Settings:
    """Flag/config merge; explicit flags beat the config file."""

    def __init__(self, args, config: dict[str, str]):
        self._args = args
        self._config = config

    def get(self, key: str, default=None, cast=None):
        value = getattr(self._args, key, None)
        if value is None:
            value = self._config.get(key)
            if value is not None and cast is not None:
                value = cast(value)
        if value is None:
            return default
        return value

    def filter_config(self) -> FilterConfig:
        cfg = self._config
        max_terms = cfg.get("filter_max_terms")
        return FilterConfig(
            require_substring=_bool(cfg.get("filter_require_substring", True), "filter_require_substring"),
            lowercase=_bool(cfg.get("filter_lowercase", True), "filter_lowercase"),
            strip_chars=cfg.get("filter_strip_chars", FilterConfig().strip_chars),
            dedupe=_bool(cfg.get("filter_dedupe", True), "filter_dedupe"),
            max_terms=int(max_terms) if max_terms else None,
        )

    def norm_config(self) -> NormConfig:
        cfg = self._config
        return NormConfig(
            lowercase=_bool(cfg.get("norm_lowercase", True), "norm_lowercase"),
            strip_chars=cfg.get("norm_strip_chars", NormConfig().strip_chars),
            collapse_whitespace=_bool(
                cfg.get("norm_collapse_whitespace", True), "norm_collapse_whitespace"
            ),
            strip_articles=_bool(cfg.get("norm_strip_articles", False), "norm_strip_articles"),
        )

    def lexicon_config(self) -> be.LexiconConfig:
        cfg = self._config
        return be.LexiconConfig(
            aspect_terms=_csv_set(cfg.get("lexicon_aspect_terms", "")),
            positive_cues=_csv_set(cfg.get("lexicon_positive_cues", "")),
            negative_cues=_csv_set(cfg.get("lexicon_negative_cues", "")),
            negators=_csv_set(cfg.get("lexicon_negators", "not, no, never, n't")),
            window=int(cfg.get("lexicon_window", 3)),
        )

    def remote_config(self, endpoint: str) -> be.RemoteEndpointConfig:
        cfg = self._config
        return be.RemoteEndpointConfig(
            base_url=endpoint,
            timeout_ms=int(cfg.get("remote_timeout_ms", 30_000)),
            max_retries=int(cfg.get("remote_max_retries", 3)),
            backoff_ms=int(cfg.get("remote_backoff_ms", 250)),
            max_batch=int(cfg.get("remote_max_batch", 16)),
            max_in_flight=int(cfg.get("remote_max_in_flight", 4)),
        )

    def formats(self) -> list[str]:
        raw = self.get("format", ["json"], cast=lambda v: v.split(","))
        if isinstance(raw, str):
            raw = [raw]
        formats = []
        for item in raw:
            for fmt in str(item).split(","):
                fmt = fmt.strip()
                if fmt:
                    if fmt not in FORMATS:
                        raise ValueError(f"unknown format {fmt!r} (expected one of {FORMATS})")
                    if fmt not in formats:
                        formats.append(fmt)
        return formats or ["json"]


def _resolve_backends(settings: _Settings, recording_path: Path | None):
    """Build exactly one ATE and one ASC backend from the settings.

    Returns (ate, asc, service_version_callable). Rejects flag combinations
    that cannot be meant: fixtures without a replay backend (outside
    record), an endpoint without a remote backend, replay inside record.
    """
    ate_kind = settings.get("ate", "lexicon")
    asc_kind = settings.get("asc", "lexicon")
    kinds = {ate_kind, asc_kind}
    fixtures = settings.get("fixtures")
    endpoint = settings.get("endpoint") or os.environ.get("ABSA_ENDPOINT")

    if recording_path is not None and "replay" in kinds:
        raise ValueError("record writes fixtures; replay backends cannot be recorded")
    if fixtures is None and "replay" in kinds:
        raise ValueError("replay backends need --fixtures")
    if fixtures is not None and "replay" not in kinds and recording_path is None:
        raise ValueError("--fixtures given but no replay backend selected")
    if "remote" in kinds and not endpoint:
        raise ValueError("remote backends need --endpoint or ABSA_ENDPOINT")
    if endpoint and "remote" not in kinds:
        raise ValueError("--endpoint given but no remote backend selected")

    store = be.replay_load(fixtures) if "replay" in kinds else None
    lexicon_cfg = settings.lexicon_config() if "lexicon" in kinds else None
    remote_cfg = settings.remote_config(endpoint) if "remote" in kinds else None

    remotes = []

    def build(kind: str, role: str):
        if kind == "lexicon":
            return be.LexiconAteBackend(lexicon_cfg) if role == "ate" else be.LexiconAscBackend(lexicon_cfg)
        if kind == "replay":
            return be.ReplayAteBackend(store) if role == "ate" else be.ReplayAscBackend(store)
        backend = be.RemoteAteBackend(remote_cfg) if role == "ate" else be.RemoteAscBackend(remote_cfg)
        remotes.append(backend)
        return backend

    ate = build(ate_kind, "ate")
    asc = build(asc_kind, "asc")
    if recording_path is not None:
        ate = be.record_wrap(ate, recording_path)
        asc = be.record_wrap(asc, recording_path)

    def service_version() -> str:
        return remotes[0].service_version if remotes else "n/a"

    return ate, asc, service_version


# ---------------------------------------------------------------------------
# commands


def cmd_validate(args) -> int:
    worst = EXIT_OK
    for path in args.paths:
        try:
            corpus = parse_semeval_xml(
                Path(path).read_bytes(), name=Path(path).stem, validate_offsets=False
            )
        except (OSError, MalformedXml, SchemaViolation) as err:
            print(f"{path}: unusable: {err}")
            worst = EXIT_INPUT
            continue
        violations = validate_corpus(corpus)
        for violation in violations:
            print(f"{path}:{violation.sentence_id}: {violation.rule}: {violation.detail}")
        if violations and worst < EXIT_INPUT:
            worst = EXIT_EVAL
        if not violations:
            print(f"{path}: ok ({len(corpus)} sentences)")
    return worst


def cmd_stats(args) -> int:
    print(STATS_HEADER)
    status = EXIT_OK
    for path in args.paths:
        try:
            corpus = parse_semeval_xml(Path(path).read_bytes(), name=Path(path).stem)
        except (OSError, MalformedXml, SchemaViolation, OffsetMismatch) as err:
            _err(f"{path}: {err}")
            status = EXIT_INPUT
            continue
        stats = corpus_stats(corpus)
        hist = stats.polarity_histogram
        print(
            f"{Path(path).name},{stats.sentence_count},{stats.aspect_count},"
            f"{stats.no_aspect_count},{stats.mean_aspects:.4f},"
            f"{hist[Polarity.POSITIVE]},{hist[Polarity.NEGATIVE]},"
            f"{hist[Polarity.NEUTRAL]},{hist[Polarity.CONFLICT]}"
        )
    return status


def _load_corpus(settings: _Settings, path: str) -> tuple[Corpus, str]:
    data = Path(path).read_bytes()
    sha = hashlib.sha256(data).hexdigest()
    corpus = parse_semeval_xml(data, name=Path(path).stem)
    name = settings.get("name")
    if name:
        corpus = replace(corpus, name=name)
    return corpus, sha


def _timestamp() -> str:
    pinned = os.environ.get("ABSA_RUN_TIMESTAMP")
    if pinned:
        return pinned
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def _write_report_files(out_dir: Path, report, formats: list[str]) -> None:
    for fmt in formats:
        (out_dir / _FORMAT_FILES[fmt]).write_bytes(emit(report, fmt))


def _headline(report) -> str:
    doc = report.to_json_dict()
    pipelined = doc["asc"]["pipelined"]
    asc_text = f"{pipelined['micro_f1']:.2f}" if pipelined is not None else "n/a"
    return (
        f"ATE F1 {doc['ate']['f1']:.2f} | ASC {asc_text} | joint F1 {doc['joint']['f1']:.2f}"
    )


def cmd_run(args) -> int:
    settings = _Settings(args, _read_config(args.config))
    out_dir = Path(settings.get("out", "absaeval-out"))
    out_dir.mkdir(parents=True, exist_ok=True)
    fixtures_out: Path | None = None
    if args.record:
        raw = settings.get("fixtures")
        if raw is None:
            raise ValueError("record needs --fixtures as the output path")
        fixtures_out = Path(raw)

    corpus, corpus_sha = _load_corpus(settings, args.corpus)
    conflict = settings.get("conflict", "drop")
    corpus = apply_conflict_policy(corpus, conflict)
    filter_cfg = settings.filter_config()
    norm_cfg = settings.norm_config()
    parallelism = int(settings.get("parallelism", 1))

    ate, asc, service_version = _resolve_backends(settings, fixtures_out)

    try:
        outputs = run_corpus(ate, asc, corpus, filter_cfg, parallelism)
        asc_given_gold = None
        if settings.get("asc_given_gold", False, cast=lambda v: _bool(v, "asc_given_gold")):
            asc_given_gold = score_asc_given_gold(corpus, asc)
    except BackendUnavailable as err:
        if fixtures_out is not None:
            marker = fixtures_out.with_name(fixtures_out.name + ".incomplete")
            marker.write_text(f"recording aborted: {err}\n", encoding="utf-8")
            _err(f"partial fixture flagged at {marker}")
        raise

    (out_dir / "predictions.jsonl").write_bytes(dump_outputs(outputs))

    manifest = RunManifest(
        timestamp=_timestamp(),
        corpus_name=corpus.name,
        corpus_sha256=corpus_sha,
        ate_backend=ate.id,
        asc_backend=asc.id,
        service_version=service_version(),
        filter_cfg=filter_cfg,
        norm_cfg=norm_cfg,
        conflict_policy=conflict,
        parallelism=parallelism,
        tool_version=__version__,
    )
    report = build_report(
        manifest=manifest,
        ate=score_ate(corpus, outputs, norm_cfg),
        joint=score_joint(corpus, outputs, norm_cfg),
        asc_given_gold=asc_given_gold,
        asc_pipelined=score_asc_pipelined(corpus, outputs, norm_cfg),
        errors=sentence_errors(corpus, outputs, norm_cfg),
    )
    _write_report_files(out_dir, report, settings.formats())
    (out_dir / "manifest.json").write_text(
        json.dumps(manifest.to_json_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    print(_headline(report))
    return EXIT_OK


def cmd_score(args) -> int:
    settings = _Settings(args, _read_config(args.config))
    out_dir = Path(settings.get("out", "absaeval-out"))
    out_dir.mkdir(parents=True, exist_ok=True)

    dump_path = Path(args.dump)
    records = parse_dump(dump_path.read_bytes())

    sibling = dump_path.parent / "manifest.json"
    run_manifest: dict = {}
    if sibling.exists():
        run_manifest = json.loads(sibling.read_text(encoding="utf-8"))

    corpus, corpus_sha = _load_corpus(settings, args.corpus)
    if not settings.get("name") and run_manifest.get("corpus_name"):
        corpus = replace(corpus, name=run_manifest["corpus_name"])
    conflict = settings.get("conflict") or run_manifest.get("conflict_policy") or "drop"
    corpus = apply_conflict_policy(corpus, conflict)

    filter_cfg = (
        FilterConfig(**run_manifest["filter_cfg"]) if "filter_cfg" in run_manifest
        else settings.filter_config()
    )
    norm_cfg = (
        NormConfig(**run_manifest["norm_cfg"]) if "norm_cfg" in run_manifest
        else settings.norm_config()
    )
    ate_id = run_manifest.get("ate_backend", f"dump:{dump_path.name}")
    asc_id = run_manifest.get("asc_backend", f"dump:{dump_path.name}")

    corpus_ids = {sentence.id for sentence in corpus.sentences}
    unknown = [record["id"] for record in records if record["id"] not in corpus_ids]
    if unknown:
        _err(f"dump contains ids unknown to the corpus: {unknown[:5]}")
        return EXIT_EVAL

    backend_ids = {"ate": ate_id, "asc": asc_id}
    timing = {"ate": 0.0, "filter": 0.0, "asc": 0.0}
    by_id = {}
    for record in records:
        labeled = []
        for aspect in record["aspects"]:
            scores = None
            if "scores" in aspect:
                scores = {Polarity(k): float(v) for k, v in aspect["scores"].items()}
            labeled.append(
                LabeledAspect(
                    aspect=PredictedAspect(
                        term=aspect["term"],
                        normalized=normalize_term(aspect["term"], norm_cfg),
                    ),
                    polarity=Polarity(aspect["polarity"]),
                    scores=scores,
                )
            )
        by_id[record["id"]] = PipelineOutput(
            sentence_id=record["id"],
            labeled=tuple(labeled),
            timing=timing,
            backend_ids=backend_ids,
        )

    outputs = []
    for sentence in corpus.sentences:
        output = by_id.get(sentence.id)
        if output is None:
            _err(f"warning: no prediction for sentence {sentence.id!r}; scored as empty")
            output = PipelineOutput(
                sentence_id=sentence.id, labeled=(), timing=timing, backend_ids=backend_ids
            )
        outputs.append(output)

    manifest = RunManifest(
        timestamp=_timestamp(),
        corpus_name=corpus.name,
        corpus_sha256=corpus_sha,
        ate_backend=ate_id,
        asc_backend=asc_id,
        service_version=run_manifest.get("service_version", "n/a"),
        filter_cfg=filter_cfg,
        norm_cfg=norm_cfg,
        conflict_policy=conflict,
        parallelism=1,
        tool_version=__version__,
    )
    report = build_report(
        manifest=manifest,
        ate=score_ate(corpus, outputs, norm_cfg),
        joint=score_joint(corpus, outputs, norm_cfg),
        asc_pipelined=score_asc_pipelined(corpus, outputs, norm_cfg),
        errors=sentence_errors(corpus, outputs, norm_cfg),
    )
    _write_report_files(out_dir, report, settings.formats())
    (out_dir / "manifest.json").write_text(
        json.dumps(manifest.to_json_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    print(_headline(report))
    return EXIT_OK


def cmd_compare(args) -> int:
    settings = _Settings(args, _read_config(args.config))
    doc = json.loads(Path(args.report).read_text(encoding="utf-8"))
    tolerance = float(settings.get("tolerance", 1.5))
    comparison = compare_to_baseline(
        doc, PUBLISHED_BASELINES, tolerance, dataset=settings.get("dataset")
    )
    out = settings.get("out")
    if out:
        out_dir = Path(out)
        out_dir.mkdir(parents=True, exist_ok=True)
        names = {"json": "comparison.json", "csv": "comparison.csv", "markdown": "comparison.md"}
        for fmt in settings.formats():
            (out_dir / names[fmt]).write_bytes(emit(comparison, fmt))
    else:
        sys.stdout.write(emit(comparison, "markdown").decode("utf-8"))
    return EXIT_OK if comparison.passed else EXIT_EVAL


if __name__ == "__main__":
    sys.exit(main())
