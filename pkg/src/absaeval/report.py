"""Assemble evaluation runs into reports and compare them to baselines.

The report JSON document has the top-level keys ``manifest``, ``ate``,
``asc``, ``joint``, ``errors``. Its embedded manifest section carries only
fields that determine the results (corpus identity, backend ids, configs);
execution metadata that legitimately varies between otherwise identical
runs (wall-clock timestamp, parallelism) lives in the standalone manifest
file, so reports from equivalent runs are byte-identical. Emitted numbers
are percentages rendered with 2 decimal places.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, fields
from typing import Sequence

from .baselines import PUBLISHED_BASELINES, PublishedBaselines, canonical_dataset
from .metrics import AscSummary, PrfScore
from .normalize import NormConfig
from .pipeline import FilterConfig


@dataclass(frozen=True)
class RunManifest:
    timestamp: str
    corpus_name: str
    corpus_sha256: str
    ate_backend: str
    asc_backend: str
    service_version: str
    filter_cfg: FilterConfig
    norm_cfg: NormConfig
    conflict_policy: str
    parallelism: int
    tool_version: str

    def __post_init__(self):
        for field in fields(self):
            value = getattr(self, field.name)
            if value is None or (isinstance(value, str) and not value):
                raise ValueError(f"manifest field {field.name!r} must be populated")
        if self.parallelism < 1:
            raise ValueError("parallelism must be >= 1")

    def report_fields(self) -> dict:
        """The subset embedded in reports: everything that determines the
        numbers, nothing that varies between equivalent runs."""
        return {
            "corpus_name": self.corpus_name,
            "corpus_sha256": self.corpus_sha256,
            "ate_backend": self.ate_backend,
            "asc_backend": self.asc_backend,
            "service_version": self.service_version,
            "filter_cfg": _filter_dict(self.filter_cfg),
            "norm_cfg": _norm_dict(self.norm_cfg),
            "conflict_policy": self.conflict_policy,
            "tool_version": self.tool_version,
        }

    def to_json_dict(self) -> dict:
        full = self.report_fields()
        full["timestamp"] = self.timestamp
        full["parallelism"] = self.parallelism
        return full


def _filter_dict(cfg: FilterConfig) -> dict:
    return {
        "require_substring": cfg.require_substring,
        "lowercase": cfg.lowercase,
        "strip_chars": cfg.strip_chars,
        "dedupe": cfg.dedupe,
        "max_terms": cfg.max_terms,
    }


def _norm_dict(cfg: NormConfig) -> dict:
    return {
        "lowercase": cfg.lowercase,
        "strip_chars": cfg.strip_chars,
        "collapse_whitespace": cfg.collapse_whitespace,
        "strip_articles": cfg.strip_articles,
    }


@dataclass(frozen=True)
class EvalReport:
    manifest: RunManifest
    ate: PrfScore
    joint: PrfScore
    asc_given_gold: AscSummary | None
    asc_pipelined: AscSummary | None
    errors: tuple[dict, ...]

    def to_json_dict(self) -> dict:
        return {
            "manifest": self.manifest.report_fields(),
            "ate": _prf_dict(self.ate),
            "asc": {
                "given_gold": _asc_dict(self.asc_given_gold),
                "pipelined": _asc_dict(self.asc_pipelined),
            },
            "joint": _prf_dict(self.joint),
            "errors": list(self.errors),
        }


def build_report(
    manifest: RunManifest,
    ate: PrfScore,
    joint: PrfScore,
    asc_given_gold: AscSummary | None = None,
    asc_pipelined: AscSummary | None = None,
    errors: Sequence[dict] = (),
) -> EvalReport:
    """Deterministic report assembly; the error listing is sorted by
    sentence id. A pair-correct prediction is term-correct by definition,
    so a joint tp above the term tp means the inputs are inconsistent."""
    if joint.counts.tp > ate.counts.tp:
        raise ValueError(
            f"joint tp {joint.counts.tp} exceeds term tp {ate.counts.tp};"
            " scores come from different runs"
        )
    return EvalReport(
        manifest=manifest,
        ate=ate,
        joint=joint,
        asc_given_gold=asc_given_gold,
        asc_pipelined=asc_pipelined,
        errors=tuple(sorted(errors, key=lambda entry: entry["id"])),
    )


def _pct(value: float) -> float:
    return round(100.0 * value, 2)


def _prf_dict(score: PrfScore) -> dict:
    counts = score.counts
    zero = []
    if counts.tp + counts.fp == 0:
        zero.append("precision")
    if counts.tp + counts.fn == 0:
        zero.append("recall")
    if score.precision + score.recall == 0:
        zero.append("f1")
    return {
        "precision": _pct(score.precision),
        "recall": _pct(score.recall),
        "f1": _pct(score.f1),
        "tp": counts.tp,
        "fp": counts.fp,
        "fn": counts.fn,
        "zero_division": zero,
    }


def _asc_dict(summary: AscSummary | None) -> dict | None:
    if summary is None:
        return None
    return {
        "accuracy": _pct(summary.accuracy),
        "micro_f1": _pct(summary.micro_f1),
        "macro_f1": _pct(summary.macro_f1),
        "total": summary.total,
        "zero_division": ["accuracy", "micro_f1", "macro_f1"] if summary.total == 0 else [],
        "per_class": {
            polarity.value: _prf_dict(score) for polarity, score in summary.per_class.items()
        },
    }


@dataclass(frozen=True)
class ComparisonEntry:
    model: str
    dataset: str
    task: str
    baseline: float
    measured: float
    delta: float
    verdict: str
    source: str


@dataclass(frozen=True)
class ComparisonResult:
    dataset: str
    tolerance: float
    entries: tuple[ComparisonEntry, ...]
    skipped: tuple[str, ...]

    @property
    def passed(self) -> bool:
        return all(entry.verdict != "below" for entry in self.entries)

    def to_json_dict(self) -> dict:
        return {
            "dataset": self.dataset,
            "tolerance": self.tolerance,
            "passed": self.passed,
            "entries": [
                {
                    "model": e.model,
                    "task": e.task,
                    "baseline": round(e.baseline, 2),
                    "measured": round(e.measured, 2),
                    "delta": round(e.delta, 2),
                    "verdict": e.verdict,
                    "source": e.source,
                }
                for e in self.entries
            ],
            "skipped": list(self.skipped),
        }


def compare_to_baseline(
    report,
    baselines: PublishedBaselines = PUBLISHED_BASELINES,
    tolerance_points: float = 1.5,
    dataset: str | None = None,
) -> ComparisonResult:
    """Delta (measured minus baseline, F1 points) and a verdict per
    baseline entry matching the report's dataset.

    ``report`` may be an :class:`EvalReport` or its parsed JSON document.
    Baselines whose measurement is absent from the report (for example
    ``asc_given_gold`` when that pass was not run) are listed as skipped.
    Raises :class:`UnknownDataset` when neither ``dataset`` nor the
    report's corpus name maps to a shipped baseline.
    """
    if tolerance_points < 0:
        raise ValueError("tolerance must be >= 0")
    doc = report.to_json_dict() if isinstance(report, EvalReport) else report
    dataset = canonical_dataset(dataset or doc["manifest"]["corpus_name"])

    entries = []
    skipped = []
    for baseline in baselines.for_dataset(dataset):
        measured = _measured_value(doc, baseline.model, baseline.task)
        if measured is None:
            skipped.append(f"{baseline.model}/{baseline.task}: no measurement in report")
            continue
        delta = measured - baseline.f1
        if delta < -tolerance_points:
            verdict = "below"
        elif delta > tolerance_points:
            verdict = "above"
        else:
            verdict = "within"
        entries.append(
            ComparisonEntry(
                model=baseline.model,
                dataset=dataset,
                task=baseline.task,
                baseline=baseline.f1,
                measured=measured,
                delta=delta,
                verdict=verdict,
                source=baseline.source,
            )
        )
    return ComparisonResult(
        dataset=dataset,
        tolerance=tolerance_points,
        entries=tuple(entries),
        skipped=tuple(skipped),
    )


def _measured_value(doc: dict, model: str, task: str) -> float | None:
    if task == "ate" and model == "instruct-deberta":
        return doc["ate"]["f1"]
    if task == "joint":
        return doc["joint"]["f1"]
    if task == "asc" and model == "instruct-deberta":
        pipelined = doc["asc"]["pipelined"]
        return None if pipelined is None else pipelined["micro_f1"]
    if task == "asc_given_gold":
        given_gold = doc["asc"]["given_gold"]
        return None if given_gold is None else given_gold["micro_f1"]
    return None


def emit(document, format: str) -> bytes:
    """Render a report or comparison as json, csv, or markdown bytes.

    Deterministic: identical documents produce byte-identical output.
    JSON round-trips; csv and markdown render numbers with 2 decimals.
    """
    doc = document.to_json_dict() if hasattr(document, "to_json_dict") else document
    if format == "json":
        return (json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False) + "\n").encode(
            "utf-8"
        )
    is_comparison = "entries" in doc
    if format == "csv":
        return _comparison_csv(doc) if is_comparison else _report_csv(doc)
    if format == "markdown":
        return _comparison_markdown(doc) if is_comparison else _report_markdown(doc)
    raise ValueError(f"unknown format {format!r} (expected json, csv, or markdown)")


def _report_rows(doc: dict):
    """(task, metric, value) triples in a fixed order."""
    for task in ("ate", "joint"):
        section = doc[task]
        for metric in ("precision", "recall", "f1"):
            yield task, metric, f"{section[metric]:.2f}"
        for metric in ("tp", "fp", "fn"):
            yield task, metric, str(section[metric])
    for key, task in (("given_gold", "asc_given_gold"), ("pipelined", "asc_pipelined")):
        section = doc["asc"][key]
        if section is None:
            continue
        for metric in ("accuracy", "micro_f1", "macro_f1"):
            yield task, metric, f"{section[metric]:.2f}"
        yield task, "total", str(section["total"])
        for polarity in ("positive", "negative", "neutral"):
            yield task, f"f1_{polarity}", f"{section['per_class'][polarity]['f1']:.2f}"


def _report_csv(doc: dict) -> bytes:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["dataset", "task", "metric", "value"])
    name = doc["manifest"]["corpus_name"]
    for task, metric, value in _report_rows(doc):
        writer.writerow([name, task, metric, value])
    return out.getvalue().encode("utf-8")


def _report_markdown(doc: dict) -> bytes:
    manifest = doc["manifest"]
    lines = [
        f"# Evaluation report: {manifest['corpus_name']}",
        "",
        f"- corpus sha256: `{manifest['corpus_sha256']}`",
        f"- backends: `{manifest['ate_backend']}` / `{manifest['asc_backend']}`",
        f"- conflict policy: {manifest['conflict_policy']}",
        "",
    ]
    sections = [("ATE", doc["ate"]), ("Joint (pair) task", doc["joint"])]
    for title, section in sections:
        lines += [f"## {title}", "", "| metric | value |", "| --- | --- |"]
        for metric in ("precision", "recall", "f1"):
            lines.append(f"| {metric} | {section[metric]:.2f} |")
        for metric in ("tp", "fp", "fn"):
            lines.append(f"| {metric} | {section[metric]} |")
        lines.append("")
    for title, key in (("ASC on gold aspects", "given_gold"), ("ASC pipelined", "pipelined")):
        section = doc["asc"][key]
        if section is None:
            continue
        lines += [f"## {title}", "", "| metric | value |", "| --- | --- |"]
        for metric in ("accuracy", "micro_f1", "macro_f1"):
            lines.append(f"| {metric} | {section[metric]:.2f} |")
        lines.append(f"| total | {section['total']} |")
        for polarity in ("positive", "negative", "neutral"):
            lines.append(f"| f1 {polarity} | {section['per_class'][polarity]['f1']:.2f} |")
        lines.append("")
    if doc["errors"]:
        lines += ["## Per-sentence errors", ""]
        for entry in doc["errors"]:
            missing = ", ".join(entry["missing"]) or "-"
            spurious = ", ".join(entry["spurious"]) or "-"
            lines.append(f"- `{entry['id']}`: missing [{missing}], spurious [{spurious}]")
        lines.append("")
    return "\n".join(lines).encode("utf-8")


def _comparison_csv(doc: dict) -> bytes:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["dataset", "task", "metric", "value"])
    for entry in doc["entries"]:
        task = f"{entry['model']}/{entry['task']}"
        writer.writerow([doc["dataset"], task, "baseline", f"{entry['baseline']:.2f}"])
        writer.writerow([doc["dataset"], task, "measured", f"{entry['measured']:.2f}"])
        writer.writerow([doc["dataset"], task, "delta", f"{entry['delta']:.2f}"])
        writer.writerow([doc["dataset"], task, "verdict", entry["verdict"]])
    return out.getvalue().encode("utf-8")


def _comparison_markdown(doc: dict) -> bytes:
    lines = [
        f"# Baseline comparison: {doc['dataset']} (tolerance {doc['tolerance']:.2f} points)",
        "",
        "| model | task | baseline | measured | delta | verdict |",
        "| --- | --- | --- | --- | --- | --- |",
    ]
    for entry in doc["entries"]:
        lines.append(
            f"| {entry['model']} | {entry['task']} | {entry['baseline']:.2f}"
            f" | {entry['measured']:.2f} | {entry['delta']:+.2f} | {entry['verdict']} |"
        )
    lines.append("")
    if doc["skipped"]:
        lines.append("Skipped (no measurement in report):")
        for item in doc["skipped"]:
            lines.append(f"- {item}")
        lines.append("")
    lines.append("overall: " + ("PASS" if doc["passed"] else "FAIL"))
    lines.append("")
    return "\n".join(lines).encode("utf-8")
