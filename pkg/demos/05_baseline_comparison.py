"""Reports and baseline comparison: from scores to emitted documents.

Run with: python demos/05_baseline_comparison.py
"""

from absaeval import (
    FilterConfig,
    MatchCounts,
    NormConfig,
    PUBLISHED_BASELINES,
    RunManifest,
    build_report,
    compare_to_baseline,
    emit,
    prf,
)

# ---------------------------------------------------------------------------
# 1. The shipped baseline table: published F1 percentages keyed by
#    (model, dataset, task), each entry naming its source table.

for entry in PUBLISHED_BASELINES.for_dataset("res-14"):
    print(f"{entry.model:<24} {entry.task:<15} {entry.f1:6.2f}  [{entry.source}]")

# ---------------------------------------------------------------------------
# 2. Assemble a report as cmd_run would. Counts chosen so the joint score
#    lands near the published pipeline numbers.

manifest = RunManifest(
    timestamp="2026-01-01T00:00:00+00:00",
    corpus_name="res-14",
    corpus_sha256="0" * 64,
    ate_backend="demo-ate",
    asc_backend="demo-asc",
    service_version="n/a",
    filter_cfg=FilterConfig(),
    norm_cfg=NormConfig(),
    conflict_policy="drop",
    parallelism=1,
    tool_version="0.1.0",
)
report = build_report(
    manifest=manifest,
    ate=prf(MatchCounts(tp=1030, fp=97, fn=97)),    # f1 ~ 91.4
    joint=prf(MatchCounts(tp=910, fp=217, fn=217)), # f1 ~ 80.7
)

print("\nreport as markdown:\n")
print(emit(report, "markdown").decode("utf-8"))

# ---------------------------------------------------------------------------
# 3. Compare against the shipped numbers at the default 1.5-point
#    tolerance; verdicts are within / below / above per entry.

comparison = compare_to_baseline(report, PUBLISHED_BASELINES, tolerance_points=1.5)
print(emit(comparison, "markdown").decode("utf-8"))
print("csv form:\n")
print(emit(comparison, "csv").decode("utf-8"))
