"""Published F1 baselines the harness compares its measurements against.

Read-only reference constants. Each entry names the model, the dataset,
the task, the published F1 percentage, and which results table it came
from. ``asc`` entries for the hybrid pipeline are its pipelined sentiment
scores; ``asc_given_gold`` entries are the classifier measured on gold
aspect terms, independent of extraction.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

from .errors import UnknownDataset

DATASETS = ("res-14", "lap-14", "res-15", "res-16")

_PIPELINE_TABLE = "per-task F1 table, selected models individually and pipelined"
_JOINT_TABLE = "joint-task F1 table"
_JOINT_TEXT = "reported pair-extraction F1"
_SURVEY_TABLE = "single-task survey table (ASC column, measured on gold aspects)"


@dataclass(frozen=True)
class BaselineEntry:
    model: str
    dataset: str
    task: str
    f1: float
    source: str


@dataclass(frozen=True)
class PublishedBaselines:
    entries: tuple[BaselineEntry, ...]

    def for_dataset(self, dataset: str) -> list[BaselineEntry]:
        dataset = canonical_dataset(dataset)
        return [entry for entry in self.entries if entry.dataset == dataset]

    def get(self, model: str, dataset: str, task: str) -> BaselineEntry:
        dataset = canonical_dataset(dataset)
        for entry in self.entries:
            if (entry.model, entry.dataset, entry.task) == (model, dataset, task):
                return entry
        raise KeyError((model, dataset, task))

    def checksum(self) -> str:
        payload = "\n".join(
            f"{e.model}|{e.dataset}|{e.task}|{e.f1:.2f}|{e.source}" for e in self.entries
        )
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()


PUBLISHED_BASELINES = PublishedBaselines(
    entries=(
        BaselineEntry("instruct-deberta", "res-14", "ate", 91.39, _PIPELINE_TABLE),
        BaselineEntry("instruct-deberta", "res-14", "asc", 88.63, _PIPELINE_TABLE),
        BaselineEntry("instruct-deberta", "lap-14", "ate", 91.56, _PIPELINE_TABLE),
        BaselineEntry("instruct-deberta", "lap-14", "asc", 89.65, _PIPELINE_TABLE),
        BaselineEntry("instruct-deberta", "res-15", "ate", 75.13, _PIPELINE_TABLE),
        BaselineEntry("instruct-deberta", "res-15", "asc", 81.26, _PIPELINE_TABLE),
        BaselineEntry("instruct-deberta", "res-16", "ate", 77.79, _PIPELINE_TABLE),
        BaselineEntry("instruct-deberta", "res-16", "asc", 79.35, _PIPELINE_TABLE),
        BaselineEntry("instruct-deberta", "res-14", "joint", 80.78, _JOINT_TEXT),
        BaselineEntry("instruct-deberta", "lap-14", "joint", 80.94, _JOINT_TEXT),
        BaselineEntry("instructabsa", "res-14", "joint", 79.47, _JOINT_TABLE),
        BaselineEntry("instructabsa", "lap-14", "joint", 79.34, _JOINT_TABLE),
        BaselineEntry("grace", "res-14", "joint", 77.26, _JOINT_TABLE),
        BaselineEntry("grace", "lap-14", "joint", 70.71, _JOINT_TABLE),
        BaselineEntry("deberta-v3-base-absa-v1", "res-14", "asc_given_gold", 90.94, _SURVEY_TABLE),
        BaselineEntry("deberta-v3-base-absa-v1", "lap-14", "asc_given_gold", 90.32, _SURVEY_TABLE),
        BaselineEntry("deberta-v3-base-absa-v1", "res-15", "asc_given_gold", 89.55, _SURVEY_TABLE),
    )
)


def canonical_dataset(name: str) -> str:
    """Map a corpus or file name onto one of the known dataset keys.

    Accepts the canonical keys themselves plus obvious spellings such as
    ``Restaurants_Test_2014`` or ``laptop14``. Raises
    :class:`UnknownDataset` when nothing matches.
    """
    squashed = "".join(ch for ch in name.lower() if ch.isalnum())
    if "lap" in squashed and ("14" in squashed or "2014" in squashed):
        return "lap-14"
    if "res" in squashed or "rest" in squashed:
        for year, key in (("15", "res-15"), ("16", "res-16"), ("14", "res-14")):
            if year in squashed or f"20{year}" in squashed:
                return key
    raise UnknownDataset(f"{name!r} maps to none of {DATASETS}")
