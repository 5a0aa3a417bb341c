"""Backend contracts for the two pluggable model stages.

A backend is any object with an ``id``, a ``single_flight`` flag (the
harness serializes calls to backends that declare it), and the one
operation for its stage. Deterministic backends must return identical
output for identical input.
"""

from __future__ import annotations

from typing import Protocol, runtime_checkable

from ..corpus import Polarity
from ..pipeline import CandidateAspects


@runtime_checkable
class AteBackend(Protocol):
    id: str
    single_flight: bool

    def extract(self, text: str) -> CandidateAspects: ...


@runtime_checkable
class AscBackend(Protocol):
    id: str
    single_flight: bool

    def classify(self, text: str, term: str) -> tuple[Polarity, dict[Polarity, float] | None]: ...
