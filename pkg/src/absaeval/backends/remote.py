"""Batching HTTP client for the inference service wire protocol.

Endpoints: ``POST /v1/ate``, ``POST /v1/asc``, ``GET /v1/health``. Items
are chunked to the configured batch size, sent with bounded concurrency,
and reassembled in input order. Timeouts, connection failures, and 5xx
answers are retried with exponential backoff; 4xx and malformed bodies are
protocol errors and never retried.
"""

from __future__ import annotations

import contextlib
import logging
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import requests

from ..corpus import PIPELINE_POLARITIES, Polarity
from ..errors import BackendUnavailable, ProtocolError
from ..pipeline import CandidateAspects

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RemoteEndpointConfig:
    base_url: str
    timeout_ms: int = 30_000
    max_retries: int = 3
    backoff_ms: int = 250
    max_batch: int = 16
    max_in_flight: int = 4

    def __post_init__(self):
        for name in ("timeout_ms", "max_retries", "backoff_ms", "max_batch", "max_in_flight"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")


def _request(cfg: RemoteEndpointConfig, method: str, path: str, payload=None, semaphore=None):
    url = cfg.base_url.rstrip("/") + path
    timeout = cfg.timeout_ms / 1000.0
    guard = semaphore if semaphore is not None else contextlib.nullcontext()
    last_error: object = None
    for attempt in range(cfg.max_retries + 1):
        if attempt:
            delay = cfg.backoff_ms / 1000.0 * 2 ** (attempt - 1)
            logger.debug("retry %d for %s after %.3fs (%s)", attempt, url, delay, last_error)
            time.sleep(delay)
        try:
            with guard:
                response = requests.request(method, url, json=payload, timeout=timeout)
        except (requests.Timeout, requests.ConnectionError) as err:
            last_error = err
            continue
        if response.status_code >= 500:
            last_error = f"HTTP {response.status_code}: {response.text[:200]}"
            continue
        if response.status_code != 200:
            raise ProtocolError(f"{url} answered {response.status_code}: {response.text[:200]}")
        try:
            return response.json()
        except ValueError:
            raise ProtocolError(f"{url} returned a non-JSON body: {response.text[:200]}") from None
    raise BackendUnavailable(
        f"{url} unavailable after {cfg.max_retries + 1} attempts (last error: {last_error})"
    )


def _chunk(items: list, size: int) -> list[list]:
    return [items[i : i + size] for i in range(0, len(items), size)]


def _run_batches(cfg: RemoteEndpointConfig, batches: list, fetch) -> list:
    if len(batches) <= 1:
        return [fetch(batch) for batch in batches]
    workers = min(cfg.max_in_flight, len(batches))
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fetch, batches))


def remote_ate(
    cfg: RemoteEndpointConfig,
    items: Sequence[tuple[str, str]],
    *,
    semaphore: threading.BoundedSemaphore | None = None,
) -> list[tuple[str, list[str]]]:
    """Extract terms for ``items`` of (id, text); order and multiplicity
    of the input are preserved in the output."""

    def fetch(batch):
        payload = {"items": [{"id": item_id, "text": text} for item_id, text in batch]}
        body = _request(cfg, "POST", "/v1/ate", payload, semaphore)
        results = _results_array(body, len(batch), "/v1/ate")
        out = []
        for (item_id, _), result in zip(batch, results):
            if not isinstance(result, dict) or result.get("id") != item_id:
                raise ProtocolError(f"/v1/ate results do not echo request ids in order")
            terms = result.get("terms")
            if not isinstance(terms, list) or any(not isinstance(t, str) for t in terms):
                raise ProtocolError(f"/v1/ate result for {item_id!r} has bad terms")
            out.append((item_id, list(terms)))
        return out

    chunks = _run_batches(cfg, _chunk(list(items), cfg.max_batch), fetch)
    return [pair for chunk in chunks for pair in chunk]


def remote_asc(
    cfg: RemoteEndpointConfig,
    items: Sequence[tuple[str, str, str]],
    *,
    semaphore: threading.BoundedSemaphore | None = None,
) -> list[tuple[str, str, Polarity, dict[Polarity, float]]]:
    """Classify ``items`` of (id, text, term) with the same ordering
    guarantees as :func:`remote_ate`."""

    def fetch(batch):
        payload = {
            "items": [
                {"id": item_id, "text": text, "term": term} for item_id, text, term in batch
            ]
        }
        body = _request(cfg, "POST", "/v1/asc", payload, semaphore)
        results = _results_array(body, len(batch), "/v1/asc")
        out = []
        for (item_id, _, term), result in zip(batch, results):
            if (
                not isinstance(result, dict)
                or result.get("id") != item_id
                or result.get("term") != term
            ):
                raise ProtocolError("/v1/asc results do not echo request items in order")
            out.append((item_id, term) + _parse_classification(result))
        return out

    chunks = _run_batches(cfg, _chunk(list(items), cfg.max_batch), fetch)
    return [row for chunk in chunks for row in chunk]


def _results_array(body, expected: int, endpoint: str) -> list:
    results = body.get("results") if isinstance(body, dict) else None
    if not isinstance(results, list) or len(results) != expected:
        raise ProtocolError(f"{endpoint} answered without a results array of length {expected}")
    return results


def _parse_classification(result: dict) -> tuple[Polarity, dict[Polarity, float]]:
    try:
        polarity = Polarity(result.get("polarity"))
    except ValueError:
        raise ProtocolError(f"unknown polarity {result.get('polarity')!r}") from None
    if polarity not in PIPELINE_POLARITIES:
        raise ProtocolError(f"service emitted {polarity.value!r}")
    raw_scores = result.get("scores")
    if not isinstance(raw_scores, dict):
        raise ProtocolError("classification result has no scores object")
    try:
        scores = {Polarity(label): float(value) for label, value in raw_scores.items()}
    except (ValueError, TypeError):
        raise ProtocolError(f"bad scores object {raw_scores!r}") from None
    return polarity, scores


def fetch_health(cfg: RemoteEndpointConfig) -> dict:
    """Health probe; retries through the service's loading phase."""
    body = _request(cfg, "GET", "/v1/health")
    if not isinstance(body, dict):
        raise ProtocolError("/v1/health body is not an object")
    return body


class _RemoteBase:
    single_flight = False

    def __init__(self, cfg: RemoteEndpointConfig):
        self.cfg = cfg
        self._semaphore = threading.BoundedSemaphore(cfg.max_in_flight)
        self._health: dict | None = None
        self._health_lock = threading.Lock()

    def health(self) -> dict:
        with self._health_lock:
            if self._health is None:
                self._health = fetch_health(self.cfg)
            return self._health

    @property
    def service_version(self) -> str:
        return str(self.health().get("service_version", "unknown"))


class RemoteAteBackend(_RemoteBase):
    def __init__(self, cfg: RemoteEndpointConfig):
        super().__init__(cfg)
        self.id = f"remote-ate:{cfg.base_url}"

    def extract(self, text: str) -> CandidateAspects:
        self.health()
        ((_, terms),) = remote_ate(self.cfg, [("0", text)], semaphore=self._semaphore)
        return CandidateAspects(tuple(terms))


class RemoteAscBackend(_RemoteBase):
    def __init__(self, cfg: RemoteEndpointConfig):
        super().__init__(cfg)
        self.id = f"remote-asc:{cfg.base_url}"

    def classify(self, text: str, term: str):
        self.health()
        ((_, _, polarity, scores),) = remote_asc(
            self.cfg, [("0", text, term)], semaphore=self._semaphore
        )
        return polarity, scores
