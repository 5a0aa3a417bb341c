"""FastAPI application exposing the wire protocol.

Endpoints answer 503 with ``{"error": ...}`` until the model bundle has
loaded, 400 for anything outside the protocol (schema violations,
oversize batches, empty text or term), and otherwise echo request ids in
request order. Identical request bodies produce identical response bodies
within a process lifetime: decoding is greedy, the prompt is fixed, and
the health document is built once at load time.
"""

from __future__ import annotations

import logging
import threading
from contextlib import asynccontextmanager
from typing import Callable

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse

from . import __version__
from .models import ModelBundle, load_stub_bundle
from .wire import (
    AscRequest,
    AscResponse,
    AteRequest,
    AteResponse,
    DecodingInfo,
    HealthInfo,
    ModelInfo,
)

logger = logging.getLogger(__name__)

DEFAULT_MAX_BATCH = 32


def _error(status: int, message: str) -> JSONResponse:
    return JSONResponse(status_code=status, content={"error": message})


def create_app(
    bundle_factory: Callable[[], ModelBundle] = load_stub_bundle,
    max_batch: int = DEFAULT_MAX_BATCH,
) -> FastAPI:
    """Build the service; the bundle loads on a background thread so the
    process can answer (503) from the first moment it is up."""

    state: dict = {"bundle": None, "health": None}
    loaded = threading.Event()

    def load() -> None:
        try:
            bundle = bundle_factory()
        except Exception:
            logger.exception("model load failed")
            return
        state["health"] = HealthInfo(
            ate_model=ModelInfo(id=bundle.ate.model_id, revision=bundle.ate.revision),
            asc_model=ModelInfo(id=bundle.asc.model_id, revision=bundle.asc.revision),
            decoding=DecodingInfo(
                max_output_length=bundle.max_output_length,
                strategy="greedy",
                prompt_template_sha256=bundle.prompt_sha256,
            ),
            service_version=__version__,
            max_batch=max_batch,
        ).model_dump()
        state["bundle"] = bundle
        loaded.set()

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        threading.Thread(target=load, daemon=True).start()
        yield

    app = FastAPI(title="absa-inference-service", version=__version__, lifespan=lifespan)

    @app.exception_handler(RequestValidationError)
    async def on_validation_error(request: Request, exc: RequestValidationError):
        first = exc.errors()[0] if exc.errors() else {}
        location = ".".join(str(part) for part in first.get("loc", ()))
        return _error(400, f"schema violation at {location}: {first.get('msg', 'invalid')}")

    def bundle_or_none() -> ModelBundle | None:
        return state["bundle"]

    def batch_problem(items) -> JSONResponse | None:
        if len(items) > max_batch:
            return _error(400, f"batch of {len(items)} exceeds the maximum of {max_batch}")
        return None

    @app.post("/v1/ate")
    def serve_ate(request: AteRequest):
        bundle = bundle_or_none()
        if bundle is None:
            return _error(503, "models are loading")
        problem = batch_problem(request.items)
        if problem is not None:
            return problem
        if any(not item.text for item in request.items):
            return _error(400, "every item needs non-empty text")
        results = [
            {"id": item.id, "terms": bundle.extract_terms(item.text)}
            for item in request.items
        ]
        return AteResponse(results=results)

    @app.post("/v1/asc")
    def serve_asc(request: AscRequest):
        bundle = bundle_or_none()
        if bundle is None:
            return _error(503, "models are loading")
        problem = batch_problem(request.items)
        if problem is not None:
            return problem
        if any(not item.text or not item.term for item in request.items):
            return _error(400, "every item needs non-empty text and term")
        results = []
        for item in request.items:
            polarity, scores = bundle.classify(item.text, item.term)
            results.append(
                {"id": item.id, "term": item.term, "polarity": polarity, "scores": scores}
            )
        return AscResponse(results=results)

    @app.get("/v1/health")
    def serve_health():
        if state["health"] is None:
            return _error(503, "models are loading")
        return JSONResponse(status_code=200, content=state["health"])

    app.state.wait_until_loaded = loaded.wait
    return app
