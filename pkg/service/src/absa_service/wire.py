"""Pydantic models for the wire protocol."""

from __future__ import annotations

from pydantic import BaseModel, Field


class AteItem(BaseModel):
    id: str
    text: str


class AteRequest(BaseModel):
    items: list[AteItem]


class AteResult(BaseModel):
    id: str
    terms: list[str]


class AteResponse(BaseModel):
    results: list[AteResult]


class AscItem(BaseModel):
    id: str
    text: str
    term: str


class AscRequest(BaseModel):
    items: list[AscItem]


class AscResult(BaseModel):
    id: str
    term: str
    polarity: str
    scores: dict[str, float]


class AscResponse(BaseModel):
    results: list[AscResult]


class ModelInfo(BaseModel):
    id: str
    revision: str


class DecodingInfo(BaseModel):
    max_output_length: int
    strategy: str = "greedy"
    prompt_template_sha256: str


class HealthInfo(BaseModel):
    ate_model: ModelInfo
    asc_model: ModelInfo
    decoding: DecodingInfo
    service_version: str
    max_batch: int = Field(description="largest accepted items array")
