"""Request/response models for the collection endpoint."""
from __future__ import annotations

from pydantic import BaseModel, Field

SCHEMA_VERSION = "1"


class CollectPayload(BaseModel):
    schema_version: str = SCHEMA_VERSION
    device_type: str
    os: str
    agent: str
    channel: str
    ad_id: str | None = None
    dnt: bool = False
    attributes: dict[str, str | None]
    collection_ms: int = Field(default=0, ge=0)


class CollectResponse(BaseModel):
    status: str  # "stored" | "filtered" | "rejected"
    reason: str | None = None
    sample_id: str | None = None


class HealthResponse(BaseModel):
    status: str = "ok"


class StatsResponse(BaseModel):
    received: int
    stored: int
    filtered: int
    rejected: int
    reasons: dict[str, int]
