"""HTTP ingestion service for collector payloads.

POST /v1/collect validates a payload, applies the ethics filters (do-not-track
drop, incomplete drop) and appends accepted samples to durable JSONL storage.
Filtering reasons and counters are exposed so stored + filtered + rejected
always equals the number of requests received.
"""
from __future__ import annotations

import json
import os
import threading
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import FastAPI, Request, Response
from fastapi.responses import JSONResponse, StreamingResponse
from pydantic import ValidationError

from ..errors import DataError, StorageError
from ..registry import AttributeRegistry, load_registry, scoped_attributes
from .schemas import SCHEMA_VERSION, CollectPayload, CollectResponse, HealthResponse, StatsResponse
from .storage import SampleStore

DEFAULT_MAX_PAYLOAD_BYTES = 64 * 1024


@dataclass
class ServiceConfig:
    listen: str = "127.0.0.1:8300"
    storage_dir: str = "./collected"
    registry: str = "adf-v1"
    max_payload_bytes: int = DEFAULT_MAX_PAYLOAD_BYTES

    @classmethod
    def load(cls, config_path: str | Path | None = None) -> "ServiceConfig":
        """Config file values, overridden by ADFKIT_* environment variables."""
        cfg = cls()
        if config_path is not None:
            doc = json.loads(Path(config_path).read_text(encoding="utf-8"))
            for key in ("listen", "storage_dir", "registry"):
                if key in doc:
                    setattr(cfg, key, str(doc[key]))
            if "max_payload_bytes" in doc:
                cfg.max_payload_bytes = int(doc["max_payload_bytes"])
        env = os.environ
        cfg.listen = env.get("ADFKIT_LISTEN", cfg.listen)
        cfg.storage_dir = env.get("ADFKIT_STORAGE_DIR", cfg.storage_dir)
        cfg.registry = env.get("ADFKIT_REGISTRY", cfg.registry)
        if "ADFKIT_MAX_PAYLOAD_BYTES" in env:
            cfg.max_payload_bytes = int(env["ADFKIT_MAX_PAYLOAD_BYTES"])
        return cfg


@dataclass
class Counters:
    received: int = 0
    stored: int = 0
    filtered: int = 0
    rejected: int = 0
    reasons: dict[str, int] = field(default_factory=dict)
    _lock: threading.Lock = field(default_factory=threading.Lock)

    def bump(self, outcome: str, reason: str | None = None) -> None:
        with self._lock:
            self.received += 1
            setattr(self, outcome, getattr(self, outcome) + 1)
            if reason:
                self.reasons[reason] = self.reasons.get(reason, 0) + 1


def create_app(config: ServiceConfig | None = None, registry: AttributeRegistry | None = None) -> FastAPI:
    config = config or ServiceConfig()
    reg = registry or load_registry(config.registry)
    store = SampleStore(config.storage_dir)
    counters = Counters()
    scoped = {channel: scoped_attributes(reg, channel) for channel in ("web", "app")}
    known_names = {channel: set(names) for channel, names in scoped.items()}

    app = FastAPI(title="adfkit collect service")
    app.state.store = store
    app.state.counters = counters
    app.state.config = config

    def _reject(reason: str, status_code: int = 400) -> JSONResponse:
        counters.bump("rejected", reason)
        return JSONResponse(
            status_code=status_code,
            content=CollectResponse(status="rejected", reason=reason).model_dump(),
        )

    @app.post("/v1/collect", response_model=CollectResponse)
    async def collect(request: Request) -> Response:
        body = await request.body()
        if len(body) > config.max_payload_bytes:
            return _reject("oversize", status_code=413)
        try:
            doc = json.loads(body)
        except (UnicodeDecodeError, json.JSONDecodeError):
            return _reject("malformed")
        try:
            payload = CollectPayload.model_validate(doc)
        except ValidationError:
            return _reject("schema")
        if payload.schema_version != SCHEMA_VERSION:
            return _reject("schema-version")
        if payload.channel not in known_names:
            return _reject("schema")
        if payload.channel == "app" and (
            payload.device_type != "mobile"
            or payload.os not in ("Android", "iOS")
            or payload.agent != "webview"
        ):
            return _reject("schema")
        unknown = set(payload.attributes) - known_names[payload.channel]
        if unknown:
            return _reject("unknown-attribute")

        if payload.dnt:
            # Ethics filter: nothing from do-not-track devices is persisted.
            counters.bump("filtered", "dnt")
            return JSONResponse(
                content=CollectResponse(status="filtered", reason="dnt").model_dump()
            )
        missing = [n for n in scoped[payload.channel] if n not in payload.attributes]
        if missing:
            # An absent key means the collector was cut off; an explicit null
            # is a legitimate "interface unsupported" and counts as present.
            counters.bump("filtered", "incomplete")
            return JSONResponse(
                content=CollectResponse(status="filtered", reason="incomplete").model_dump()
            )

        row = {
            "ad_id": payload.ad_id,
            "device_type": payload.device_type,
            "os": payload.os,
            "agent": payload.agent,
            "channel": payload.channel,
            "dnt": payload.dnt,
            "attributes": payload.attributes,
        }
        try:
            sample_id = store.append(row)
        except StorageError:
            # Not acknowledged; the client may retry.
            counters.bump("rejected", "storage")
            return JSONResponse(
                status_code=503,
                content=CollectResponse(status="rejected", reason="storage").model_dump(),
            )
        counters.bump("stored")
        return JSONResponse(
            content=CollectResponse(status="stored", sample_id=sample_id).model_dump()
        )

    @app.get("/v1/healthz", response_model=HealthResponse)
    def healthz() -> HealthResponse:
        return HealthResponse()

    @app.get("/v1/stats", response_model=StatsResponse)
    def stats() -> StatsResponse:
        return StatsResponse(
            received=counters.received,
            stored=counters.stored,
            filtered=counters.filtered,
            rejected=counters.rejected,
            reasons=dict(counters.reasons),
        )

    @app.get("/v1/export")
    def export(ts_from: int | None = None, ts_to: int | None = None) -> Response:
        try:
            data = store.export_jsonl(ts_from, ts_to)
        except StorageError as exc:
            raise DataError(str(exc)) from exc
        return StreamingResponse(iter([data]), media_type="application/jsonl")

    return app
