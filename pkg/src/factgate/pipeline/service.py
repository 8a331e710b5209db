"""HTTP verification service.

POST /verify      {"text": ..., "context"?: ..., "intrinsic_confidences"?: {...}}
GET  /health      overall + per-source status
GET  /config      sanitized active configuration
POST /admin/reload  re-read the config file and swap the pipeline

Bodies are parsed manually so malformed JSON returns a 400 error envelope,
and responses serialize through the stable encoder so fixed fixtures yield
byte-identical output.
"""

from __future__ import annotations

import logging
from pathlib import Path

from fastapi import FastAPI, Request, Response

from factgate.pipeline.config import ConfigInvalid
from factgate.pipeline.jsonio import stable_dumps
from factgate.pipeline.orchestrator import Pipeline, PipelineHolder

log = logging.getLogger(__name__)


def _json_response(payload: dict, status_code: int = 200) -> Response:
    return Response(
        content=stable_dumps(payload), status_code=status_code, media_type="application/json"
    )


def _error(message: str, status_code: int = 400) -> Response:
    return _json_response({"error": message}, status_code)


def create_app(pipeline: Pipeline | str | Path) -> FastAPI:
    if not isinstance(pipeline, Pipeline):
        pipeline = Pipeline.from_config_file(pipeline)
    holder = PipelineHolder(pipeline)
    app = FastAPI(title="factgate", docs_url=None, redoc_url=None)
    app.state.holder = holder

    @app.post("/verify")
    async def verify(request: Request) -> Response:
        try:
            body = await request.json()
        except Exception:
            return _error("request body is not valid JSON")
        if not isinstance(body, dict):
            return _error("request body must be a JSON object")
        text = body.get("text")
        if not isinstance(text, str):
            return _error("field 'text' is required and must be a string")
        options = {
            "context": body.get("context"),
            "intrinsic_confidences": body.get("intrinsic_confidences"),
        }
        active = holder.pipeline
        result = active.verify(text, options)
        return _json_response(result.to_dict(deterministic=active.config.deterministic_output))

    @app.get("/health")
    async def health() -> Response:
        active = holder.pipeline
        statuses = active.source_health()
        sources = [
            {"id": source_id, "status": "ok" if ok else "down"}
            for source_id, ok in sorted(statuses.items())
        ]
        degraded = sorted(source_id for source_id, ok in statuses.items() if not ok)
        return _json_response(
            {
                "status": "ok" if not degraded else "degraded",
                "sources": sources,
                "degraded_sources": degraded,
            }
        )

    @app.get("/config")
    async def config() -> Response:
        return _json_response(holder.pipeline.config.to_public_dict())

    @app.post("/admin/reload")
    async def reload() -> Response:
        try:
            fresh = holder.reload()
        except (ConfigInvalid, ValueError, OSError) as exc:
            return _error(f"reload failed: {exc}")
        log.info("configuration reloaded from %s", fresh.config.config_path)
        return _json_response({"status": "reloaded"})

    return app


def serve(config_path: str | Path, bind: str | None = None) -> None:
    """Run the service under uvicorn; blocks until shutdown."""
    import uvicorn

    pipeline = Pipeline.from_config_file(config_path)
    app = create_app(pipeline)
    address = bind or pipeline.config.bind
    host, _, port = address.rpartition(":")
    uvicorn.run(app, host=host or "127.0.0.1", port=int(port), log_level="info")
