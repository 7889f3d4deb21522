"""HTTP/JSON prediction and dataset API.

Handlers are stateless over an immutable snapshot (solved tablebase, loaded
dataset, model registry), so identical requests get identical responses.
Every prediction response carries the exact oracle label next to the model
output; disagreement is data, not an error.  Errors are JSON
``{"code": ..., "message": ...}`` with a matching HTTP status.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from .artifacts import ModelArtifact, load_model
from .board import IllegalPositionError, Position, Side, Square, canonicalize, validate_position
from .dataset import CLASS_LABELS, Record, statistics
from .tablebase import Tablebase, classify


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message


def _parse_square(name: str, text) -> Square:
    if not isinstance(text, str):
        raise ApiError(400, "bad_square", f"{name}: expected square notation like 'a1'")
    try:
        return Square.from_text(text.strip().lower())
    except ValueError as exc:
        raise ApiError(400, "bad_square", f"{name}: {exc}") from exc


def _parse_position(wk, wr, bk) -> Position:
    squares = (_parse_square("wk", wk), _parse_square("wr", wr), _parse_square("bk", bk))
    reason = validate_position(*squares, Side.BLACK)
    if reason is not None:
        raise ApiError(400, "illegal_position", reason)
    return Position(*squares, Side.BLACK)


@dataclass(frozen=True)
class ServiceState:
    tablebase: Tablebase
    records: list[Record]
    registry: dict[str, ModelArtifact]


def load_registry(models_dir: str | Path | None) -> dict[str, ModelArtifact]:
    registry = {}
    if models_dir is not None and Path(models_dir).is_dir():
        for path in sorted(Path(models_dir).glob("*.model.json")):
            registry[path.name.removesuffix(".model.json")] = load_model(path)
    return registry


def create_app(tablebase: Tablebase, records: list[Record],
               registry: dict[str, ModelArtifact] | None = None,
               ui_dir: str | Path | None = None) -> FastAPI:
    state = ServiceState(tablebase, records, registry or {})
    app = FastAPI(title="KRK endgame service", docs_url=None, redoc_url=None)

    @app.exception_handler(ApiError)
    async def on_api_error(_req: Request, exc: ApiError):
        return JSONResponse(status_code=exc.status,
                            content={"code": exc.code, "message": exc.message})

    @app.get("/api/health")
    def health():
        return {"status": "ok", "models": len(state.registry),
                "dataset_records": len(state.records)}

    @app.get("/api/models")
    def models():
        out = []
        for model_id, artifact in state.registry.items():
            entry = {
                "id": model_id,
                "kind": artifact.model.kind,
                "encoding": artifact.model.encoding_fingerprint,
            }
            result = artifact.manifest.get("result") or {}
            if "overall_accuracy" in result:
                entry["overall_accuracy"] = result["overall_accuracy"]
                entry["average_accuracy"] = result.get("average_accuracy")
            out.append(entry)
        return {"models": out}

    @app.get("/api/dataset/stats")
    def dataset_stats():
        rows = [
            {"label": label, "count": count, "percent": round(pct, 2)}
            for label, count, pct in statistics(state.records)
        ]
        return {"total": len(state.records), "classes": rows}

    @app.get("/api/dataset/samples")
    def dataset_samples(offset: int = 0, limit: int = 50):
        if offset < 0 or limit < 1:
            raise ApiError(400, "bad_range", "offset must be >= 0 and limit >= 1")
        window = state.records[offset:offset + min(limit, 1000)]
        samples = [
            {
                "index": offset + i,
                "wk": f"{r.wk_file}{r.wk_rank}",
                "wr": f"{r.wr_file}{r.wr_rank}",
                "bk": f"{r.bk_file}{r.bk_rank}",
                "label": r.label,
            }
            for i, r in enumerate(window)
        ]
        return {"total": len(state.records), "offset": offset,
                "limit": limit, "samples": samples}

    @app.get("/api/oracle/classify")
    def oracle_classify(wk: str, wr: str, bk: str):
        position = _parse_position(wk, wr, bk)
        rep, _ = canonicalize(position)
        return {
            "label": classify(state.tablebase, position),
            "canonical": {"wk": str(rep.wk), "wr": str(rep.wr), "bk": str(rep.bk)},
        }

    @app.post("/api/predict")
    async def predict(request: Request):
        try:
            body = await request.json()
        except json.JSONDecodeError as exc:
            raise ApiError(400, "bad_json", f"request body is not JSON: {exc}")
        if not isinstance(body, dict):
            raise ApiError(400, "bad_json", "request body must be a JSON object")
        model_id = body.get("model_id")
        if model_id not in state.registry:
            raise ApiError(404, "unknown_model", f"no model with id {model_id!r}")
        artifact = state.registry[model_id]
        if artifact.fitted_encoding is None:
            raise ApiError(500, "missing_encoding",
                           f"model {model_id!r} was saved without its feature encoding")
        position = _parse_position(body.get("wk"), body.get("wr"), body.get("bk"))
        rep, _ = canonicalize(position)  # models are trained on representatives
        record = Record.from_position(rep, "draw")  # placeholder label, not encoded
        features = artifact.fitted_encoding.transform([record])
        label, scores = artifact.model.predict(features[0])
        oracle_label = classify(state.tablebase, position)
        return {
            "model_id": model_id,
            "predicted_class": label,
            "scores": {name: float(s) for name, s in zip(CLASS_LABELS, scores)},
            "oracle_class": oracle_label,
            "agree": label == oracle_label,
        }

    if ui_dir is not None and Path(ui_dir).is_dir():
        app.mount("/ui", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app


def serve(app: FastAPI, host: str = "127.0.0.1", port: int = 8000):
    import uvicorn

    uvicorn.run(app, host=host, port=port, log_level="info")
