"""Stateless HTTP scoring service over one saved rating model.

Request handling shares a single immutable model; reload (POST /v1/reload or
SIGHUP in the CLI server) swaps in a freshly loaded model atomically, so any
request sees either the old or the new model, never a mixture. Error policy:
malformed bodies and unknown feature names are 400 (the offending name is in
the detail), values that do not fit the schema are 422.
"""
from __future__ import annotations

import json
import logging
import signal
import threading

import numpy as np
from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .data import DataError, features_from_mapping
from .ordinal import ModelError, RatingModel
from .schema import KIND_BINARY, SchemaError
from .shapley import compute_explanation
from .suggest import compute_suggestions

log = logging.getLogger("vrstars.service")


class ApiError(Exception):
    """Maps straight to an HTTP status + detail message."""

    def __init__(self, status: int, detail: str):
        super().__init__(detail)
        self.status = status
        self.detail = detail


async def _parse_body(request: Request) -> dict:
    raw = await request.body()
    try:
        body = json.loads(raw)
    except json.JSONDecodeError:
        raise ApiError(400, "malformed JSON body")
    if not isinstance(body, dict):
        raise ApiError(400, "request body must be a JSON object")
    return body


def _features_field(body: dict) -> dict:
    features = body.get("features")
    if not isinstance(features, dict):
        raise ApiError(400, "missing or non-object 'features' field")
    return features


def _vector(model: RatingModel, features: dict) -> np.ndarray:
    schema = model.schema
    for name in features:
        if not isinstance(name, str) or name not in schema:
            raise ApiError(400, f"unknown feature name: {name!r}")
    try:
        return features_from_mapping(schema, features, where="request")
    except DataError as exc:
        raise ApiError(422, str(exc))


def _rating_payload(model: RatingModel, x: np.ndarray) -> dict:
    probs = model.exceed_probs(x[None, :])[0]
    rating = int(model.rate(x[None, :])[0])
    return {"rating": rating, "probabilities": [float(p) for p in probs]}


def build_app(model_path: str) -> FastAPI:
    """App factory; loads and validates the model before serving anything."""
    app = FastAPI(title="vrstars", docs_url=None, redoc_url=None)
    app.state.model_path = model_path
    app.state.model = RatingModel.load(model_path)
    app.state.reload_lock = threading.Lock()

    @app.exception_handler(ApiError)
    async def _api_error(_request: Request, exc: ApiError) -> JSONResponse:
        return JSONResponse(status_code=exc.status, content={"detail": exc.detail})

    @app.get("/v1/schema")
    async def schema() -> JSONResponse:
        return JSONResponse(app.state.model.schema.to_json_obj())

    @app.post("/v1/rate")
    async def rate(request: Request) -> JSONResponse:
        model = app.state.model
        x = _vector(model, _features_field(await _parse_body(request)))
        return JSONResponse(_rating_payload(model, x))

    @app.post("/v1/explain")
    async def explain(request: Request) -> JSONResponse:
        model = app.state.model
        x = _vector(model, _features_field(await _parse_body(request)))
        exp = compute_explanation(model, x)
        return JSONResponse(
            {
                "rating": int(exp.rating),
                "responsible_k": int(exp.responsible),
                "base_value": float(exp.base_value),
                "items": [{"feature": n, "shap": v} for n, v in exp.top_items()],
                "probability": float(exp.probability),
                "method": exp.method,
            }
        )

    @app.post("/v1/suggest")
    async def suggest(request: Request) -> JSONResponse:
        model = app.state.model
        x = _vector(model, _features_field(await _parse_body(request)))
        rating = int(model.rate(x[None, :])[0])
        items = compute_suggestions(model, x, rating=rating)
        return JSONResponse(
            {
                "current_rating": rating,
                "items": [{"feature": s.feature, "increment": s.increment} for s in items],
            }
        )

    @app.post("/v1/whatif")
    async def whatif(request: Request) -> JSONResponse:
        model = app.state.model
        body = await _parse_body(request)
        x = _vector(model, _features_field(body))
        flips = body.get("flips", [])
        if not isinstance(flips, list) or any(not isinstance(f, str) for f in flips):
            raise ApiError(400, "'flips' must be a list of feature names")
        schema = model.schema
        flipped = x.copy()
        for name in flips:
            if name not in schema:
                raise ApiError(400, f"unknown feature name: {name!r}")
            spec = schema[schema.index(name)]
            if spec.kind != KIND_BINARY:
                raise ApiError(422, f"cannot flip numeric feature: {name!r}")
            fid = spec.id
            flipped[fid] = 1.0 - flipped[fid]
        before = _rating_payload(model, x)
        after = _rating_payload(model, flipped)
        delta = [a - b for a, b in zip(after["probabilities"], before["probabilities"])]
        return JSONResponse({"before": before, "after": after, "delta_per_classifier": delta})

    @app.post("/v1/reload")
    async def reload() -> JSONResponse:
        reload_model(app)
        return JSONResponse({"reloaded": True})

    return app


def reload_model(app: FastAPI) -> None:
    """Load the model file again and swap it in; keeps the old one on failure."""
    with app.state.reload_lock:
        try:
            fresh = RatingModel.load(app.state.model_path)
        except (ModelError, SchemaError, DataError, OSError, ValueError) as exc:
            log.error("reload failed, keeping current model: %s", exc)
            raise ApiError(500, f"reload failed: {exc}")
        app.state.model = fresh
    log.info("model reloaded from %s", app.state.model_path)


def install_sighup_reload(app: FastAPI) -> None:
    """SIGHUP triggers the same atomic reload as POST /v1/reload."""

    def _on_hup(_signum, _frame):
        try:
            reload_model(app)
        except ApiError:
            pass

    signal.signal(signal.SIGHUP, _on_hup)
