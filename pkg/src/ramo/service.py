"""HTTP JSON API binding the pipeline together for the web UI and scripts."""

from __future__ import annotations

import logging
import threading
import time
from dataclasses import dataclass
from pathlib import Path

from fastapi import FastAPI, Header, Query, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .baseline import TfidfModel, build_tfidf
from .catalog import Catalog, load_catalog
from .config import ServiceConfig
from .embedding import DeterministicEmbedder, Embedder, RemoteEmbedder
from .errors import EmptyQuestion, PipelineStageError, RamoError
from .generation import Generator, ParsedRecommendation, RemoteGenerator, ScriptedGenerator
from .prompting import PromptTemplate, default_template, load_templates
from .recommender import ChatSession, Recommender, default_recommendations, new_session
from .vecindex import VectorIndex, build_index, load_index

logger = logging.getLogger("ramo.service")


class SessionStore:
    """In-memory sessions with TTL eviction; no persistence by design."""

    def __init__(self, ttl_s: float = 3600.0):
        self.ttl_s = ttl_s
        self._lock = threading.Lock()
        self._sessions: dict[str, ChatSession] = {}
        self._last_seen: dict[str, float] = {}

    def get_or_create(self, session_id: str | None) -> ChatSession:
        now = time.time()
        with self._lock:
            expired = [sid for sid, seen in self._last_seen.items() if now - seen > self.ttl_s]
            for sid in expired:
                self._sessions.pop(sid, None)
                self._last_seen.pop(sid, None)
            if session_id is not None and session_id in self._sessions:
                session = self._sessions[session_id]
            else:
                # Unknown or absent ids both start a fresh session.
                session = new_session(session_id)
                self._sessions[session.session_id] = session
            self._last_seen[session.session_id] = now
            return session

    def __len__(self) -> int:
        with self._lock:
            return len(self._sessions)


@dataclass
class Pipeline:
    catalog: Catalog
    index: VectorIndex
    embedder: Embedder
    generator: Generator
    template: PromptTemplate
    recommender: Recommender
    sessions: SessionStore
    baseline: TfidfModel | None = None


def make_embedder(config: ServiceConfig) -> Embedder:
    if config.embedder_kind == "deterministic":
        return DeterministicEmbedder(dim=config.embed_dim)
    return RemoteEmbedder(config.embed_endpoint, config.embed_model, dim=config.embed_dim or None)


def make_generator(config: ServiceConfig) -> Generator:
    if config.generator_kind == "scripted":
        return ScriptedGenerator()
    return RemoteGenerator(
        config.gen_endpoint, config.gen_model, temperature=config.gen_temperature
    )


def build_pipeline(config: ServiceConfig, with_baseline: bool = False) -> Pipeline:
    """Load the catalog, obtain an index (load or build), and wire the engine."""
    catalog = load_catalog(config.catalog_path, config.header_map())
    embedder = make_embedder(config)

    index: VectorIndex | None = None
    if config.index_path and Path(config.index_path).exists():
        with open(config.index_path, "rb") as fh:
            index = load_index(fh)
        if index.catalog_fingerprint != catalog.source_fingerprint:
            raise RamoError(
                "index was built from a different catalog "
                f"({index.catalog_fingerprint[:12]}... != {catalog.source_fingerprint[:12]}...)"
            )
    if index is None:
        index = build_index(catalog, embedder)

    if config.template_dir:
        templates = load_templates(config.template_dir)
        if config.template_id not in templates:
            raise RamoError(f"template {config.template_id!r} not found in {config.template_dir}")
        template = templates[config.template_id]
    else:
        template = default_template()

    generator = make_generator(config)
    recommender = Recommender(
        catalog,
        index,
        embedder,
        generator,
        template,
        top_k=config.top_k,
        token_budget=config.token_budget,
        prompt_order=config.prompt_order,
        history_turns=config.history_turns,
    )
    return Pipeline(
        catalog=catalog,
        index=index,
        embedder=embedder,
        generator=generator,
        template=template,
        recommender=recommender,
        sessions=SessionStore(ttl_s=config.session_ttl_s),
        baseline=build_tfidf(catalog) if with_baseline else None,
    )


class ChatRequest(BaseModel):
    message: str
    session_id: str | None = None


def _recommendation_item(rec: ParsedRecommendation, catalog: Catalog) -> dict:
    item: dict = {"title": rec.title_text}
    rating = None
    url = rec.url
    if rec.course_id is not None:
        item["course_id"] = rec.course_id
        course = catalog.by_id(rec.course_id)
        rating = course.rating
        url = url or (course.url or None)
    if url:
        item["url"] = url
    if rating is not None:
        item["rating"] = rating
    if rec.reason:
        item["reason"] = rec.reason
    return item


def create_app(config: ServiceConfig, pipeline: Pipeline | None = None) -> FastAPI:
    """Assemble the FastAPI app; pass pipeline=None to model "not loaded yet"."""
    app = FastAPI(title="ramo", docs_url=None, redoc_url=None)
    app.state.config = config
    app.state.pipeline = pipeline

    if config.cors_allowed_origins:
        app.add_middleware(
            CORSMiddleware,
            allow_origins=config.cors_allowed_origins,
            allow_methods=["*"],
            allow_headers=["*"],
        )

    @app.exception_handler(RequestValidationError)
    async def validation_handler(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"error": "malformed request body"})

    def current_pipeline() -> Pipeline | None:
        return app.state.pipeline

    @app.get("/healthz")
    def healthz():
        pipe = current_pipeline()
        if pipe is None:
            return JSONResponse(status_code=503, content={"status": "unavailable"})
        return {
            "status": "ok",
            "catalog_count": len(pipe.catalog),
            "index_dim": pipe.index.dim,
            "embedder": pipe.embedder.name,
            "generator": pipe.generator.name,
        }

    @app.get("/api/defaults")
    def defaults(k: int = Query(default=5)):
        pipe = current_pipeline()
        if pipe is None:
            return JSONResponse(status_code=503, content={"error": "index not loaded"})
        if not 1 <= k <= 50:
            return JSONResponse(status_code=400, content={"error": "k must be in [1, 50]"})
        response = default_recommendations(pipe.catalog, k)
        return {
            "recommendations": [
                _recommendation_item(rec, pipe.catalog) for rec in response.recommendations
            ],
            "source": response.source,
        }

    @app.post("/api/chat")
    def chat(
        body: ChatRequest,
        x_provider_key: str | None = Header(default=None, alias="X-Provider-Key"),
    ):
        pipe = current_pipeline()
        if pipe is None:
            return JSONResponse(status_code=503, content={"error": "index not loaded"})
        session = pipe.sessions.get_or_create(body.session_id)
        engine = pipe.recommender
        if x_provider_key:
            # Demo parity: a caller-supplied provider key overrides the
            # server-side credential for this request only (never stored).
            engine = engine.with_providers(
                pipe.embedder.with_api_key(x_provider_key),
                pipe.generator.with_api_key(x_provider_key),
            )
        try:
            result = engine.recommend(session, body.message)
        except EmptyQuestion:
            return JSONResponse(status_code=400, content={"error": "message is empty"})
        except PipelineStageError as exc:
            logger.warning("provider failure in stage %s: %s", exc.stage, exc.cause)
            return JSONResponse(
                status_code=502,
                content={"error": str(exc.cause), "stage": exc.stage},
            )
        return {
            "session_id": session.session_id,
            "reply": result.reply,
            "recommendations": [
                _recommendation_item(rec, pipe.catalog) for rec in result.recommendations
            ],
            "source": result.source,
            "latency_ms": result.latency.total_ms,
        }

    return app
