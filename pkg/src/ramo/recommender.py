"""Pipeline orchestration: retrieve, compose, generate, parse; chat
sessions; and the ratings-based defaults path for the UI's initial state.
"""

from __future__ import annotations

import threading
import time
import uuid
from dataclasses import dataclass, field

from .catalog import Catalog, top_rated
from .embedding import Embedder
from .errors import EmptyQuestion, PipelineStageError, ProviderError
from .generation import Generator, ParsedRecommendation, parse_recommendations
from .prompting import (
    DEFAULT_TOKEN_BUDGET,
    REPLY_TOKEN_MARGIN,
    PromptTemplate,
    compose_prompt,
    default_template,
    fit_to_budget,
    render_context,
)
from .vecindex import SearchHit, VectorIndex, search


@dataclass(frozen=True)
class Turn:
    user_message: str
    reply: str
    timestamp: float


@dataclass
class ChatSession:
    """Append-only conversation record; per-session work is serialized."""

    session_id: str
    created_at: float = field(default_factory=time.time)
    turns: list[Turn] = field(default_factory=list)
    lock: threading.Lock = field(default_factory=threading.Lock, repr=False, compare=False)

    def append(self, user_message: str, reply: str) -> None:
        now = time.time()
        if self.turns and now < self.turns[-1].timestamp:
            now = self.turns[-1].timestamp
        self.turns.append(Turn(user_message, reply, now))


def new_session(session_id: str | None = None) -> ChatSession:
    return ChatSession(session_id=session_id or uuid.uuid4().hex)


@dataclass(frozen=True)
class LatencyBreakdown:
    embed_ms: float
    search_ms: float
    generate_ms: float
    total_ms: float


@dataclass(frozen=True)
class RecommendationResponse:
    reply: str
    recommendations: list[ParsedRecommendation]
    source: str  # "rag" or "defaults"
    retrieval_hits: list[SearchHit]
    latency: LatencyBreakdown


def handle_cold_start(message: str) -> bool:
    """Cold-start messages take the normal RAG path; always True.

    There is no separate cold-start branch in the pipeline: the default
    template itself instructs the generator to fall back to popular, easy
    courses when the user states no requirements, and the defaults
    endpoint covers the UI's initial state. This function exists to make
    that design explicit.
    """
    return True


def default_recommendations(catalog: Catalog, k: int = 5) -> RecommendationResponse:
    """Top-rated courses as a canned response; never calls the generator."""
    started = time.perf_counter()
    courses = top_rated(catalog, k)
    recommendations = [
        ParsedRecommendation(title_text=c.name, course_id=c.id, url=c.url or None)
        for c in courses
    ]
    lines = ["Welcome! Here are our most popular courses:"]
    lines.extend(f"{i}. {c.name}" for i, c in enumerate(courses, start=1))
    total_ms = (time.perf_counter() - started) * 1000.0
    return RecommendationResponse(
        reply="\n".join(lines),
        recommendations=recommendations,
        source="defaults",
        retrieval_hits=[],
        latency=LatencyBreakdown(0.0, 0.0, 0.0, total_ms),
    )


class Recommender:
    """Full retrieval-augmented pipeline over one catalog + index pair."""

    def __init__(
        self,
        catalog: Catalog,
        index: VectorIndex,
        embedder: Embedder,
        generator: Generator,
        template: PromptTemplate | None = None,
        *,
        top_k: int = 8,
        token_budget: int = DEFAULT_TOKEN_BUDGET,
        reply_margin: int = REPLY_TOKEN_MARGIN,
        prompt_order: str = "template_first",
        history_turns: int = 0,
    ):
        if embedder.dim is not None and embedder.dim != index.dim:
            raise ValueError(f"embedder dim {embedder.dim} != index dim {index.dim}")
        if top_k < 1:
            raise ValueError("top_k must be >= 1")
        self.catalog = catalog
        self.index = index
        self.embedder = embedder
        self.generator = generator
        self.template = template or default_template()
        self.top_k = top_k
        self.token_budget = token_budget
        self.prompt_budget = max(1, token_budget - reply_margin)
        self.prompt_order = prompt_order
        self.history_turns = history_turns

    def with_providers(self, embedder: Embedder, generator: Generator) -> "Recommender":
        """Shallow clone with swapped providers (per-request key overrides)."""
        clone = object.__new__(Recommender)
        clone.__dict__.update(self.__dict__)
        clone.embedder = embedder
        clone.generator = generator
        return clone

    def _question_part(self, session: ChatSession, message: str) -> str:
        if self.history_turns <= 0 or not session.turns:
            return message
        lines = []
        for turn in session.turns[-self.history_turns :]:
            lines.append(f"User: {turn.user_message}")
            lines.append(f"Assistant: {turn.reply}")
        return "\n".join(lines) + "\n\n" + message

    def recommend(self, session: ChatSession, message: str) -> RecommendationResponse:
        """Run the full pipeline for one user message and record the turn."""
        if not message.strip():
            raise EmptyQuestion("message is empty after trimming")
        with session.lock:
            total_start = time.perf_counter()

            stage_start = time.perf_counter()
            try:
                query = self.embedder.embed_batch([message])[0]
            except ProviderError as exc:
                raise PipelineStageError("embed", exc) from exc
            embed_ms = (time.perf_counter() - stage_start) * 1000.0

            stage_start = time.perf_counter()
            hits = search(self.index, query, self.top_k)
            search_ms = (time.perf_counter() - stage_start) * 1000.0

            context = render_context(hits, self.catalog, self.template.detail_fields)
            question = self._question_part(session, message)
            prompt = compose_prompt(self.template, context, question, order=self.prompt_order)
            prompt = fit_to_budget(prompt, hits, self.catalog, self.template, self.prompt_budget)

            stage_start = time.perf_counter()
            try:
                reply = self.generator.generate(prompt)
            except ProviderError as exc:
                raise PipelineStageError("generate", exc) from exc
            generate_ms = (time.perf_counter() - stage_start) * 1000.0

            recommendations = parse_recommendations(reply, self.catalog)
            session.append(message, reply)
            total_ms = (time.perf_counter() - total_start) * 1000.0
            return RecommendationResponse(
                reply=reply,
                recommendations=recommendations,
                source="rag",
                retrieval_hits=hits,
                latency=LatencyBreakdown(embed_ms, search_ms, generate_ms, total_ms),
            )
