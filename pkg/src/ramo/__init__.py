"""Retrieval-augmented course recommender.

Pipeline: catalog CSV -> cleaned Catalog -> course documents -> embedding
vectors -> exact cosine index -> retrieved context -> three-part prompt ->
generator reply -> parsed recommendations. A TF-IDF baseline reproduces
the traditional content-based recommender for comparison.
"""

from .baseline import (
    LatencyReport,
    TfidfModel,
    baseline_recommend,
    build_tfidf,
    compare_latency,
)
from .catalog import (
    Catalog,
    Course,
    Difficulty,
    clean_text,
    load_catalog,
    parse_difficulty,
    parse_rating,
    save_catalog,
    top_rated,
)
from .embedding import (
    DeterministicEmbedder,
    Embedder,
    RemoteEmbedder,
    cosine_similarity,
    course_to_document,
    deterministic_embed,
)
from .generation import (
    Generator,
    ParsedRecommendation,
    RemoteGenerator,
    ScriptedGenerator,
    parse_recommendations,
    scripted_generate,
)
from .prompting import (
    ComposedPrompt,
    PromptTemplate,
    compose_prompt,
    default_template,
    estimate_tokens,
    fit_to_budget,
    load_templates,
    render_context,
)
from .recommender import (
    ChatSession,
    RecommendationResponse,
    Recommender,
    default_recommendations,
    handle_cold_start,
    new_session,
)
from .vecindex import SearchHit, VectorIndex, build_index, load_index, save_index, search

__version__ = "0.1.0"

__all__ = [
    "Catalog",
    "ChatSession",
    "ComposedPrompt",
    "Course",
    "DeterministicEmbedder",
    "Difficulty",
    "Embedder",
    "Generator",
    "LatencyReport",
    "ParsedRecommendation",
    "PromptTemplate",
    "RecommendationResponse",
    "Recommender",
    "RemoteEmbedder",
    "RemoteGenerator",
    "ScriptedGenerator",
    "SearchHit",
    "TfidfModel",
    "VectorIndex",
    "baseline_recommend",
    "build_index",
    "build_tfidf",
    "clean_text",
    "compare_latency",
    "compose_prompt",
    "cosine_similarity",
    "course_to_document",
    "default_recommendations",
    "default_template",
    "deterministic_embed",
    "estimate_tokens",
    "fit_to_budget",
    "handle_cold_start",
    "load_catalog",
    "load_index",
    "load_templates",
    "new_session",
    "parse_difficulty",
    "parse_rating",
    "parse_recommendations",
    "render_context",
    "save_catalog",
    "save_index",
    "scripted_generate",
    "search",
    "top_rated",
]
