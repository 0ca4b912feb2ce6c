"""Traditional content-based recommender: TF-IDF cosine over course text.

This is the comparison engine for the cold-start contrast and the latency
harness. It fails by design (NoMatch) when a query shares no vocabulary
with the catalog - the behavior the retrieval-augmented pipeline exists
to fix.
"""

from __future__ import annotations

import re
import statistics
import time
from dataclasses import dataclass

import numpy as np
from scipy import sparse

from .catalog import Catalog
from .errors import EmptyCatalog, NoMatch, RamoError
from .recommender import ChatSession, Recommender, new_session
from .vecindex import SearchHit

_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)
MIN_TOKEN_LEN = 2
DEFAULT_MIN_SIMILARITY = 0.05


def tokenize(text: str) -> list[str]:
    """Lower-case, split on non-alphanumerics, drop tokens shorter than 2."""
    return [t for t in _TOKEN_RE.findall(text.lower()) if len(t) >= MIN_TOKEN_LEN]


@dataclass(frozen=True)
class TfidfModel:
    vocabulary: dict[str, int]
    idf: np.ndarray
    doc_vectors: sparse.csr_matrix  # one L2-normalized row per course
    course_ids: np.ndarray
    catalog_fingerprint: str


def build_tfidf(catalog: Catalog) -> TfidfModel:
    """Fit vocabulary, smoothed idf, and normalized tf-idf doc vectors."""
    if len(catalog) == 0:
        raise EmptyCatalog("cannot fit tf-idf on an empty catalog")

    doc_tokens = [
        tokenize(f"{c.name} {' '.join(c.skills)} {c.description}") for c in catalog
    ]
    vocabulary = {term: i for i, term in enumerate(sorted({t for doc in doc_tokens for t in doc}))}

    n_docs = len(doc_tokens)
    n_terms = len(vocabulary)
    df = np.zeros(n_terms, dtype=np.int64)
    for tokens in doc_tokens:
        for term in set(tokens):
            df[vocabulary[term]] += 1
    idf = np.log((1.0 + n_docs) / (1.0 + df)) + 1.0

    rows, cols, data = [], [], []
    for row, tokens in enumerate(doc_tokens):
        counts: dict[int, int] = {}
        for term in tokens:
            col = vocabulary[term]
            counts[col] = counts.get(col, 0) + 1
        for col, count in counts.items():
            rows.append(row)
            cols.append(col)
            data.append(count * idf[col])
    matrix = sparse.csr_matrix(
        (np.asarray(data, dtype=np.float64), (rows, cols)), shape=(n_docs, n_terms)
    )
    norms = np.sqrt(np.asarray(matrix.multiply(matrix).sum(axis=1)).ravel())
    scale = np.divide(1.0, norms, out=np.zeros_like(norms), where=norms > 0)
    matrix = sparse.diags(scale) @ matrix

    return TfidfModel(
        vocabulary=vocabulary,
        idf=idf,
        doc_vectors=matrix.tocsr(),
        course_ids=np.asarray([c.id for c in catalog], dtype=np.int64),
        catalog_fingerprint=catalog.source_fingerprint,
    )


def _vectorize_query(model: TfidfModel, query: str) -> np.ndarray | None:
    counts: dict[int, int] = {}
    for term in tokenize(query):
        col = model.vocabulary.get(term)
        if col is not None:
            counts[col] = counts.get(col, 0) + 1
    if not counts:
        return None
    vec = np.zeros(len(model.vocabulary), dtype=np.float64)
    for col, count in counts.items():
        vec[col] = count * model.idf[col]
    return vec / np.linalg.norm(vec)


def baseline_recommend(
    model: TfidfModel,
    query: str,
    k: int,
    min_similarity: float = DEFAULT_MIN_SIMILARITY,
) -> list[SearchHit]:
    """Top-k courses by tf-idf cosine against the query.

    Raises NoMatch when the query shares no vocabulary with the catalog or
    nothing clears the similarity floor - the cold-start failure mode.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    qv = _vectorize_query(model, query)
    if qv is None:
        raise NoMatch("query has no vocabulary overlap with the catalog")
    scores = model.doc_vectors @ qv
    eligible = [
        (float(scores[i]), int(model.course_ids[i]))
        for i in range(len(scores))
        if scores[i] >= min_similarity
    ]
    if not eligible:
        raise NoMatch(f"no course clears the similarity floor {min_similarity}")
    eligible.sort(key=lambda pair: (-pair[0], pair[1]))
    return [SearchHit(cid, score) for score, cid in eligible[:k]]


@dataclass(frozen=True)
class LatencyRow:
    query: str
    rag_ms: float | None
    generate_ms: float | None
    baseline_ms: float | None
    delta_ms: float | None
    rag_error: str | None = None
    baseline_error: str | None = None


@dataclass(frozen=True)
class LatencyReport:
    rows: list[LatencyRow]
    repetitions: int
    summary_rag_ms: float | None
    summary_baseline_ms: float | None
    summary_delta_ms: float | None

    def to_text(self) -> str:
        headers = ["query", "rag_ms", "gen_ms", "baseline_ms", "delta_ms"]
        table = [headers]
        for row in self.rows:
            table.append(
                [
                    row.query if len(row.query) <= 42 else row.query[:39] + "...",
                    _fmt(row.rag_ms, row.rag_error),
                    _fmt(row.generate_ms, row.rag_error),
                    _fmt(row.baseline_ms, row.baseline_error),
                    _fmt(row.delta_ms, None),
                ]
            )
        table.append(
            [
                "median",
                _fmt(self.summary_rag_ms, None),
                "",
                _fmt(self.summary_baseline_ms, None),
                _fmt(self.summary_delta_ms, None),
            ]
        )
        widths = [max(len(r[i]) for r in table) for i in range(len(headers))]
        lines = []
        for i, row in enumerate(table):
            lines.append("  ".join(cell.ljust(widths[j]) for j, cell in enumerate(row)).rstrip())
            if i == 0:
                lines.append("  ".join("-" * w for w in widths))
        return "\n".join(lines)

    def to_csv(self) -> str:
        lines = ["query,rag_ms,generate_ms,baseline_ms,delta_ms,rag_error,baseline_error"]
        for row in self.rows:
            quoted = '"' + row.query.replace('"', '""') + '"'
            lines.append(
                ",".join(
                    [
                        quoted,
                        _csv_num(row.rag_ms),
                        _csv_num(row.generate_ms),
                        _csv_num(row.baseline_ms),
                        _csv_num(row.delta_ms),
                        row.rag_error or "",
                        row.baseline_error or "",
                    ]
                )
            )
        return "\n".join(lines)


def _fmt(value: float | None, error: str | None) -> str:
    if error:
        return error
    if value is None:
        return "-"
    return f"{value:.3f}"


def _csv_num(value: float | None) -> str:
    return "" if value is None else f"{value:.6f}"


def compare_latency(
    queries: list[str],
    rag: Recommender,
    baseline: TfidfModel,
    repetitions: int,
    k: int = 5,
    min_similarity: float = DEFAULT_MIN_SIMILARITY,
) -> LatencyReport:
    """Median per-query latency for both engines over several repetitions.

    The RAG column excludes generator time (reported separately) so that a
    scripted stand-in does not mask retrieval cost. Engine errors mark the
    row instead of aborting the run.
    """
    if repetitions < 3:
        raise ValueError("repetitions must be >= 3")

    rows: list[LatencyRow] = []
    for query in queries:
        rag_samples: list[float] = []
        gen_samples: list[float] = []
        rag_error: str | None = None
        session: ChatSession = new_session()
        for _ in range(repetitions):
            try:
                response = rag.recommend(session, query)
            except RamoError as exc:
                rag_error = type(exc).__name__
                break
            rag_samples.append(response.latency.total_ms - response.latency.generate_ms)
            gen_samples.append(response.latency.generate_ms)

        baseline_samples: list[float] = []
        baseline_error: str | None = None
        for _ in range(repetitions):
            started = time.perf_counter()
            try:
                baseline_recommend(baseline, query, k, min_similarity)
            except NoMatch as exc:
                baseline_error = type(exc).__name__
                break
            baseline_samples.append((time.perf_counter() - started) * 1000.0)

        rag_ms = statistics.median(rag_samples) if rag_samples and not rag_error else None
        gen_ms = statistics.median(gen_samples) if gen_samples and not rag_error else None
        base_ms = (
            statistics.median(baseline_samples) if baseline_samples and not baseline_error else None
        )
        delta = base_ms - rag_ms if rag_ms is not None and base_ms is not None else None
        rows.append(
            LatencyRow(
                query=query,
                rag_ms=rag_ms,
                generate_ms=gen_ms,
                baseline_ms=base_ms,
                delta_ms=delta,
                rag_error=rag_error,
                baseline_error=baseline_error,
            )
        )

    def median_of(values: list[float]) -> float | None:
        return statistics.median(values) if values else None

    return LatencyReport(
        rows=rows,
        repetitions=repetitions,
        summary_rag_ms=median_of([r.rag_ms for r in rows if r.rag_ms is not None]),
        summary_baseline_ms=median_of([r.baseline_ms for r in rows if r.baseline_ms is not None]),
        summary_delta_ms=median_of([r.delta_ms for r in rows if r.delta_ms is not None]),
    )
