"""Latency: per-stage medians for both engines, plus desk-scale search.

The RAG column excludes generator time so the comparison isolates
retrieval cost. Absolute numbers are hardware-dependent and reported,
never asserted.

Run from the repository root:

    python demos/06_latency_benchmark.py
"""

import time

import numpy as np

from ramo import (
    DeterministicEmbedder,
    Recommender,
    ScriptedGenerator,
    build_index,
    build_tfidf,
    compare_latency,
    load_catalog,
    search,
)
from ramo.vecindex import VectorIndex

catalog = load_catalog("fixtures/mini_catalog.csv")
embedder = DeterministicEmbedder(dim=256)
engine = Recommender(catalog, build_index(catalog, embedder), embedder, ScriptedGenerator())

report = compare_latency(
    queries=[
        "python",
        "sql databases",
        "watercolor painting",
        "linear algebra",
        "I am a new user",  # baseline column shows the cold-start failure
    ],
    rag=engine,
    baseline=build_tfidf(catalog),
    repetitions=10,
)
print(report.to_text())
print()

# Exact search at the scale of a real MOOC catalog: a few thousand
# vectors at provider dimensionality is a single dense matmul.
rng = np.random.default_rng(7)
vectors = rng.standard_normal((3342, 1536), dtype=np.float32)
vectors /= np.linalg.norm(vectors, axis=1, keepdims=True)
index = VectorIndex(np.arange(3342), vectors, "synthetic", "synthetic")

search(index, rng.standard_normal(1536), 8)  # warm-up
timings = []
for _ in range(50):
    query = rng.standard_normal(1536)
    started = time.perf_counter()
    search(index, query, 8)
    timings.append((time.perf_counter() - started) * 1000.0)
timings.sort()
print(f"synthetic 3342 x 1536 index: median {timings[len(timings) // 2]:.2f} ms per query "
      f"(p90 {timings[int(len(timings) * 0.9)]:.2f} ms)")
