"""The cold-start contrast: TF-IDF baseline vs the retrieval pipeline.

A brand-new learner says nothing useful ("I am a new user"). The
content-based baseline has no vocabulary overlap to work with and fails;
the retrieval pipeline still answers, because its template tells the
generator to fall back to popular, easy courses.

Run from the repository root:

    python demos/05_cold_start_vs_baseline.py
"""

from ramo import (
    DeterministicEmbedder,
    Recommender,
    ScriptedGenerator,
    baseline_recommend,
    build_index,
    build_tfidf,
    load_catalog,
    new_session,
)
from ramo.errors import NoMatch

catalog = load_catalog("fixtures/mini_catalog.csv")
model = build_tfidf(catalog)

COLD_START = "I am a new user"

print(f"query: {COLD_START!r}\n")

# Traditional content-based route: cosine over tf-idf of course text.
try:
    baseline_recommend(model, COLD_START, k=5)
    print("baseline: returned hits (unexpected for this fixture)")
except NoMatch as exc:
    print(f"baseline: NoMatch - {exc}")

# Retrieval-augmented route: always retrieves, the template handles the rest.
embedder = DeterministicEmbedder(dim=256)
engine = Recommender(catalog, build_index(catalog, embedder), embedder, ScriptedGenerator())
response = engine.recommend(new_session(), COLD_START)
print(f"rag:      {len(response.recommendations)} recommendations, source={response.source}")
print()
print(response.reply)
print()

# On a topical query both engines answer; the baseline simply matches text.
topical = "python"
hits = baseline_recommend(model, topical, k=3)
print(f"baseline on {topical!r}:")
for hit in hits:
    print(f"  {hit.score:.4f}  {catalog.by_id(hit.course_id).name}")
