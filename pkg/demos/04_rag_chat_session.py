"""A full conversational session against the offline pipeline.

Run from the repository root:

    python demos/04_rag_chat_session.py
"""

from ramo import (
    DeterministicEmbedder,
    Recommender,
    ScriptedGenerator,
    build_index,
    load_catalog,
    new_session,
)

catalog = load_catalog("fixtures/mini_catalog.csv")
embedder = DeterministicEmbedder(dim=256)
engine = Recommender(catalog, build_index(catalog, embedder), embedder, ScriptedGenerator())

session = new_session()
for message in [
    "I want to learn python, can you recommend me some courses?",
    "I want to learn SQL",
    "I am a new user",  # cold start rides the same retrieval + template path
]:
    response = engine.recommend(session, message)
    print(f">>> {message}")
    print(response.reply)
    resolved = [r for r in response.recommendations if r.course_id is not None]
    print(f"[{len(resolved)} recommendations resolved to catalog entries; "
          f"embed {response.latency.embed_ms:.1f} ms, "
          f"search {response.latency.search_ms:.2f} ms, "
          f"generate {response.latency.generate_ms:.2f} ms]")
    print()

print(f"session recorded {len(session.turns)} turns, "
      f"first at {session.turns[0].timestamp:.0f}")
