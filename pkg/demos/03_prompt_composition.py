"""Prompt composition: template, retrieved context, question, token budget.

Run from the repository root:

    python demos/03_prompt_composition.py
"""

from ramo import (
    DeterministicEmbedder,
    build_index,
    compose_prompt,
    default_template,
    estimate_tokens,
    fit_to_budget,
    load_catalog,
    render_context,
    search,
)
from ramo.prompting import PromptTemplate

catalog = load_catalog("fixtures/mini_catalog.csv")
embedder = DeterministicEmbedder(dim=256)
index = build_index(catalog, embedder)

# The built-in template fixes the recommender persona, the popularity
# fallback for unspecific users, and the refusal rule.
template = default_template()
print(template.body)
print()

# Retrieve, render the context blocks, compose the three parts.
question = "I want to learn python, can you recommend me some courses?"
hits = search(index, embedder.embed_batch([question])[0], 4)
context = render_context(hits, catalog, {"title", "rating"})
prompt = compose_prompt(template, context, question)
print(f"estimated tokens: {prompt.estimated_tokens} "
      f"(~4 chars/token heuristic: {estimate_tokens(prompt.text)})")
print()

# Token budgets drop the lowest-scored context first; the template and the
# question are never cut. A deliberately tiny budget shows the trimming.
rich = PromptTemplate(
    id="rich",
    body=template.body,
    detail_fields=frozenset({"title", "url", "rating", "difficulty", "description"}),
)
full_context = render_context(search(index, embedder.embed_batch([question])[0], 8),
                              catalog, rich.detail_fields)
oversized = compose_prompt(rich, full_context, question)
trimmed = fit_to_budget(oversized, hits, catalog, rich, budget=300)
print(f"before trimming: {oversized.estimated_tokens} tokens, "
      f"after fit_to_budget(300): {trimmed.estimated_tokens} tokens")
print(f"surviving context blocks: {trimmed.context_part.count('Title:')}")

# Templates can pin how many courses the generator should name; the phrase
# itself is parsed out of the body.
counted = PromptTemplate(
    id="three",
    body="Please recommend three courses at a time.\n\nContext:\n{context}\n\nQuestion:\n{question}",
)
print(f"requested_count parsed from body: {counted.requested_count}")
