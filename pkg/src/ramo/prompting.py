"""Prompt templates, retrieved-context rendering, three-part composition,
and token budget enforcement.

All types are immutable and all operations pure.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path

from .catalog import Catalog
from .errors import BudgetTooSmall, EmptyQuestion, TemplateInvalid, UnknownCourseId
from .vecindex import SearchHit

# Per-model prompt size ceilings (tokens).
MODEL_TOKEN_LIMITS = {
    "gpt-3.5-turbo": 4096,
    "gpt-4": 8192,
    "llama-2": 4096,
    "llama-3": 8000,
}
DEFAULT_TOKEN_BUDGET = MODEL_TOKEN_LIMITS["gpt-3.5-turbo"]
REPLY_TOKEN_MARGIN = 512  # reserved for the generator's reply

PROMPT_ORDERS = ("template_first", "question_first")

# Fields a context block may carry, in render order. "reason" is a valid
# template flag (it instructs the generator) but renders nothing here.
RENDERABLE_FIELDS = ("title", "url", "rating", "difficulty", "description")
ALLOWED_DETAIL_FIELDS = frozenset(RENDERABLE_FIELDS) | {"reason"}

_FIELD_LABELS = {
    "title": "Title",
    "url": "URL",
    "rating": "Rating",
    "difficulty": "Difficulty",
    "description": "Description",
}

DEFAULT_TEMPLATE_BODY = (
    "You are a fantastic Coursera course recommender. Use the following pieces of context "
    "to answer the question and recommend relevant courses to the user. If the user doesn't "
    "specify their requirements, you can just recommend some courses that are most popular "
    "in the system based on their ratings and difficulty levels. You only need to provide "
    "the course title to the user. Also, please pay attention to how many courses the user "
    "wants you to recommend. If you don't know the answer, just say \"I don't know\"."
    "\n\nContext:\n{context}\n\nQuestion:\n{question}"
)

_COUNT_WORDS = {
    "one": 1,
    "two": 2,
    "three": 3,
    "four": 4,
    "five": 5,
    "six": 6,
    "seven": 7,
    "eight": 8,
    "nine": 9,
    "ten": 10,
}
_COUNT_RE = re.compile(
    r"\brecommend\s+(\d+|one|two|three|four|five|six|seven|eight|nine|ten)\s+courses?\b",
    re.IGNORECASE,
)


def parse_requested_count(text: str) -> int | None:
    """Pull a course count out of "recommend N courses" phrasing, if any."""
    match = _COUNT_RE.search(text)
    if not match:
        return None
    token = match.group(1).lower()
    count = int(token) if token.isdigit() else _COUNT_WORDS[token]
    return count if count >= 1 else None


@dataclass(frozen=True)
class PromptTemplate:
    id: str
    body: str
    requested_count: int | None = None
    detail_fields: frozenset[str] = frozenset({"title"})

    def __post_init__(self) -> None:
        if not self.id:
            raise TemplateInvalid("template id must be non-empty")
        for placeholder in ("{context}", "{question}"):
            if self.body.count(placeholder) != 1:
                raise TemplateInvalid(
                    f"template {self.id!r} must contain {placeholder} exactly once"
                )
        if self.requested_count is None:
            # a "recommend N courses" phrasing in the body pins the count
            object.__setattr__(self, "requested_count", parse_requested_count(self.body))
        elif self.requested_count < 1:
            raise TemplateInvalid("requested_count must be >= 1")
        bad = set(self.detail_fields) - ALLOWED_DETAIL_FIELDS
        if bad:
            raise TemplateInvalid(f"unknown detail fields: {sorted(bad)}")
        if "title" not in self.detail_fields:
            raise TemplateInvalid("detail_fields must include 'title'")


def default_template() -> PromptTemplate:
    """The built-in recommender persona with context/question insertion points."""
    return PromptTemplate(
        id="default",
        body=DEFAULT_TEMPLATE_BODY,
        detail_fields=frozenset({"title"}),
    )


def estimate_tokens(text: str) -> int:
    """Four-characters-per-token heuristic, rounded up."""
    return (len(text) + 3) // 4


def render_context(
    hits: list[SearchHit],
    catalog: Catalog,
    detail_fields: frozenset[str] | set[str],
) -> str:
    """Render retrieved courses as labeled blocks, one per hit, in hit order."""
    blocks = []
    for hit in hits:
        if hit.course_id not in catalog:
            raise UnknownCourseId(hit.course_id)
        course = catalog.by_id(hit.course_id)
        values = {
            "title": course.name,
            "url": course.url,
            "rating": "unrated" if course.rating is None else str(course.rating),
            "difficulty": str(course.difficulty),
            "description": course.description,
        }
        lines = [
            f"{_FIELD_LABELS[name]}: {values[name]}"
            for name in RENDERABLE_FIELDS
            if name in detail_fields
        ]
        blocks.append("\n".join(lines))
    return "\n\n".join(blocks)


@dataclass(frozen=True)
class ComposedPrompt:
    """The three-part generator input, plus its serialized form."""

    template_part: str
    context_part: str
    question_part: str
    estimated_tokens: int
    text: str = field(repr=False)
    requested_count: int | None = None
    order: str = "template_first"


def _template_text(body: str) -> str:
    """The template's own instructions, with placeholder sections removed."""
    text = body.replace("Context:\n{context}", "").replace("Question:\n{question}", "")
    text = text.replace("{context}", "").replace("{question}", "")
    return text.strip()


def compose_prompt(
    template: PromptTemplate,
    context: str,
    question: str,
    order: str = "template_first",
) -> ComposedPrompt:
    """Substitute context and question into the template.

    The default serialization keeps the template's own ordering (template
    text, then context, then question); "question_first" hoists the
    question block to the front instead. Parts stay individually
    addressable either way.
    """
    if not question.strip():
        raise EmptyQuestion("question is empty after trimming")
    if order not in PROMPT_ORDERS:
        raise ValueError(f"order must be one of {PROMPT_ORDERS}")

    if order == "template_first":
        text = template.body.replace("{context}", context).replace("{question}", question)
    else:
        without_question = (
            template.body.replace("Question:\n{question}", "").replace("{question}", "").rstrip()
        )
        text = f"Question:\n{question}\n\n" + without_question.replace("{context}", context)

    return ComposedPrompt(
        template_part=_template_text(template.body),
        context_part=context,
        question_part=question,
        estimated_tokens=estimate_tokens(text),
        text=text,
        requested_count=template.requested_count,
        order=order,
    )


def fit_to_budget(
    prompt: ComposedPrompt,
    hits: list[SearchHit],
    catalog: Catalog,
    template: PromptTemplate,
    budget: int,
) -> ComposedPrompt:
    """Drop lowest-scored hits until the prompt fits the token budget.

    The template and question are never truncated; if even the
    zero-context prompt exceeds the budget, BudgetTooSmall is raised.
    """
    if budget < 1:
        raise ValueError("budget must be >= 1")
    surviving = list(hits)
    current = prompt
    while current.estimated_tokens > budget and surviving:
        surviving.pop()  # hits are sorted by score descending; drop the worst
        context = render_context(surviving, catalog, template.detail_fields)
        current = compose_prompt(template, context, current.question_part, order=current.order)
    if current.estimated_tokens > budget:
        raise BudgetTooSmall(
            f"template and question need {current.estimated_tokens} tokens; budget is {budget}"
        )
    return current


def _parse_front_matter(raw: str) -> tuple[dict[str, str], str]:
    if not raw.startswith("---\n"):
        return {}, raw
    end = raw.find("\n---\n", 4)
    if end < 0:
        raise TemplateInvalid("unterminated front-matter block")
    meta: dict[str, str] = {}
    for line in raw[4:end].splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition(":")
        if not sep:
            raise TemplateInvalid(f"bad front-matter line: {line!r}")
        meta[key.strip().lower()] = value.strip()
    return meta, raw[end + len("\n---\n") :]


def load_template_file(path: str | Path) -> PromptTemplate:
    """Parse one UTF-8 template file with an optional front-matter header.

    Recognized keys: id (defaults to the file stem), detail_fields
    (comma-separated), requested_count (overrides the body-derived count).
    """
    path = Path(path)
    meta, body = _parse_front_matter(path.read_text(encoding="utf-8"))
    body = body.strip("\n")
    requested = None  # None lets the body-derived count apply
    if "requested_count" in meta:
        try:
            requested = int(meta["requested_count"])
        except ValueError:
            raise TemplateInvalid(f"requested_count is not an integer in {path.name}") from None
    fields = frozenset({"title"})
    if "detail_fields" in meta:
        fields = frozenset(
            f.strip().lower() for f in meta["detail_fields"].split(",") if f.strip()
        )
    return PromptTemplate(
        id=meta.get("id", path.stem),
        body=body,
        requested_count=requested,
        detail_fields=fields,
    )


def load_templates(directory: str | Path) -> dict[str, PromptTemplate]:
    """Load every *.txt template in a directory; the default ships embedded."""
    templates = {"default": default_template()}
    for path in sorted(Path(directory).glob("*.txt")):
        template = load_template_file(path)
        templates[template.id] = template
    return templates
