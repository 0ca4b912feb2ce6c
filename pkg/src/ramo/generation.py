"""Reply generation: remote chat-completion client, deterministic scripted
stand-in, and parsing of course recommendations out of reply text.
"""

from __future__ import annotations

import json
import logging
import os
import re
import time
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Callable

import requests

from .catalog import Catalog, clean_text
from .errors import (
    EmptyReply,
    ProviderAuth,
    ProviderError,
    ProviderRateLimit,
    ProviderTimeout,
)
from .prompting import ComposedPrompt

logger = logging.getLogger("ramo.generation")

SCRIPTED_REPLY_HEADER = "Sure! Here are some recommended courses:"
SCRIPTED_REFUSAL = "I don't know"
SCRIPTED_DEFAULT_CAP = 5

_ITEM_RE = re.compile(r"^\s*(?:\d+[.)]\s+|[-*•]\s+)(.+?)\s*$")
_URL_RE = re.compile(r"https?://[^\s)\"']+")
_LABEL_RE = re.compile(r"^\s*(Title|URL|Rating|Difficulty|Description|Reason):\s*(.*)$")


@dataclass(frozen=True)
class ParsedRecommendation:
    """One course reference recovered from reply text.

    course_id stays None when the title could not be matched to the catalog.
    """

    title_text: str
    course_id: int | None = None
    url: str | None = None
    reason: str | None = None


class Generator(ABC):
    """One generate call consumes one composed prompt and yields one reply."""

    name: str
    model: str
    temperature: float = 0.0
    max_reply_tokens: int = 512

    @abstractmethod
    def generate(self, prompt: ComposedPrompt) -> str:
        """Return a non-empty reply for the prompt."""

    def with_api_key(self, api_key: str) -> "Generator":
        """Per-request credential override; offline generators return self."""
        return self


def _context_blocks(context: str) -> list[dict[str, str]]:
    blocks = []
    for chunk in context.split("\n\n"):
        fields: dict[str, str] = {}
        for line in chunk.splitlines():
            match = _LABEL_RE.match(line)
            if match:
                fields[match.group(1).lower()] = match.group(2).strip()
        if "title" in fields:
            blocks.append(fields)
    return blocks


def scripted_generate(prompt: ComposedPrompt) -> str:
    """Deterministic generator stand-in.

    Echoes the retrieved context back as a numbered recommendation list:
    the requested count when the template asked for one, otherwise every
    context block up to a cap of five. URL and Rating lines are carried
    over when the context includes those labels. An empty context yields
    exactly the refusal the template instructs.
    """
    blocks = _context_blocks(prompt.context_part)
    if not blocks:
        return SCRIPTED_REFUSAL
    count = prompt.requested_count if prompt.requested_count else min(len(blocks), SCRIPTED_DEFAULT_CAP)
    count = min(count, len(blocks))
    lines = [SCRIPTED_REPLY_HEADER]
    for i, block in enumerate(blocks[:count], start=1):
        lines.append(f"{i}. {block['title']}")
        if "url" in block:
            lines.append(f"   URL: {block['url']}")
        if "rating" in block:
            lines.append(f"   Rating: {block['rating']}")
    return "\n".join(lines)


class ScriptedGenerator(Generator):
    """Pure scripted generator; `calls` counts invocations for assertions."""

    def __init__(self):
        self.name = "scripted"
        self.model = "scripted"
        self.calls = 0

    def generate(self, prompt: ComposedPrompt) -> str:
        self.calls += 1
        return scripted_generate(prompt)


class RemoteGenerator(Generator):
    """HTTPS JSON chat-completion client.

    POST {model, messages, temperature, max_tokens} and read
    choices[0].message.content. The template part rides as the system
    message; context and question together form the user message. Retries
    mirror the embedding client: 3 attempts, exponential backoff from
    250 ms, only on timeouts and rate limits.
    """

    API_KEY_ENV = "GEN_API_KEY"

    def __init__(
        self,
        endpoint: str,
        model: str,
        *,
        api_key: str | None = None,
        temperature: float = 0.0,
        max_reply_tokens: int = 512,
        max_attempts: int = 3,
        backoff_start_s: float = 0.25,
        timeout_s: float = 60.0,
        session: requests.Session | None = None,
        sleep: Callable[[float], None] = time.sleep,
    ):
        self.endpoint = endpoint
        self.model = model
        self.name = f"remote:{model}"
        self.temperature = temperature
        self.max_reply_tokens = max_reply_tokens
        self._api_key = api_key if api_key is not None else os.environ.get(self.API_KEY_ENV)
        self.max_attempts = max_attempts
        self.backoff_start_s = backoff_start_s
        self.timeout_s = timeout_s
        self._session = session or requests.Session()
        self._sleep = sleep
        self.last_latency_ms: float | None = None

    def with_api_key(self, api_key: str) -> "RemoteGenerator":
        return RemoteGenerator(
            self.endpoint,
            self.model,
            api_key=api_key,
            temperature=self.temperature,
            max_reply_tokens=self.max_reply_tokens,
            max_attempts=self.max_attempts,
            backoff_start_s=self.backoff_start_s,
            timeout_s=self.timeout_s,
            session=self._session,
            sleep=self._sleep,
        )

    def generate(self, prompt: ComposedPrompt) -> str:
        user_content = f"Context:\n{prompt.context_part}\n\nQuestion:\n{prompt.question_part}"
        payload = {
            "model": self.model,
            "messages": [
                {"role": "system", "content": prompt.template_part},
                {"role": "user", "content": user_content},
            ],
            "temperature": self.temperature,
            "max_tokens": self.max_reply_tokens,
        }
        headers = {"Content-Type": "application/json"}
        if self._api_key:
            headers["Authorization"] = f"Bearer {self._api_key}"
        if logger.isEnabledFor(logging.DEBUG):
            # bodies carry no credential; the Authorization header is never logged
            logger.debug(
                "POST %s auth=%s body=%s",
                self.endpoint,
                "[redacted]" if self._api_key else "none",
                json.dumps(payload),
            )

        started = time.perf_counter()
        delay = self.backoff_start_s
        last_error: Exception | None = None
        for attempt in range(1, self.max_attempts + 1):
            try:
                response = self._session.post(
                    self.endpoint, json=payload, headers=headers, timeout=self.timeout_s
                )
            except requests.Timeout as exc:
                last_error = ProviderTimeout(f"generation request timed out: {exc}")
            except requests.RequestException as exc:
                raise ProviderError(f"generation request failed: {exc}") from exc
            else:
                if response.status_code in (401, 403):
                    raise ProviderAuth(
                        f"generation provider rejected credential ({response.status_code})"
                    )
                if response.status_code == 429:
                    last_error = ProviderRateLimit("generation provider rate limit (429)")
                elif response.status_code >= 400:
                    raise ProviderError(f"generation provider returned HTTP {response.status_code}")
                else:
                    self.last_latency_ms = (time.perf_counter() - started) * 1000.0
                    body = response.json()
                    if logger.isEnabledFor(logging.DEBUG):
                        logger.debug(
                            "generation response status=%s body=%s",
                            response.status_code,
                            json.dumps(body),
                        )
                    return self._parse_response(body)
            if attempt < self.max_attempts:
                self._sleep(delay)
                delay *= 2
        assert last_error is not None
        raise last_error

    @staticmethod
    def _parse_response(body: dict) -> str:
        try:
            content = body["choices"][0]["message"]["content"]
        except (KeyError, IndexError, TypeError) as exc:
            raise ProviderError(f"malformed generation response: {exc}") from exc
        if not content or not content.strip():
            raise EmptyReply("generator returned an empty reply")
        return content


def _normalize_title(text: str) -> str:
    return clean_text(text).casefold()


def _strip_title(raw: str) -> tuple[str, str | None]:
    """Remove a URL and decoration from an enumerated line; return (title, url)."""
    url_match = _URL_RE.search(raw)
    url = url_match.group(0).rstrip(".,;") if url_match else None
    text = _URL_RE.sub("", raw)
    text = text.strip().strip("*_\"'").strip()
    text = text.rstrip(" -:–—|(").strip()
    return text, url


def parse_recommendations(reply: str, catalog: Catalog) -> list[ParsedRecommendation]:
    """Pull numbered/bulleted course mentions out of a reply.

    Titles are matched to the catalog first by normalized exact name, then
    by unique case-insensitive substring; ambiguity leaves course_id unset
    rather than guessing. A URL on the item's own line or the following
    lines is attached, as is a labeled "Reason:" line.
    """
    exact: dict[str, int] = {}
    for course in catalog:
        exact.setdefault(_normalize_title(course.name), course.id)

    lines = reply.splitlines()
    items: list[dict] = []
    for line in lines:
        item_match = _ITEM_RE.match(line)
        if item_match:
            title, url = _strip_title(item_match.group(1))
            if title:
                items.append({"title": title, "url": url, "reason": None})
            continue
        if not items:
            continue
        current = items[-1]
        label = _LABEL_RE.match(line)
        if label and label.group(1) == "Reason" and current["reason"] is None:
            current["reason"] = label.group(2).strip() or None
        elif current["url"] is None:
            url_match = _URL_RE.search(line)
            if url_match:
                current["url"] = url_match.group(0).rstrip(".,;")

    results = []
    for item in items:
        normalized = _normalize_title(item["title"])
        course_id = exact.get(normalized)
        if course_id is None and normalized:
            candidates = {
                c.id
                for c in catalog
                if normalized in _normalize_title(c.name) or _normalize_title(c.name) in normalized
            }
            if len(candidates) == 1:
                course_id = candidates.pop()
        results.append(
            ParsedRecommendation(
                title_text=item["title"],
                course_id=course_id,
                url=item["url"],
                reason=item["reason"],
            )
        )
    return results
