"""Text embedding: course serialization, a deterministic offline embedder
backed by signed hashed features, cosine similarity, and a remote
provider client with batching, bounded retries, and an in-flight cap.
"""

from __future__ import annotations

import json
import logging
import os
import re
import time
from abc import ABC, abstractmethod
from concurrent.futures import ThreadPoolExecutor
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np
import requests

from .catalog import Course
from .errors import (
    DimensionMismatch,
    ProviderAuth,
    ProviderError,
    ProviderRateLimit,
    ProviderTimeout,
)

logger = logging.getLogger("ramo.embedding")

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_MASK64 = 0xFFFFFFFFFFFFFFFF

_WORD_RE = re.compile(r"[^\W_]+", re.UNICODE)


def fnv1a_64(data: bytes) -> int:
    """FNV-1a 64-bit hash; fixed constants, stable across platforms and runs."""
    h = _FNV_OFFSET
    for byte in data:
        h ^= byte
        h = (h * _FNV_PRIME) & _MASK64
    return h


@lru_cache(maxsize=1 << 17)
def _feature_hashes(feature: str) -> tuple[int, int]:
    raw = feature.encode("utf-8")
    # Second hash is FNV-1a over a 1-byte-salted copy; it only decides the sign.
    return fnv1a_64(raw), fnv1a_64(b"\x01" + raw)


def deterministic_embed(text: str, dim: int = 256) -> np.ndarray:
    """Embed text into a reproducible signed-hash feature vector.

    Lower-cases the text, extracts word unigrams and character trigrams
    (over the whitespace-normalized word join), buckets each feature by
    FNV-1a modulo dim with a second-hash sign, and L2-normalizes.
    Featureless text (no word characters) yields the zero vector.
    """
    if dim < 8:
        raise ValueError("dim must be >= 8")
    vec = np.zeros(dim, dtype=np.float64)
    words = _WORD_RE.findall(text.lower())
    if not words:
        return vec
    normalized = " ".join(words)
    features = ["w:" + w for w in words]
    features.extend("c:" + normalized[i : i + 3] for i in range(len(normalized) - 2))
    for feature in features:
        h1, h2 = _feature_hashes(feature)
        vec[h1 % dim] += 1.0 if h2 % 2 == 0 else -1.0
    norm = np.linalg.norm(vec)
    if norm == 0.0:
        return vec
    return vec / norm


def cosine_similarity(a: Sequence[float] | np.ndarray, b: Sequence[float] | np.ndarray) -> float:
    """Cosine of the angle between a and b, clamped to [-1, 1].

    Returns 0.0 if either vector has zero norm. Raises DimensionMismatch
    when the dimensions differ.
    """
    av = np.asarray(a, dtype=np.float64)
    bv = np.asarray(b, dtype=np.float64)
    if av.shape != bv.shape:
        raise DimensionMismatch(f"vector dims differ: {av.shape} vs {bv.shape}")
    na = np.linalg.norm(av)
    nb = np.linalg.norm(bv)
    if na == 0.0 or nb == 0.0:
        return 0.0
    return float(np.clip(np.dot(av, bv) / (na * nb), -1.0, 1.0))


def course_to_document(course: Course) -> str:
    """Serialize one course into the single retrieval document for embedding."""
    rating = "unrated" if course.rating is None else str(course.rating)
    return (
        f"Title: {course.name} | University: {course.university} | "
        f"Difficulty: {course.difficulty} | Rating: {rating} | "
        f"Skills: {', '.join(course.skills)} | Description: {course.description}"
    )


class Embedder(ABC):
    """Provider-neutral embedding contract.

    All vectors returned by one instance share the same dimension; instances
    are safe for concurrent use.
    """

    name: str

    @property
    @abstractmethod
    def dim(self) -> int | None:
        """Vector dimension; None until a remote provider pins it."""

    @abstractmethod
    def embed_batch(self, texts: Sequence[str]) -> list[np.ndarray]:
        """One vector per input text, order-preserving."""

    def with_api_key(self, api_key: str) -> "Embedder":
        """Per-request credential override; offline embedders return self."""
        return self


class DeterministicEmbedder(Embedder):
    """Pure, offline embedder; identical inputs give identical vectors."""

    def __init__(self, dim: int = 256, name: str = "deterministic-fnv1a"):
        if dim < 8:
            raise ValueError("dim must be >= 8")
        self._dim = dim
        self.name = name

    @property
    def dim(self) -> int:
        return self._dim

    def embed_batch(self, texts: Sequence[str]) -> list[np.ndarray]:
        if not texts:
            raise ValueError("texts must be non-empty")
        return [deterministic_embed(t, self._dim) for t in texts]


class RemoteEmbedder(Embedder):
    """HTTPS JSON embedding client: POST {input, model} -> {data:[{embedding}]}.

    Batches requests, retries timeouts and rate limits with exponential
    backoff (3 attempts, starting at 250 ms), and bounds in-flight requests
    with a thread-pool cap. The vector dimension is pinned from the first
    response (or the constructor) and any later mismatch is a hard error.
    """

    API_KEY_ENV = "EMBED_API_KEY"

    def __init__(
        self,
        endpoint: str,
        model: str,
        *,
        api_key: str | None = None,
        dim: int | None = None,
        batch_size: int = 64,
        max_attempts: int = 3,
        backoff_start_s: float = 0.25,
        max_in_flight: int = 4,
        timeout_s: float = 30.0,
        max_text_length: int = 32768,
        session: requests.Session | None = None,
        sleep: Callable[[float], None] = time.sleep,
    ):
        self.endpoint = endpoint
        self.model = model
        self.name = f"remote:{model}"
        self._api_key = api_key if api_key is not None else os.environ.get(self.API_KEY_ENV)
        self._dim = dim
        self.batch_size = batch_size
        self.max_attempts = max_attempts
        self.backoff_start_s = backoff_start_s
        self.max_in_flight = max_in_flight
        self.timeout_s = timeout_s
        self.max_text_length = max_text_length
        self._session = session or requests.Session()
        self._sleep = sleep

    @property
    def dim(self) -> int | None:
        return self._dim

    def with_api_key(self, api_key: str) -> "RemoteEmbedder":
        clone = RemoteEmbedder(
            self.endpoint,
            self.model,
            api_key=api_key,
            dim=self._dim,
            batch_size=self.batch_size,
            max_attempts=self.max_attempts,
            backoff_start_s=self.backoff_start_s,
            max_in_flight=self.max_in_flight,
            timeout_s=self.timeout_s,
            max_text_length=self.max_text_length,
            session=self._session,
            sleep=self._sleep,
        )
        return clone

    def embed_batch(self, texts: Sequence[str]) -> list[np.ndarray]:
        if not texts:
            raise ValueError("texts must be non-empty")
        too_long = [i for i, t in enumerate(texts) if len(t) > self.max_text_length]
        if too_long:
            raise ValueError(f"text at index {too_long[0]} exceeds max length {self.max_text_length}")

        batches = [
            list(texts[i : i + self.batch_size]) for i in range(0, len(texts), self.batch_size)
        ]
        if len(batches) == 1:
            parts = [self._post_batch(batches[0])]
        else:
            with ThreadPoolExecutor(max_workers=self.max_in_flight) as pool:
                parts = list(pool.map(self._post_batch, batches))
        vectors: list[np.ndarray] = []
        for part in parts:
            vectors.extend(part)
        return vectors

    def _post_batch(self, batch: list[str]) -> list[np.ndarray]:
        payload = {"input": batch, "model": self.model}
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

        delay = self.backoff_start_s
        last_error: Exception | None = None
        for attempt in range(1, self.max_attempts + 1):
            try:
                response = self._session.post(
                    self.endpoint, json=payload, headers=headers, timeout=self.timeout_s
                )
            except requests.Timeout as exc:
                last_error = ProviderTimeout(f"embedding request timed out: {exc}")
            except requests.RequestException as exc:
                raise ProviderError(f"embedding request failed: {exc}") from exc
            else:
                if response.status_code in (401, 403):
                    raise ProviderAuth(f"embedding provider rejected credential ({response.status_code})")
                if response.status_code == 429:
                    last_error = ProviderRateLimit("embedding provider rate limit (429)")
                elif response.status_code >= 400:
                    raise ProviderError(
                        f"embedding provider returned HTTP {response.status_code}"
                    )
                else:
                    body = response.json()
                    if logger.isEnabledFor(logging.DEBUG):
                        logger.debug(
                            "embedding response status=%s body=%s",
                            response.status_code,
                            json.dumps(body),
                        )
                    return self._parse_response(body, len(batch))
            if attempt < self.max_attempts:
                self._sleep(delay)
                delay *= 2
        assert last_error is not None
        raise last_error

    def _parse_response(self, body: dict, expected: int) -> list[np.ndarray]:
        try:
            rows = body["data"]
            raw_vectors = [row["embedding"] for row in rows]
        except (KeyError, TypeError) as exc:
            raise ProviderError(f"malformed embedding response: {exc}") from exc
        if len(raw_vectors) != expected:
            raise ProviderError(
                f"embedding provider returned {len(raw_vectors)} vectors for {expected} inputs"
            )
        vectors = [np.asarray(v, dtype=np.float64) for v in raw_vectors]
        for vec in vectors:
            if self._dim is None:
                self._dim = int(vec.shape[0])  # pinned from the first response
            if vec.shape != (self._dim,):
                raise DimensionMismatch(
                    f"provider returned dim {vec.shape[0]}, pinned dim is {self._dim}"
                )
            if not np.all(np.isfinite(vec)):
                raise ProviderError("provider returned non-finite embedding values")
        return vectors
