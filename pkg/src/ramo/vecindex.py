"""Vector index: exact top-k cosine search and versioned binary persistence.

The index is immutable after build; concurrent searches are safe and
lock-free. Search is an exhaustive exact scan - at catalog scale
(thousands of vectors) a dense matrix product answers a query in well
under a millisecond, so no approximate structure is warranted.
"""

from __future__ import annotations

import hashlib
import struct
from dataclasses import dataclass
from typing import IO, Iterator, Sequence

import numpy as np

from .catalog import Catalog
from .embedding import Embedder, course_to_document
from .errors import CorruptIndex, DimensionMismatch, EmptyCatalog, FormatVersionMismatch

MAGIC = b"RAMOIDX\x00"
FORMAT_VERSION = 1
_CHECKSUM_LEN = 32  # sha256


@dataclass(frozen=True)
class SearchHit:
    course_id: int
    score: float


class VectorIndex:
    """Dense (course_id, vector) store for one catalog + embedder pairing."""

    def __init__(
        self,
        course_ids: np.ndarray,
        vectors: np.ndarray,
        embedder_name: str,
        catalog_fingerprint: str,
    ):
        ids = np.ascontiguousarray(course_ids, dtype=np.int64)
        mat = np.ascontiguousarray(vectors, dtype=np.float32)
        if mat.ndim != 2:
            raise ValueError("vectors must be a 2-d array")
        if ids.shape[0] != mat.shape[0]:
            raise ValueError("course_ids and vectors disagree on entry count")
        if len(np.unique(ids)) != ids.shape[0]:
            raise ValueError("course_ids must be unique")
        self.course_ids = ids
        self.vectors = mat
        self.embedder_name = embedder_name
        self.catalog_fingerprint = catalog_fingerprint
        # Scores are computed in float64 so ordering matches any float64 oracle.
        self._vectors64 = mat.astype(np.float64)
        self._norms = np.linalg.norm(self._vectors64, axis=1)

    @property
    def dim(self) -> int:
        return int(self.vectors.shape[1])

    def __len__(self) -> int:
        return int(self.vectors.shape[0])

    def entries(self) -> Iterator[tuple[int, np.ndarray]]:
        for i in range(len(self)):
            yield int(self.course_ids[i]), self.vectors[i]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, VectorIndex):
            return NotImplemented
        return (
            self.embedder_name == other.embedder_name
            and self.catalog_fingerprint == other.catalog_fingerprint
            and np.array_equal(self.course_ids, other.course_ids)
            and np.array_equal(self.vectors, other.vectors)
        )


def build_index(catalog: Catalog, embedder: Embedder) -> VectorIndex:
    """Embed every course document and assemble the index."""
    if len(catalog) == 0:
        raise EmptyCatalog("cannot index an empty catalog")
    documents = [course_to_document(c) for c in catalog]
    vectors = embedder.embed_batch(documents)
    dims = {v.shape[0] for v in vectors}
    if len(dims) != 1:
        raise DimensionMismatch(f"embedder returned mixed dims: {sorted(dims)}")
    return VectorIndex(
        course_ids=np.asarray([c.id for c in catalog], dtype=np.int64),
        vectors=np.vstack([v.astype(np.float32) for v in vectors]),
        embedder_name=embedder.name,
        catalog_fingerprint=catalog.source_fingerprint,
    )


def search(index: VectorIndex, query: Sequence[float] | np.ndarray, k: int) -> list[SearchHit]:
    """Exact top-k by cosine similarity; ties break on course_id ascending."""
    if k < 1:
        raise ValueError("k must be >= 1")
    q = np.asarray(query, dtype=np.float64)
    if q.shape != (index.dim,):
        raise DimensionMismatch(f"query dim {q.shape} does not match index dim {index.dim}")
    qnorm = float(np.linalg.norm(q))
    n = len(index)
    if n == 0:
        return []
    if qnorm == 0.0:
        scores = np.zeros(n, dtype=np.float64)
    else:
        denom = index._norms * qnorm
        raw = index._vectors64 @ q
        scores = np.divide(raw, denom, out=np.zeros(n, dtype=np.float64), where=denom != 0.0)
        np.clip(scores, -1.0, 1.0, out=scores)
    order = np.lexsort((index.course_ids, -scores))
    top = order[: min(k, n)]
    return [SearchHit(int(index.course_ids[i]), float(scores[i])) for i in top]


def save_index(index: VectorIndex, sink: IO[bytes]) -> None:
    """Write the versioned binary layout: header, ids, float32 rows, sha256."""
    name_bytes = index.embedder_name.encode("utf-8")
    fp_bytes = index.catalog_fingerprint.encode("utf-8")
    header = bytearray()
    header += MAGIC
    header += struct.pack("<III", FORMAT_VERSION, index.dim, len(index))
    header += struct.pack("<H", len(name_bytes)) + name_bytes
    header += struct.pack("<H", len(fp_bytes)) + fp_bytes
    body = bytes(header) + index.course_ids.astype("<i8").tobytes() + index.vectors.astype(
        "<f4"
    ).tobytes()
    sink.write(body)
    sink.write(hashlib.sha256(body).digest())


class _Cursor:
    def __init__(self, blob: bytes):
        self.blob = blob
        self.pos = 0

    def take(self, n: int) -> bytes:
        if self.pos + n > len(self.blob):
            raise CorruptIndex("index file is truncated")
        out = self.blob[self.pos : self.pos + n]
        self.pos += n
        return out


def load_index(source: IO[bytes]) -> VectorIndex:
    """Read an index written by save_index; validates version and checksum."""
    blob = source.read()
    cur = _Cursor(blob)
    if cur.take(len(MAGIC)) != MAGIC:
        raise CorruptIndex("bad magic; not an index file")
    (version,) = struct.unpack("<I", cur.take(4))
    if version != FORMAT_VERSION:
        raise FormatVersionMismatch(version, FORMAT_VERSION)
    dim, count = struct.unpack("<II", cur.take(8))
    (name_len,) = struct.unpack("<H", cur.take(2))
    name = cur.take(name_len).decode("utf-8")
    (fp_len,) = struct.unpack("<H", cur.take(2))
    fingerprint = cur.take(fp_len).decode("utf-8")
    ids_raw = cur.take(count * 8)
    vec_raw = cur.take(count * dim * 4)
    digest = cur.take(_CHECKSUM_LEN)
    if cur.pos != len(blob):
        raise CorruptIndex("trailing bytes after checksum")
    if hashlib.sha256(blob[: -_CHECKSUM_LEN]).digest() != digest:
        raise CorruptIndex("checksum mismatch")
    course_ids = np.frombuffer(ids_raw, dtype="<i8").astype(np.int64)
    vectors = np.frombuffer(vec_raw, dtype="<f4").astype(np.float32).reshape(count, dim)
    return VectorIndex(course_ids, vectors, name, fingerprint)
