import hashlib
import io
import math
import random
import struct

import numpy as np
import pytest

from ramo.catalog import Catalog
from ramo.embedding import deterministic_embed
from ramo.errors import CorruptIndex, DimensionMismatch, EmptyCatalog, FormatVersionMismatch
from ramo.vecindex import (
    FORMAT_VERSION,
    MAGIC,
    VectorIndex,
    build_index,
    load_index,
    save_index,
    search,
)


def brute_force_ranking(index, query, k):
    """Independent oracle: pure-Python cosine plus a full sort."""
    qnorm = math.sqrt(sum(float(x) * float(x) for x in query))
    scored = []
    for cid, vec in index.entries():
        values = [float(v) for v in vec.tolist()]
        dot = sum(v * float(q) for v, q in zip(values, query))
        norm = math.sqrt(sum(v * v for v in values))
        if norm == 0.0 or qnorm == 0.0:
            score = 0.0
        else:
            score = max(-1.0, min(1.0, dot / (norm * qnorm)))
        scored.append((score, cid))
    scored.sort(key=lambda pair: (-pair[0], pair[1]))
    return [cid for _, cid in scored[:k]]


class TestBuildIndex:
    def test_one_entry_per_course(self, fixture_catalog, fixture_index):
        assert len(fixture_index) == len(fixture_catalog) == 10
        assert fixture_index.dim == 256
        assert fixture_index.embedder_name == "deterministic-fnv1a"
        assert fixture_index.catalog_fingerprint == fixture_catalog.source_fingerprint

    def test_empty_catalog_rejected(self, embedder):
        with pytest.raises(EmptyCatalog):
            build_index(Catalog(courses=(), source_fingerprint="x"), embedder)

    def test_rebuild_is_byte_identical(self, fixture_catalog, embedder):
        first, second = io.BytesIO(), io.BytesIO()
        save_index(build_index(fixture_catalog, embedder), first)
        save_index(build_index(fixture_catalog, embedder), second)
        assert first.getvalue() == second.getvalue()

    def test_unique_ids_enforced(self):
        with pytest.raises(ValueError):
            VectorIndex(
                np.asarray([1, 1]), np.ones((2, 8), dtype=np.float32), "e", "fp"
            )


class TestSearch:
    def test_self_query_is_top_hit(self, fixture_index):
        stored = fixture_index.vectors[7]
        hits = search(fixture_index, stored, 1)
        assert hits[0].course_id == int(fixture_index.course_ids[7])
        assert hits[0].score == pytest.approx(1.0, abs=1e-9)

    def test_matches_brute_force_oracle(self, fixture_index):
        rng = random.Random(20240531)
        vocabulary = ["python", "sql", "violin", "paint", "matrix", "market", "data", "course"]
        for _ in range(100):
            text = " ".join(rng.choice(vocabulary) for _ in range(rng.randint(1, 6)))
            query = deterministic_embed(text, fixture_index.dim)
            for k in (1, 3, 5, 8):
                got = [h.course_id for h in search(fixture_index, query, k)]
                assert got == brute_force_ranking(fixture_index, query, k)

    def test_k_caps_at_entry_count(self, fixture_index):
        assert len(search(fixture_index, fixture_index.vectors[0], 50)) == 10

    def test_scores_monotone_nonincreasing(self, fixture_index):
        hits = search(fixture_index, deterministic_embed("python", 256), 10)
        for earlier, later in zip(hits, hits[1:]):
            assert earlier.score >= later.score

    def test_repeatable(self, fixture_index):
        query = deterministic_embed("repeatable", 256)
        assert search(fixture_index, query, 10) == search(fixture_index, query, 10)

    def test_zero_query_scores_zero_ties_break_by_id(self, fixture_index):
        hits = search(fixture_index, np.zeros(256), 10)
        assert [h.score for h in hits] == [0.0] * 10
        assert [h.course_id for h in hits] == sorted(h.course_id for h in hits)

    def test_dimension_mismatch(self, fixture_index):
        with pytest.raises(DimensionMismatch):
            search(fixture_index, np.zeros(255), 1)

    def test_k_must_be_positive(self, fixture_index):
        with pytest.raises(ValueError):
            search(fixture_index, np.zeros(256), 0)

    def test_hits_are_sorted_with_id_tiebreak(self, embedder):
        # two identical vectors -> identical scores -> id ascending
        vectors = np.vstack([np.ones(8), np.ones(8), np.zeros(8)]).astype(np.float32)
        index = VectorIndex(np.asarray([5, 2, 9]), vectors, "e", "fp")
        hits = search(index, np.ones(8), 3)
        assert [h.course_id for h in hits] == [2, 5, 9]


class TestPersistence:
    def test_round_trip_identity(self, fixture_index):
        buf = io.BytesIO()
        save_index(fixture_index, buf)
        buf.seek(0)
        loaded = load_index(buf)
        assert loaded == fixture_index
        assert loaded.embedder_name == fixture_index.embedder_name
        assert loaded.catalog_fingerprint == fixture_index.catalog_fingerprint

    def test_truncated_file_rejected(self, fixture_index):
        buf = io.BytesIO()
        save_index(fixture_index, buf)
        blob = buf.getvalue()
        for cut in (4, len(MAGIC) + 2, len(blob) // 2, len(blob) - 1):
            with pytest.raises(CorruptIndex):
                load_index(io.BytesIO(blob[:cut]))

    def test_bad_magic_rejected(self, fixture_index):
        buf = io.BytesIO()
        save_index(fixture_index, buf)
        blob = b"NOTANIDX" + buf.getvalue()[8:]
        with pytest.raises(CorruptIndex):
            load_index(io.BytesIO(blob))

    def test_flipped_payload_byte_fails_checksum(self, fixture_index):
        buf = io.BytesIO()
        save_index(fixture_index, buf)
        blob = bytearray(buf.getvalue())
        blob[len(blob) // 2] ^= 0xFF
        with pytest.raises(CorruptIndex):
            load_index(io.BytesIO(bytes(blob)))

    def test_future_version_rejected(self, fixture_index):
        buf = io.BytesIO()
        save_index(fixture_index, buf)
        blob = bytearray(buf.getvalue())
        struct.pack_into("<I", blob, len(MAGIC), FORMAT_VERSION + 1)
        # keep the checksum valid so the version gate is what fires
        body = bytes(blob[:-32])
        blob = body + hashlib.sha256(body).digest()
        with pytest.raises(FormatVersionMismatch) as excinfo:
            load_index(io.BytesIO(blob))
        assert excinfo.value.found == FORMAT_VERSION + 1

    def test_trailing_garbage_rejected(self, fixture_index):
        buf = io.BytesIO()
        save_index(fixture_index, buf)
        with pytest.raises(CorruptIndex):
            load_index(io.BytesIO(buf.getvalue() + b"extra"))

    def test_search_identical_after_reload(self, fixture_index):
        buf = io.BytesIO()
        save_index(fixture_index, buf)
        buf.seek(0)
        loaded = load_index(buf)
        query = deterministic_embed("python data course", 256)
        assert search(loaded, query, 8) == search(fixture_index, query, 8)
