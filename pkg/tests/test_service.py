from concurrent.futures import ThreadPoolExecutor

import pytest
from fastapi.testclient import TestClient

from ramo.config import ServiceConfig
from ramo.errors import ProviderAuth
from ramo.generation import Generator, ScriptedGenerator
from ramo.service import SessionStore, build_pipeline, create_app

from .conftest import FIXTURE_CSV


def make_config(**overrides) -> ServiceConfig:
    values = dict(catalog_path=str(FIXTURE_CSV))
    values.update(overrides)
    return ServiceConfig(**values).validate()


@pytest.fixture(scope="module")
def pipeline():
    return build_pipeline(make_config())


@pytest.fixture()
def client(pipeline):
    app = create_app(make_config(), pipeline)
    return TestClient(app)


class TestHealthz:
    def test_ok_after_load(self, client):
        response = client.get("/healthz")
        assert response.status_code == 200
        body = response.json()
        assert body == {
            "status": "ok",
            "catalog_count": 10,
            "index_dim": 256,
            "embedder": "deterministic-fnv1a",
            "generator": "scripted",
        }

    def test_unavailable_before_load(self):
        app = create_app(make_config(), pipeline=None)
        response = TestClient(app).get("/healthz")
        assert response.status_code == 503


class TestDefaults:
    def test_five_by_default(self, client, pipeline):
        calls_before = pipeline.generator.calls
        response = client.get("/api/defaults")
        assert response.status_code == 200
        body = response.json()
        assert body["source"] == "defaults"
        assert len(body["recommendations"]) == 5
        first = body["recommendations"][0]
        assert first["title"] == "Crash Course on Python"
        assert first["rating"] == 4.9
        assert first["url"].startswith("https://")
        assert "course_id" in first
        # the defaults path never touches the generator
        assert pipeline.generator.calls == calls_before

    def test_k_three(self, client):
        body = client.get("/api/defaults?k=3").json()
        assert len(body["recommendations"]) == 3

    def test_schema_stable(self, client):
        body = client.get("/api/defaults").json()
        assert set(body) == {"recommendations", "source"}
        allowed = {"title", "course_id", "url", "rating", "reason"}
        for item in body["recommendations"]:
            assert set(item) <= allowed
            assert "title" in item

    @pytest.mark.parametrize("k", [0, 51, -2])
    def test_k_out_of_range(self, client, k):
        assert client.get(f"/api/defaults?k={k}").status_code == 400

    def test_unavailable_before_load(self):
        app = create_app(make_config(), pipeline=None)
        assert TestClient(app).get("/api/defaults").status_code == 503


class TestChat:
    def test_python_question(self, client):
        response = client.post(
            "/api/chat",
            json={"message": "I want to learn python, can you recommend me some courses?"},
        )
        assert response.status_code == 200
        body = response.json()
        assert set(body) == {"session_id", "reply", "recommendations", "source", "latency_ms"}
        assert body["source"] == "rag"
        assert body["session_id"]
        assert body["latency_ms"] >= 0
        titles = {r["title"] for r in body["recommendations"]}
        assert {
            "Python Basics",
            "Crash Course on Python",
            "Introduction to Python",
            "First Python Program",
        } <= titles
        allowed = {"title", "course_id", "url", "rating", "reason"}
        for rec in body["recommendations"]:
            assert set(rec) <= allowed
            assert rec["title"]
            assert rec["course_id"] is not None
            assert rec["url"].startswith("https://")

    def test_empty_message(self, client):
        assert client.post("/api/chat", json={"message": ""}).status_code == 400

    def test_whitespace_message(self, client):
        assert client.post("/api/chat", json={"message": "  \t "}).status_code == 400

    def test_malformed_json(self, client):
        response = client.post(
            "/api/chat", content=b"{not json", headers={"Content-Type": "application/json"}
        )
        assert response.status_code == 400

    def test_missing_message_field(self, client):
        assert client.post("/api/chat", json={"session": "x"}).status_code == 400

    def test_unknown_session_id_starts_new_session(self, client):
        response = client.post("/api/chat", json={"message": "python", "session_id": "ghost-42"})
        assert response.status_code == 200
        assert response.json()["session_id"] == "ghost-42"

    def test_session_continuity(self, pipeline):
        app = create_app(make_config(), pipeline)
        client = TestClient(app)
        first = client.post("/api/chat", json={"message": "python"}).json()
        sid = first["session_id"]
        client.post("/api/chat", json={"message": "sql", "session_id": sid})
        session = pipeline.sessions.get_or_create(sid)
        assert len(session.turns) == 2

    def test_unavailable_before_load(self):
        app = create_app(make_config(), pipeline=None)
        assert TestClient(app).post("/api/chat", json={"message": "x"}).status_code == 503

    def test_provider_failure_maps_to_502_with_stage(self, pipeline):
        class BrokenGenerator(Generator):
            name = "broken"
            model = "broken"

            def generate(self, prompt):
                raise ProviderAuth("key rejected")

        broken = build_pipeline(make_config())
        broken.recommender = broken.recommender.with_providers(
            broken.embedder, BrokenGenerator()
        )
        app = create_app(make_config(), broken)
        response = TestClient(app).post("/api/chat", json={"message": "python"})
        assert response.status_code == 502
        body = response.json()
        assert body["stage"] == "generate"
        assert "key rejected" in body["error"]


class TestProviderKeyHeader:
    def test_header_overrides_generator_key(self):
        captured = {}

        class RecordingGenerator(ScriptedGenerator):
            def with_api_key(self, api_key):
                captured["key"] = api_key
                return self

        pipeline = build_pipeline(make_config())
        pipeline.generator = RecordingGenerator()
        pipeline.recommender = pipeline.recommender.with_providers(
            pipeline.embedder, pipeline.generator
        )
        app = create_app(make_config(), pipeline)
        client = TestClient(app)
        client.post(
            "/api/chat",
            json={"message": "python"},
            headers={"X-Provider-Key": "sk-user-supplied"},
        )
        assert captured["key"] == "sk-user-supplied"

    def test_no_header_no_override(self):
        captured = {}

        class RecordingGenerator(ScriptedGenerator):
            def with_api_key(self, api_key):
                captured["key"] = api_key
                return self

        pipeline = build_pipeline(make_config())
        pipeline.generator = RecordingGenerator()
        pipeline.recommender = pipeline.recommender.with_providers(
            pipeline.embedder, pipeline.generator
        )
        app = create_app(make_config(), pipeline)
        TestClient(app).post("/api/chat", json={"message": "python"})
        assert captured == {}


class TestCors:
    def test_preflight_allows_configured_origin(self, pipeline):
        config = make_config(cors_allowed_origins=["http://localhost:5173"])
        app = create_app(config, pipeline)
        response = TestClient(app).options(
            "/api/chat",
            headers={
                "Origin": "http://localhost:5173",
                "Access-Control-Request-Method": "POST",
            },
        )
        assert response.headers["access-control-allow-origin"] == "http://localhost:5173"


class EchoGenerator(Generator):
    """Reply carries the question so cross-session mixups are detectable."""

    name = "echo"
    model = "echo"

    def generate(self, prompt):
        return f"echo:{prompt.question_part}"


class TestConcurrency:
    def test_fifty_parallel_sessions_do_not_cross_contaminate(self):
        pipeline = build_pipeline(make_config())
        pipeline.recommender = pipeline.recommender.with_providers(
            pipeline.embedder, EchoGenerator()
        )
        app = create_app(make_config(), pipeline)
        client = TestClient(app)

        def ask(i: int):
            message = f"distinct question number {i}"
            response = client.post(
                "/api/chat", json={"message": message, "session_id": f"session-{i}"}
            )
            return i, response.json()

        with ThreadPoolExecutor(max_workers=16) as pool:
            for i, body in pool.map(ask, range(50)):
                assert body["session_id"] == f"session-{i}"
                assert body["reply"] == f"echo:distinct question number {i}"


class TestSessionStore:
    def test_ttl_eviction(self):
        store = SessionStore(ttl_s=0.05)
        session = store.get_or_create("sticky")
        session.append("q", "a")
        import time

        time.sleep(0.1)
        store.get_or_create(None)  # any access sweeps expired sessions
        fresh = store.get_or_create("sticky")
        assert fresh.turns == []  # the old session was evicted

    def test_reuse_within_ttl(self):
        store = SessionStore(ttl_s=60)
        a = store.get_or_create("same")
        b = store.get_or_create("same")
        assert a is b

    def test_fresh_ids_generated(self):
        store = SessionStore()
        a = store.get_or_create(None)
        b = store.get_or_create(None)
        assert a.session_id != b.session_id
